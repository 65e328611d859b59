#pragma once

#include <json.hpp>

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "vemdem/error.hpp"
#include "vemdem/mesh.hpp"
#include "vemdem/relax.hpp"
#include "vemdem/tensors.hpp"
#include "vemdem/vem.hpp"

// Scenario description for the coupled run and its JSON form.
//
// {
//   "geometry":  {"width", "height", "nx", "ny",
//                 "inner": {"center": [x, y], "half_size", "half_height", "edge_length", "well_radius",
//                           "conform_well"}}
//                or {"mesh_file": "mesh.json"},
//   "materials": {"E", "nu", "tensile_strength", "plane": "plane-strain",
//                 "regions": {"well": {"E": 1e4}}},
//   "bc":        {"left": {"type": "rolling"}, ..., "top": {"type": "traction", "traction": [0, -1e7]}},
//   "fluid":     {"permeability", "porosity", "storativity", "viscosity", "biot",
//                 "initial_pressure", "fracture_multiplier", "volume_coupling"},
//   "well":      {"rate" (optional, m^2/s), "duration"},
//   "time":      {"dt", "steps"},
//   "solver":    {"damping", "tol", "max_steps", "mass_scale", "threads"},
//   "output":    {"dir", "vtk_every"}
// }
//
// Every key is optional; missing keys take the defaults below, which are the
// demo configuration.

namespace vemdem::scenario {

using nlohmann::json;

struct Material {
    double E = 1e9;
    double nu = 0.3;
};

enum class VolumeCoupling { None, FracturedAndWell, All };

inline VolumeCoupling volume_coupling_from_string(const std::string& s) {
    if (s == "none") return VolumeCoupling::None;
    if (s == "fractured-and-well") return VolumeCoupling::FracturedAndWell;
    if (s == "all") return VolumeCoupling::All;
    throw ConfigError("unknown volume_coupling '" + s + "'");
}

inline std::string to_string(VolumeCoupling v) {
    switch (v) {
    case VolumeCoupling::None: return "none";
    case VolumeCoupling::FracturedAndWell: return "fractured-and-well";
    case VolumeCoupling::All: return "all";
    }
    return "unknown";
}

struct SideSpec {
    vem::SideBc::Type type = vem::SideBc::Type::Rolling;
    mesh::Vec2 value = mesh::Vec2::Zero();  // traction (Pa) or fixed displacement (m)

    vem::SideBc to_bc() const {
        switch (type) {
        case vem::SideBc::Type::Rolling: return vem::SideBc::rolling();
        case vem::SideBc::Type::Traction: return vem::SideBc::traction_load(value);
        case vem::SideBc::Type::Fixed: {
            const mesh::Vec2 g = value;
            return vem::SideBc::fixed([g](const mesh::Vec2&) { return g; });
        }
        }
        return vem::SideBc::rolling();
    }
};

struct Scenario {
    // geometry
    std::optional<std::string> mesh_file;
    mesh::OuterGrid outer{10.0, 10.0, 10, 10};
    mesh::InnerRegion inner{mesh::Vec2(5.0, 5.0), 1.0, 0.0625, 0.25, true, 2.0};

    // materials
    Material rock;
    std::map<mesh::Region, Material> region_overrides{{mesh::Region::Well, Material{1e4, 0.3}}};
    double tensile_strength = 2e5;
    tensors::PlaneMode plane = tensors::PlaneMode::PlaneStrain;

    // boundary conditions
    SideSpec left, right, bottom;
    SideSpec top{vem::SideBc::Type::Traction, mesh::Vec2(0.0, -1e7)};

    // fluid
    double permeability = 10e-9 * 9.869233e-13;  // 10 nD
    double porosity = 0.3;
    double storativity = 1e-10;
    double viscosity = 1e-3;
    double biot = 1.0;
    double initial_pressure = 1e7;
    double fracture_multiplier = 1e6;
    VolumeCoupling coupling = VolumeCoupling::FracturedAndWell;

    // well
    std::optional<double> well_rate;  // total; default pore volume of the well cells per duration
    double injection_duration = 3600.0;

    // time
    double dt = 72.0;
    int steps = 50;

    // solver
    relax::RelaxConfig relax{0.8, 1e-6, 2000000, 1.0, 1.0, 0};
    unsigned threads = 1;

    // output
    std::string output_dir;
    int vtk_every = 0;

    Material material(mesh::Region r) const {
        const auto it = region_overrides.find(r);
        return it == region_overrides.end() ? rock : it->second;
    }

    vem::BcSpec bc_spec() const { return {left.to_bc(), right.to_bc(), bottom.to_bc(), top.to_bc()}; }

    void check() const {
        if (!mesh_file) {
            if (!(outer.width > 0.0 && outer.height > 0.0 && outer.nx > 0 && outer.ny > 0)) {
                throw ConfigError("geometry: outer grid needs positive extent and cell counts");
            }
        }
        auto check_material = [this](const Material& m, const std::string& where) {
            try {
                (void)tensors::elastic_moduli(m.E, m.nu, plane);
            } catch (const ParameterError& e) {
                throw ConfigError("materials." + where + ": " + e.what());
            }
        };
        check_material(rock, "rock");
        for (const auto& [r, m] : region_overrides) check_material(m, "regions." + mesh::to_string(r));
        if (!(tensile_strength >= 0.0)) throw ConfigError("materials.tensile_strength must be non-negative");
        if (!(permeability >= 0.0)) throw ConfigError("fluid.permeability must be non-negative");
        if (!(porosity > 0.0 && porosity <= 1.0)) throw ConfigError("fluid.porosity must lie in (0, 1]");
        if (!(storativity > 0.0)) throw ConfigError("fluid.storativity must be positive");
        if (!(viscosity > 0.0)) throw ConfigError("fluid.viscosity must be positive");
        if (!(biot >= 0.0 && biot <= 1.0)) throw ConfigError("fluid.biot must lie in [0, 1]");
        if (!(fracture_multiplier > 0.0)) throw ConfigError("fluid.fracture_multiplier must be positive");
        if (well_rate && !(*well_rate >= 0.0)) throw ConfigError("well.rate must be non-negative");
        if (!(injection_duration > 0.0)) throw ConfigError("well.duration must be positive");
        if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
        if (steps < 0) throw ConfigError("time.steps must be non-negative");
        if (vtk_every < 0) throw ConfigError("output.vtk_every must be non-negative");
        try {
            relax.check();
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("solver: ") + e.what());
        }
    }
};

namespace detail {

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& section) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(section + "." + key + ": " + e.what());
    }
}

inline mesh::Vec2 read_vec2(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(where + ": expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

inline const json& section(const json& doc, const char* key) {
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& s = doc.at(key);
    if (!s.is_object()) throw ConfigError(std::string(key) + ": expected an object");
    return s;
}

inline SideSpec read_side(const json& bc, const char* key) {
    SideSpec s;
    if (!bc.contains(key)) return s;
    const json& j = bc.at(key);
    const std::string where = std::string("bc.") + key;
    std::string type = "rolling";
    read(j, "type", type, where);
    if (type == "rolling") {
        s.type = vem::SideBc::Type::Rolling;
    } else if (type == "traction") {
        s.type = vem::SideBc::Type::Traction;
        if (!j.contains("traction")) throw ConfigError(where + ": traction side needs \"traction\"");
        s.value = read_vec2(j.at("traction"), where + ".traction");
    } else if (type == "fixed") {
        s.type = vem::SideBc::Type::Fixed;
        if (j.contains("displacement")) s.value = read_vec2(j.at("displacement"), where + ".displacement");
    } else {
        throw ConfigError(where + ": unknown type '" + type + "'");
    }
    return s;
}

} // namespace detail

inline Scenario from_json(const json& doc) {
    using detail::read;
    if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
    Scenario sc;

    const json& geo = detail::section(doc, "geometry");
    if (geo.contains("mesh_file")) {
        std::string f;
        read(geo, "mesh_file", f, "geometry");
        sc.mesh_file = f;
    }
    read(geo, "width", sc.outer.width, "geometry");
    read(geo, "height", sc.outer.height, "geometry");
    read(geo, "nx", sc.outer.nx, "geometry");
    read(geo, "ny", sc.outer.ny, "geometry");
    if (geo.contains("inner")) {
        const json& in = geo.at("inner");
        if (in.contains("center")) sc.inner.center = detail::read_vec2(in.at("center"), "geometry.inner.center");
        read(in, "half_size", sc.inner.half_size, "geometry.inner");
        read(in, "half_height", sc.inner.half_height, "geometry.inner");
        read(in, "edge_length", sc.inner.edge_length, "geometry.inner");
        read(in, "well_radius", sc.inner.well_radius, "geometry.inner");
        read(in, "conform_well", sc.inner.conform_well, "geometry.inner");
    }

    const json& mat = detail::section(doc, "materials");
    read(mat, "E", sc.rock.E, "materials");
    read(mat, "nu", sc.rock.nu, "materials");
    read(mat, "tensile_strength", sc.tensile_strength, "materials");
    if (mat.contains("plane")) {
        std::string p;
        read(mat, "plane", p, "materials");
        try {
            sc.plane = tensors::plane_mode_from_string(p);
        } catch (const Error& e) {
            throw ConfigError(std::string("materials.plane: ") + e.what());
        }
    }
    if (mat.contains("regions")) {
        sc.region_overrides.clear();
        for (const auto& [name, val] : mat.at("regions").items()) {
            mesh::Region r;
            try {
                r = mesh::region_from_string(name);
            } catch (const Error&) {
                throw ConfigError("materials.regions: unknown region '" + name + "'");
            }
            Material m = sc.rock;
            read(val, "E", m.E, "materials.regions." + name);
            read(val, "nu", m.nu, "materials.regions." + name);
            sc.region_overrides[r] = m;
        }
    }

    const json& bc = detail::section(doc, "bc");
    for (const auto& [k, v] : bc.items()) {
        (void)v;
        if (k != "left" && k != "right" && k != "bottom" && k != "top") throw ConfigError("bc: unknown side '" + k + "'");
    }
    sc.left = detail::read_side(bc, "left");
    sc.right = detail::read_side(bc, "right");
    sc.bottom = detail::read_side(bc, "bottom");
    if (bc.contains("top")) sc.top = detail::read_side(bc, "top");

    const json& fl = detail::section(doc, "fluid");
    read(fl, "permeability", sc.permeability, "fluid");
    read(fl, "porosity", sc.porosity, "fluid");
    read(fl, "storativity", sc.storativity, "fluid");
    read(fl, "viscosity", sc.viscosity, "fluid");
    read(fl, "biot", sc.biot, "fluid");
    read(fl, "initial_pressure", sc.initial_pressure, "fluid");
    read(fl, "fracture_multiplier", sc.fracture_multiplier, "fluid");
    if (fl.contains("volume_coupling")) {
        std::string v;
        read(fl, "volume_coupling", v, "fluid");
        sc.coupling = volume_coupling_from_string(v);
    }

    const json& well = detail::section(doc, "well");
    if (well.contains("rate") && !well.at("rate").is_null()) {
        double r = 0.0;
        read(well, "rate", r, "well");
        sc.well_rate = r;
    }
    read(well, "duration", sc.injection_duration, "well");

    const json& time = detail::section(doc, "time");
    read(time, "dt", sc.dt, "time");
    read(time, "steps", sc.steps, "time");

    const json& sol = detail::section(doc, "solver");
    read(sol, "damping", sc.relax.damping, "solver");
    read(sol, "tol", sc.relax.tol, "solver");
    read(sol, "max_steps", sc.relax.max_steps, "solver");
    read(sol, "mass_scale", sc.relax.mass_scale, "solver");
    read(sol, "threads", sc.threads, "solver");

    const json& out = detail::section(doc, "output");
    read(out, "dir", sc.output_dir, "output");
    read(out, "vtk_every", sc.vtk_every, "output");

    sc.check();
    return sc;
}

inline Scenario load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open scenario");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError(path, std::string("invalid JSON: ") + e.what());
    }
    Scenario sc = from_json(doc);
    // Relative mesh paths are taken relative to the scenario file.
    if (sc.mesh_file && !sc.mesh_file->empty() && sc.mesh_file->front() != '/') {
        const auto slash = path.find_last_of('/');
        if (slash != std::string::npos) sc.mesh_file = path.substr(0, slash + 1) + *sc.mesh_file;
    }
    return sc;
}

} // namespace vemdem::scenario
