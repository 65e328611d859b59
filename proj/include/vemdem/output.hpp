#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/mesh.hpp"
#include "vemdem/tensors.hpp"

// Legacy ASCII VTK snapshots.
//
// POINT_DATA  displacement (vector, z = 0)
//             stress       (tensor, recovered nodal sxx syy sxy; zz row/column zero)
// CELL_DATA   pressure, div_u, sigma_max, sigma_min (scalars)
//             dir_max, dir_min (vectors, z = 0)
//             fractured, region (int scalars; region 0 near-field, 1 far-field, 2 well)

namespace vemdem::output {

using Eigen::VectorXd;
using tensors::KelvinVector;

struct Snapshot {
    double time = 0.0;
    VectorXd u;                               // 2 per node
    std::vector<KelvinVector> nodal_stress;   // per node
    VectorXd pressure;                        // per cell
    VectorXd divergence;                      // per cell
    std::vector<KelvinVector> cell_stress;    // per cell
    std::vector<char> fractured;              // per cell
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

inline void write_vtk(const mesh::PolyMesh& m, const Snapshot& s, const std::string& path) {
    const std::size_t np = m.num_nodes();
    const std::size_t nc = m.num_cells();
    if (static_cast<std::size_t>(s.u.size()) != 2 * np || s.nodal_stress.size() != np ||
        static_cast<std::size_t>(s.pressure.size()) != nc || static_cast<std::size_t>(s.divergence.size()) != nc ||
        s.cell_stress.size() != nc || s.fractured.size() != nc) {
        throw ValidationError("snapshot fields do not match the mesh");
    }
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    using detail::num;

    out << "# vtk DataFile Version 3.0\n";
    out << "vemdem snapshot t=" << num(s.time) << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << np << " double\n";
    for (const auto& x : m.nodes) out << num(x.x()) << ' ' << num(x.y()) << " 0\n";

    std::size_t total = 0;
    for (const auto& c : m.cells) total += c.size() + 1;
    out << "CELLS " << nc << ' ' << total << '\n';
    for (const auto& c : m.cells) {
        out << c.size();
        for (int v : c) out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << nc << '\n';
    for (const auto& c : m.cells) out << (c.size() == 3 ? 5 : 7) << '\n';

    out << "POINT_DATA " << np << '\n';
    out << "VECTORS displacement double\n";
    for (std::size_t i = 0; i < np; ++i) out << num(s.u(2 * i)) << ' ' << num(s.u(2 * i + 1)) << " 0\n";
    out << "TENSORS stress double\n";
    for (const auto& k : s.nodal_stress) {
        const auto t = tensors::from_kelvin(k);
        out << num(t(0, 0)) << ' ' << num(t(0, 1)) << " 0\n"
            << num(t(1, 0)) << ' ' << num(t(1, 1)) << " 0\n0 0 0\n";
    }

    out << "CELL_DATA " << nc << '\n';
    auto scalars = [&](const char* name, auto&& value) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (std::size_t c = 0; c < nc; ++c) out << num(value(c)) << '\n';
    };
    std::vector<tensors::PrincipalStresses> ps;
    ps.reserve(nc);
    for (const auto& k : s.cell_stress) ps.push_back(tensors::principal_stresses(k));
    scalars("pressure", [&](std::size_t c) { return s.pressure(c); });
    scalars("div_u", [&](std::size_t c) { return s.divergence(c); });
    scalars("sigma_max", [&](std::size_t c) { return ps[c].max; });
    scalars("sigma_min", [&](std::size_t c) { return ps[c].min; });
    out << "VECTORS dir_max double\n";
    for (const auto& p : ps) out << num(p.dir_max.x()) << ' ' << num(p.dir_max.y()) << " 0\n";
    out << "VECTORS dir_min double\n";
    for (const auto& p : ps) out << num(p.dir_min.x()) << ' ' << num(p.dir_min.y()) << " 0\n";
    out << "SCALARS fractured int 1\nLOOKUP_TABLE default\n";
    for (char f : s.fractured) out << (f ? 1 : 0) << '\n';
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (auto r : m.region) out << static_cast<int>(r) << '\n';
    if (!out) throw IoError(path, "write failed");
}

} // namespace vemdem::output
