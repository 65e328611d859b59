#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/flow.hpp"
#include "vemdem/mdem.hpp"
#include "vemdem/mesh.hpp"
#include "vemdem/mesh_io.hpp"
#include "vemdem/output.hpp"
#include "vemdem/relax.hpp"
#include "vemdem/scenario.hpp"
#include "vemdem/tensors.hpp"
#include "vemdem/vem.hpp"

// Coupled hydro-mechanical fracturing run.
//
// Each outer step:
//   1. pressure step (injection + diffusion) with the displacements held;
//   2. mechanics relaxation with the fluid content of coupled cells held,
//      so their pressure follows the volume change (undrained split);
//   3. fracture sweep on the effective stress: the worst violator fails, the
//      mechanics is relaxed again, and so on until no cell violates.

namespace vemdem::sim {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using tensors::KelvinVector;

// ---------------------------------------------------------------------------
// Events, stress recovery, fracture sweep
// ---------------------------------------------------------------------------

struct FractureEvent {
    double time = 0.0;
    int cell = -1;
    double stress = 0.0;  // max principal effective stress that triggered it
};

class EventLog {
public:
    void add(const FractureEvent& e) {
        if (!events_.empty() && e.time < events_.back().time) {
            throw ValidationError("fracture events must be added in time order");
        }
        events_.push_back(e);
    }
    const std::vector<FractureEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    void write_csv(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError(path, "cannot open for writing");
        out << "time,cell,max_principal_stress\n";
        char buf[96];
        for (const auto& e : events_) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", e.time, e.cell, e.stress);
            out << buf;
        }
        if (!out) throw IoError(path, "write failed");
    }

private:
    std::vector<FractureEvent> events_;
};

struct TraceRow {
    double time = 0.0;
    double max_pressure = 0.0;
    int fractured = 0;
};

inline void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "time,max_pressure,fractured_count\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", r.time, r.max_pressure, r.fractured);
        out << buf;
    }
    if (!out) throw IoError(path, "write failed");
}

/// Area-weighted average of the stresses of the cells around each node.
inline std::vector<KelvinVector> stress_recovery(const mesh::PolyMesh& m, const std::vector<double>& area,
                                                 const std::vector<KelvinVector>& cell_stress) {
    if (area.size() != m.num_cells() || cell_stress.size() != m.num_cells()) {
        throw ValidationError("stress_recovery: one area and one stress per cell are required");
    }
    std::vector<KelvinVector> sum(m.num_nodes(), KelvinVector::Zero());
    std::vector<double> weight(m.num_nodes(), 0.0);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        for (int v : m.cells[c]) {
            sum[v] += area[c] * cell_stress[c];
            weight[v] += area[c];
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        if (weight[i] > 0.0) sum[i] /= weight[i];
    }
    return sum;
}

struct SweepResult {
    int cell = -1;
    double stress = 0.0;
};

/// The intact near-field simplex cell with the largest violating max principal
/// stress; ties go to the lower cell id.
inline std::optional<SweepResult> fracture_sweep(const mesh::PolyMesh& m, const std::vector<char>& fractured,
                                                 const std::vector<KelvinVector>& stress, double tensile_strength) {
    if (tensile_strength < 0.0) throw ParameterError("tensile strength must be non-negative");
    std::optional<SweepResult> best;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        if (fractured[c] || m.kind[c] != mesh::CellKind::Simplex || m.region[c] != mesh::Region::NearField) continue;
        const double s = tensors::max_principal(stress[c]);
        if (!(s > tensile_strength)) continue;
        if (!best || s > best->stress) best = SweepResult{static_cast<int>(c), s};
    }
    return best;
}

/// Bounding box of the fractured-cell centroids: vertical extent over
/// horizontal extent (the top load acts along y). 0 with no fractured cell;
/// infinite for a single column.
inline double fracture_aspect(const mesh::GeometryCache& g, const std::vector<char>& fractured) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    bool any = false;
    for (std::size_t c = 0; c < fractured.size(); ++c) {
        if (!fractured[c]) continue;
        any = true;
        const auto& p = g.centroid[c];
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    }
    if (!any) return 0.0;
    return x1 > x0 ? (y1 - y0) / (x1 - x0) : INFINITY;
}

// ---------------------------------------------------------------------------
// Mechanics with intact VEM cells, fractured MDEM cells and fluid pressure
// ---------------------------------------------------------------------------

/// Fluid side as seen by the mechanics: coupled cells keep their fluid content
/// m = S_c V p + alpha div u fixed, the others a fixed pressure.
struct FluidCoupling {
    double biot = 0.0;
    double p0 = 0.0;
    VectorXd storage;  // S_c V
    std::vector<char> coupled;
    VectorXd content;
    VectorXd pressure;

    VectorXd pressure_at(const VectorXd& div_u) const {
        VectorXd p = pressure;
        for (Eigen::Index c = 0; c < p.size(); ++c) {
            if (coupled[c]) p(c) = (content(c) - biot * div_u(c)) / storage(c);
        }
        return p;
    }

    void hold_content(const VectorXd& div_u) {
        for (Eigen::Index c = 0; c < pressure.size(); ++c) {
            if (coupled[c]) content(c) = storage(c) * pressure(c) + biot * div_u(c);
        }
    }
};

/// Static per-cell mechanics data.
struct CellOperators {
    std::vector<vem::LocalVem> vem;
    std::vector<std::optional<mdem::EdgeStrainOperator>> edge;  // simplex cells only
    std::vector<mdem::KelvinMatrix> K;
    std::vector<tensors::StiffnessTensor> D;
    std::vector<VectorXd> row_bound;  // per-cell row sums bounding |stiffness| in any state
};

inline CellOperators build_cell_operators(const mesh::PolyMesh& m, const std::vector<tensors::StiffnessTensor>& D,
                                          unsigned threads) {
    CellOperators ops;
    ops.D = D;
    ops.vem = vem::local_operators(m, D, threads);
    ops.edge.resize(m.num_cells());
    ops.K.assign(m.num_cells(), mdem::KelvinMatrix::Zero());
    ops.row_bound.resize(m.num_cells());
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        Eigen::MatrixXd bound = ops.vem[c].A_K.cwiseAbs();
        if (m.cells[c].size() == 3) {
            const auto corners = vem::cell_corners(m, c);
            ops.edge[c] = mdem::edge_strain_operator(corners);
            ops.K[c] = mdem::stiffness_from_cauchy(*ops.edge[c], D[c].matrix());
            const Eigen::MatrixXd central =
                ops.edge[c]->R.transpose() * ops.K[c].diagonal().asDiagonal() * ops.edge[c]->R;
            bound = bound.cwiseMax(central.cwiseAbs());
        }
        ops.row_bound[c] = bound.rowwise().sum();
    }
    return ops;
}

class HybridModel {
public:
    HybridModel(const mesh::PolyMesh& m, const CellOperators& ops, const std::vector<char>& fractured,
                const SparseMatrix& intact, const SparseMatrix& div, const FluidCoupling& fluid,
                const std::vector<char>& fixed, const VectorXd& load, const VectorXd& u_start)
        : m_(m), ops_(ops), fractured_(fractured), intact_(intact), div_(div), fluid_(fluid), fixed_(fixed),
          load_(load) {
        for (std::size_t c = 0; c < m.num_cells(); ++c) {
            if (fractured[c]) fractured_cells_.push_back(static_cast<int>(c));
        }
        VectorXd f = load_ + fluid_.biot * (div_.transpose() * (fluid_.pressure_at(div_ * u_start).array() - fluid_.p0).matrix());
        ref_ = 0.0;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            if (!fixed_[i]) ref_ = std::max(ref_, std::abs(f(i)));
        }
    }

    Eigen::Index dof_count() const { return load_.size(); }
    const std::vector<char>& fixed() const { return fixed_; }
    double reference_force() const { return ref_; }

    void residual(const VectorXd& u, VectorXd& r) const {
        r.noalias() = load_ - intact_ * u;
        if (fluid_.biot != 0.0) {
            div_u_.noalias() = div_ * u;
            VectorXd dp = fluid_.pressure_at(div_u_).array() - fluid_.p0;
            r.noalias() += fluid_.biot * (div_.transpose() * dp);
        }
        mdem::Vec6 ue;
        for (int c : fractured_cells_) {
            const auto& loop = m_.cells[c];
            for (int i = 0; i < 3; ++i) {
                ue(2 * i) = u(2 * loop[i]);
                ue(2 * i + 1) = u(2 * loop[i] + 1);
            }
            mdem::MdemStiffness s;
            s.K = ops_.K[c];
            const auto f = mdem::fractured_forces(*ops_.edge[c], s, ue);
            for (int i = 0; i < 3; ++i) {
                r(2 * loop[i]) -= f.nodal(2 * i);
                r(2 * loop[i] + 1) -= f.nodal(2 * i + 1);
            }
        }
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (fixed_[i]) r(i) = 0.0;
        }
    }

    VectorXd nodal_mass(double beta) const {
        VectorXd mass = VectorXd::Zero(load_.size());
        for (std::size_t c = 0; c < m_.num_cells(); ++c) {
            const auto& loop = m_.cells[c];
            const VectorXd& rb = ops_.row_bound[c];
            for (std::size_t i = 0; i < loop.size(); ++i) {
                mass(2 * loop[i]) += rb(2 * i);
                mass(2 * loop[i] + 1) += rb(2 * i + 1);
            }
        }
        // Undrained stiffness alpha^2 / (S_c V) d d^T of the coupled cells.
        if (fluid_.biot != 0.0) {
            for (Eigen::Index c = 0; c < div_.rows(); ++c) {
                if (!fluid_.coupled[c]) continue;
                double total = 0.0;
                for (SparseMatrix::InnerIterator it(div_t_(), c); it; ++it) total += std::abs(it.value());
                const double k = fluid_.biot * fluid_.biot / fluid_.storage(c);
                for (SparseMatrix::InnerIterator it(div_t_(), c); it; ++it) {
                    mass(it.row()) += k * std::abs(it.value()) * total;
                }
            }
        }
        for (Eigen::Index i = 0; i < mass.size(); ++i) {
            if (!(mass(i) > 0.0)) mass(i) = 1.0;
            mass(i) *= beta;
        }
        return mass;
    }

private:
    // Column-major transpose of the divergence, one column per cell.
    const SparseMatrix& div_t_() const {
        if (div_t_cache_.rows() == 0) div_t_cache_ = div_.transpose();
        return div_t_cache_;
    }

    const mesh::PolyMesh& m_;
    const CellOperators& ops_;
    const std::vector<char>& fractured_;
    const SparseMatrix& intact_;
    const SparseMatrix& div_;
    const FluidCoupling& fluid_;
    const std::vector<char>& fixed_;
    const VectorXd& load_;
    std::vector<int> fractured_cells_;
    double ref_ = 0.0;
    mutable VectorXd div_u_;
    mutable SparseMatrix div_t_cache_;
};

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimState {
    int step = 0;
    double time = 0.0;
    VectorXd u;
    VectorXd p;
    std::vector<char> fractured;
    std::vector<std::array<bool, 3>> broken_edges;  // tensile (force-free) edges of fractured cells
};

struct RunResult {
    std::vector<SimState> snapshots;
    EventLog events;
    std::vector<TraceRow> trace;
    std::size_t relax_steps = 0;
};

inline mesh::PolyMesh build_mesh(const scenario::Scenario& sc) {
    if (sc.mesh_file) return mesh::read_mesh_json(*sc.mesh_file);
    return mesh::build_hybrid_mesh(sc.outer, sc.inner);
}

class Simulation {
public:
    explicit Simulation(const scenario::Scenario& sc) : Simulation(sc, build_mesh(sc)) {}

    Simulation(const scenario::Scenario& sc, mesh::PolyMesh m) : sc_(sc), mesh_(std::move(m)) {
        sc_.check();
        const auto diags = mesh::validate(mesh_);
        if (!diags.empty()) throw MeshError("invalid mesh: " + diags.front().message);
        topo_ = mesh::build_topology(mesh_);
        geom_ = mesh::compute_geometry(mesh_);
        const std::size_t nc = mesh_.num_cells();

        for (const auto& [region, mat] : sc_.region_overrides) {
            (void)mat;
            if (std::none_of(mesh_.region.begin(), mesh_.region.end(), [&](auto r) { return r == region; })) {
                throw ConfigError("materials.regions: region '" + mesh::to_string(region) + "' has no cells");
            }
        }
        std::vector<tensors::StiffnessTensor> D;
        D.reserve(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto mat = sc_.material(mesh_.region[c]);
            D.push_back(tensors::isotropic_stiffness(mat.E, mat.nu, sc_.plane));
        }
        ops_ = build_cell_operators(mesh_, D, sc_.threads);
        div_ = vem::discrete_divergence(mesh_, geom_);

        vem::BoundaryData bd = vem::apply_boundary(mesh_, topo_, sc_.bc_spec());
        fixed_ = std::move(bd.fixed);
        prescribed_ = std::move(bd.prescribed);
        load_ = std::move(bd.load);

        // Fluid.
        volume_ = geom_.area;
        rock_.permeability.assign(nc, sc_.permeability);
        rock_.porosity = sc_.porosity;
        rock_.storativity = sc_.storativity;
        rock_.viscosity = sc_.viscosity;
        rock_.biot = sc_.biot;
        rock_.fracture_multiplier = sc_.fracture_multiplier;
        source_ = VectorXd::Zero(static_cast<Eigen::Index>(nc));
        double well_volume = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            if (mesh_.region[c] == mesh::Region::Well) well_volume += volume_[c];
        }
        const double rate = sc_.well_rate ? *sc_.well_rate : sc_.porosity * well_volume / sc_.injection_duration;
        if (rate > 0.0 && well_volume == 0.0) throw ConfigError("well: injection requested but the mesh has no well cells");
        for (std::size_t c = 0; c < nc; ++c) {
            if (mesh_.region[c] == mesh::Region::Well) source_(c) = rate * volume_[c] / well_volume;
        }
        injection_rate_ = rate;

        fluid_.biot = sc_.biot;
        fluid_.p0 = sc_.initial_pressure;
        fluid_.storage.resize(static_cast<Eigen::Index>(nc));
        for (std::size_t c = 0; c < nc; ++c) fluid_.storage(c) = sc_.storativity * volume_[c];
        fluid_.coupled.assign(nc, 0);
        fluid_.content = VectorXd::Zero(static_cast<Eigen::Index>(nc));

        state_.fractured.assign(nc, 0);
        state_.broken_edges.assign(nc, {false, false, false});
        update_coupled_set();
        rebuild_flow();
        rebuild_intact();
        initialize();
    }

    const mesh::PolyMesh& mesh() const { return mesh_; }
    const mesh::GeometryCache& geometry() const { return geom_; }
    const SimState& state() const { return state_; }
    const EventLog& events() const { return events_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    const scenario::Scenario& scenario() const { return sc_; }
    double injection_rate() const { return injection_rate_; }
    std::size_t relax_steps() const { return relax_steps_; }

    /// Effective (skeleton) stress per cell; post-fracture edge forces for fractured cells.
    std::vector<KelvinVector> cell_stresses() const {
        std::vector<KelvinVector> out(mesh_.num_cells());
        for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
            const VectorXd ue = element_dofs(c, state_.u);
            if (state_.fractured[c]) {
                const auto& op = *ops_.edge[c];
                const KelvinVector F = mdem::post_fracture_forces(ops_.K[c], op.R * ue);
                out[c] = mdem::stress_from_edge_forces(op, F);
            } else {
                out[c] = ops_.D[c].matrix() * (ops_.vem[c].W_C * ue);
            }
        }
        return out;
    }

    VectorXd divergence() const { return div_ * state_.u; }

    output::Snapshot snapshot() const {
        output::Snapshot s;
        s.time = state_.time;
        s.u = state_.u;
        s.pressure = state_.p;
        s.divergence = divergence();
        s.cell_stress = cell_stresses();
        s.nodal_stress = stress_recovery(mesh_, volume_, s.cell_stress);
        s.fractured = state_.fractured;
        return s;
    }

    /// One outer time step.
    void step() {
        const double t0 = state_.time;
        const double t1 = t0 + sc_.dt;
        // Injection only inside [0, duration].
        const double active = std::clamp(sc_.injection_duration - t0, 0.0, sc_.dt) / sc_.dt;
        const VectorXd q = active * source_;

        flow::PressureStepInput in;
        in.pressure = &state_.p;
        in.dt = sc_.dt;
        in.source = &q;
        state_.p = flow::pressure_step(volume_, trans_, rock_, in);
        state_.time = t1;
        state_.step += 1;

        equilibrate();
        trace_.push_back({state_.time, state_.p.maxCoeff(), fractured_count()});
    }

    RunResult run(const std::function<void(const Simulation&)>& on_step = {}) {
        RunResult res;
        const bool write = !sc_.output_dir.empty();
        if (write) std::filesystem::create_directories(sc_.output_dir);
        auto snapshot_due = [&](int k) { return sc_.vtk_every > 0 ? k % sc_.vtk_every == 0 : k == sc_.steps; };
        auto take_snapshot = [&]() {
            res.snapshots.push_back(state_);
            if (write) {
                char name[64];
                std::snprintf(name, sizeof name, "/snapshot_%04d.vtk", state_.step);
                output::write_vtk(mesh_, snapshot(), sc_.output_dir + name);
            }
        };
        if (sc_.vtk_every > 0) take_snapshot();
        for (int k = 1; k <= sc_.steps; ++k) {
            try {
                step();
            } catch (const relax::NonConvergence& e) {
                if (write) {
                    output::write_vtk(mesh_, snapshot(), sc_.output_dir + "/failure_dump.vtk");
                    events_.write_csv(sc_.output_dir + "/events.csv");
                    write_trace_csv(trace_, sc_.output_dir + "/trace.csv");
                }
                throw SolverError(std::string("step ") + std::to_string(k) + ": " + e.what() +
                                  (write ? "; state written to " + sc_.output_dir + "/failure_dump.vtk" : ""));
            }
            if (on_step) on_step(*this);
            if (snapshot_due(k)) take_snapshot();
        }
        if (sc_.steps == 0) take_snapshot();
        if (write) {
            events_.write_csv(sc_.output_dir + "/events.csv");
            write_trace_csv(trace_, sc_.output_dir + "/trace.csv");
        }
        res.events = events_;
        res.trace = trace_;
        res.relax_steps = relax_steps_;
        return res;
    }

    /// Pure-mechanics solution of the intact mesh under the scenario loads.
    VectorXd mechanics_only() const {
        vem::GlobalSystem sys;
        std::vector<Eigen::MatrixXd> mats;
        for (const auto& lv : ops_.vem) mats.push_back(lv.A_K);
        sys.full = vem::assemble_operator(mesh_, mats);
        sys.fixed = fixed_;
        sys.prescribed = prescribed_;
        sys.load = load_;
        vem::reduce(sys);
        return relax::direct_solve(sys);
    }

private:
    VectorXd element_dofs(std::size_t c, const VectorXd& u) const {
        const auto& loop = mesh_.cells[c];
        VectorXd ue(2 * loop.size());
        for (std::size_t i = 0; i < loop.size(); ++i) {
            ue(2 * i) = u(2 * loop[i]);
            ue(2 * i + 1) = u(2 * loop[i] + 1);
        }
        return ue;
    }

    int fractured_count() const {
        return static_cast<int>(std::count(state_.fractured.begin(), state_.fractured.end(), 1));
    }

    // Initial state: load-only equilibrium at the initial pressure.
    void initialize() {
        state_.time = 0.0;
        state_.step = 0;
        state_.u = mechanics_only();
        state_.p = VectorXd::Constant(static_cast<Eigen::Index>(mesh_.num_cells()), sc_.initial_pressure);
        trace_.push_back({0.0, state_.p.maxCoeff(), 0});
    }

    void update_coupled_set() {
        for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
            bool on = false;
            switch (sc_.coupling) {
            case scenario::VolumeCoupling::None: on = false; break;
            case scenario::VolumeCoupling::All: on = true; break;
            case scenario::VolumeCoupling::FracturedAndWell:
                on = state_.fractured[c] || mesh_.region[c] == mesh::Region::Well;
                break;
            }
            fluid_.coupled[c] = on && sc_.biot != 0.0;
        }
    }

    void rebuild_flow() {
        for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
            const bool open = state_.fractured[c] || mesh_.region[c] == mesh::Region::Well;
            rock_.permeability[c] = sc_.permeability * (open ? sc_.fracture_multiplier : 1.0);
        }
        trans_ = flow::transmissibilities(mesh_, topo_, geom_, rock_.permeability);
    }

    void rebuild_intact() {
        std::vector<Eigen::MatrixXd> mats(mesh_.num_cells());
        for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
            mats[c] = state_.fractured[c] ? Eigen::MatrixXd::Zero(ops_.vem[c].A_K.rows(), ops_.vem[c].A_K.cols())
                                          : ops_.vem[c].A_K;
        }
        intact_ = vem::assemble_operator(mesh_, mats);
        intact_.prune(0.0);
    }

    void relax_mechanics() {
        VectorXd div_u = div_ * state_.u;
        fluid_.pressure = state_.p;
        fluid_.hold_content(div_u);
        HybridModel model(mesh_, ops_, state_.fractured, intact_, div_, fluid_, fixed_, load_, state_.u);
        const auto res = relax::relax_to_equilibrium(model, state_.u, sc_.relax);
        relax_steps_ += res.steps;
        state_.u = res.u;
        state_.p = fluid_.pressure_at(div_ * state_.u);
    }

    void equilibrate() {
        relax_mechanics();
        for (;;) {
            const auto hit = fracture_sweep(mesh_, state_.fractured, cell_stresses(), sc_.tensile_strength);
            if (!hit) break;
            state_.fractured[hit->cell] = 1;
            events_.add({state_.time, hit->cell, hit->stress});
            update_coupled_set();
            rebuild_flow();
            rebuild_intact();
            relax_mechanics();
        }
        for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
            if (!state_.fractured[c]) continue;
            const KelvinVector ext = ops_.edge[c]->R * element_dofs(c, state_.u);
            for (int i = 0; i < 3; ++i) state_.broken_edges[c][i] = ext(i) >= 0.0;
        }
    }

    scenario::Scenario sc_;
    mesh::PolyMesh mesh_;
    mesh::Topology topo_;
    mesh::GeometryCache geom_;
    CellOperators ops_;
    SparseMatrix div_;
    SparseMatrix intact_;
    std::vector<char> fixed_;
    VectorXd prescribed_;
    VectorXd load_;

    std::vector<double> volume_;
    flow::RockFluid rock_;
    flow::Transmissibilities trans_;
    VectorXd source_;
    double injection_rate_ = 0.0;
    FluidCoupling fluid_;

    SimState state_;
    EventLog events_;
    std::vector<TraceRow> trace_;
    std::size_t relax_steps_ = 0;
};

} // namespace vemdem::sim
