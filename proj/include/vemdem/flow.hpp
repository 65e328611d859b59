#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/mesh.hpp"

// Cell-centred two-point flux finite volumes for slightly compressible
// single-phase flow, with the Biot volume-change coupling. The outer boundary
// is sealed (no flow). Sources are total volumetric rates per cell (m^2/s per
// unit thickness).

namespace vemdem::flow {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct RockFluid {
    std::vector<double> permeability;  // m^2, per cell
    double porosity = 0.3;
    double storativity = 1e-10;  // 1/Pa
    double viscosity = 1e-3;     // Pa s
    double biot = 1.0;
    double fracture_multiplier = 1e6;

    void check(std::size_t cells) const {
        if (permeability.size() != cells) throw ParameterError("one permeability per cell is required");
        for (double k : permeability) {
            if (!(k >= 0.0) || !std::isfinite(k)) throw ParameterError("permeability must be finite and non-negative");
        }
        if (!(porosity > 0.0 && porosity <= 1.0)) throw ParameterError("porosity must lie in (0, 1]");
        if (!(storativity >= 0.0)) throw ParameterError("storativity must be non-negative");
        if (!(viscosity > 0.0)) throw ParameterError("viscosity must be positive");
        if (!(biot >= 0.0 && biot <= 1.0)) throw ParameterError("Biot coefficient must lie in [0, 1]");
        if (!(fracture_multiplier > 0.0)) throw ParameterError("fracture permeability multiplier must be positive");
    }
};

/// Transmissibility of every interior edge, without the viscosity factor.
struct Transmissibilities {
    std::vector<std::array<int, 2>> cells;
    std::vector<double> value;
};

/// Half transmissibilities K_i |f| / d_i, d_i the normal distance from the
/// cell centroid to the edge, combined harmonically.
inline Transmissibilities transmissibilities(const mesh::PolyMesh& m, const mesh::Topology& topo,
                                             const mesh::GeometryCache& g, const std::vector<double>& perm) {
    if (perm.size() != m.num_cells()) throw ParameterError("one permeability per cell is required");
    std::vector<std::array<double, 2>> half(topo.num_edges(), {0.0, 0.0});
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const auto& loop = m.cells[c];
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const int e = topo.cell_edges[c][k];
            const mesh::Vec2 mid = 0.5 * (m.nodes[loop[k]] + m.nodes[loop[(k + 1) % loop.size()]]);
            const double dist = std::abs((mid - g.centroid[c]).dot(g.edge_normal[c][k]));
            if (!(dist > 1e-14 * g.edge_length[c][k])) {
                throw GeometryError("cell " + std::to_string(c) + ": centroid lies on an edge");
            }
            const int side = topo.edge_cells[e][0] == static_cast<int>(c) ? 0 : 1;
            half[e][side] = perm[c] * g.edge_length[c][k] / dist;
        }
    }
    Transmissibilities out;
    for (std::size_t e = 0; e < topo.num_edges(); ++e) {
        if (topo.is_boundary(static_cast<int>(e))) continue;
        const double t1 = half[e][0];
        const double t2 = half[e][1];
        out.cells.push_back(topo.edge_cells[e]);
        out.value.push_back(t1 > 0.0 && t2 > 0.0 ? 1.0 / (1.0 / t1 + 1.0 / t2) : 0.0);
    }
    return out;
}

/// Volumetric flux from the first to the second cell of each interior edge.
inline std::vector<double> face_fluxes(const Transmissibilities& trans, double viscosity, const VectorXd& p) {
    std::vector<double> flux(trans.value.size());
    for (std::size_t f = 0; f < flux.size(); ++f) {
        flux[f] = trans.value[f] / viscosity * (p(trans.cells[f][0]) - p(trans.cells[f][1]));
    }
    return flux;
}

struct PressureStepInput {
    const VectorXd* pressure = nullptr;      // p^n
    double dt = 0.0;
    const VectorXd* source = nullptr;        // Q per cell, may be null
    const VectorXd* div_new = nullptr;       // cell volume change of the latest mechanics state
    const VectorXd* div_old = nullptr;       // ... of the state the previous step was based on
    const std::vector<char>* coupled = nullptr;  // cells whose volume change enters the balance
};

/// Backward-Euler step of
///   S_c V (p^{n+1} - p^n) + dt sum_f (T_f / mu_v)(p_c - p_nb)^{n+1}
///       = dt Q - alpha (div_new - div_old)
/// where the volume-change term is applied to the cells flagged in `coupled`
/// and dropped for the others (explicit pressure update). The matrix is
/// symmetric positive definite whenever S_c V > 0.
inline VectorXd pressure_step(const std::vector<double>& volume, const Transmissibilities& trans,
                              const RockFluid& rock, const PressureStepInput& in) {
    if (!in.pressure) throw ParameterError("pressure_step: missing pressure");
    if (!(in.dt > 0.0)) throw ParameterError("pressure_step: time step must be positive");
    const auto n = static_cast<Eigen::Index>(volume.size());
    const VectorXd& p = *in.pressure;
    if (p.size() != n) throw ParameterError("pressure_step: pressure vector has the wrong size");

    std::vector<Eigen::Triplet<double>> trips;
    VectorXd rhs(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double storage = rock.storativity * volume[c];
        trips.emplace_back(c, c, storage);
        rhs(c) = storage * p(c);
        if (in.source) rhs(c) += in.dt * (*in.source)(c);
        if (in.div_new && in.div_old && in.coupled && (*in.coupled)[c]) {
            rhs(c) -= rock.biot * ((*in.div_new)(c) - (*in.div_old)(c));
        }
    }
    for (std::size_t f = 0; f < trans.value.size(); ++f) {
        const double t = in.dt * trans.value[f] / rock.viscosity;
        if (t == 0.0) continue;
        const int a = trans.cells[f][0];
        const int b = trans.cells[f][1];
        trips.emplace_back(a, a, t);
        trips.emplace_back(b, b, t);
        trips.emplace_back(a, b, -t);
        trips.emplace_back(b, a, -t);
    }
    SparseMatrix A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw SolverError("pressure system factorization failed");
    const double scale = A.diagonal().cwiseAbs().maxCoeff();
    if (!(ldlt.vectorD().minCoeff() > 1e-14 * scale)) {
        throw SolverError("pressure system is singular (sealed cells without storage)");
    }
    VectorXd out = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !out.allFinite()) throw SolverError("pressure solve failed");
    return out;
}

/// Mechanical nodal forces alpha div^T p from cell pressures.
inline VectorXd coupling_forces(const SparseMatrix& divergence, const VectorXd& pressure, double biot) {
    if (pressure.size() != divergence.rows()) throw ParameterError("coupling_forces: pressure size mismatch");
    return biot * (divergence.transpose() * pressure);
}

} // namespace vemdem::flow
