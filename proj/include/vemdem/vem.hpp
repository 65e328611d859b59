#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/mesh.hpp"
#include "vemdem/tensors.hpp"

// First-order virtual elements for 2D linear elasticity.
//
// Node i of an N-gon owns DOFs (2i, 2i+1). The projector onto linear
// displacements splits into a rigid part (translations + infinitesimal
// rotation about the vertex average) and a constant-strain part. Both use the
// boundary weights q_i = (1/|K|) sum_{f ni i} |f| n_f / 2, which integrate the
// gradient of any linear field exactly.

namespace vemdem::vem {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using mesh::Vec2;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct LocalProjections {
    double area = 0.0;
    Vec2 center = Vec2::Zero();  // vertex average
    MatrixXd q;                  // 2 x N boundary weights
    MatrixXd W_C;                // 3 x 2N, nodal values -> Kelvin strain
    MatrixXd W_R;                // 3 x 2N, nodal values -> (tx, ty, rotation)
    MatrixXd N_C;                // 2N x 3, Kelvin strain -> nodal values
    MatrixXd N_R;                // 2N x 3
    MatrixXd P_R;                // 2N x 2N
    MatrixXd P_C;                // 2N x 2N

    MatrixXd P() const { return P_R + P_C; }
};

inline LocalProjections local_projections(std::span<const Vec2> corners) {
    const auto n = static_cast<Eigen::Index>(corners.size());
    if (n < 3) throw AssemblyError("polygon needs at least 3 corners");

    LocalProjections lp;
    double twice_area = 0.0;
    double perimeter = 0.0;
    Vec2 center = Vec2::Zero();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Vec2& p = corners[k];
        const Vec2& r = corners[(k + 1) % n];
        twice_area += p.x() * r.y() - r.x() * p.y();
        perimeter += (r - p).norm();
        center += p;
    }
    center /= static_cast<double>(n);
    lp.area = 0.5 * twice_area;
    if (!(lp.area > 1e-14 * perimeter * perimeter)) {
        throw AssemblyError("degenerate or clockwise polygon (area " + std::to_string(lp.area) + ")");
    }
    lp.center = center;

    // q_i = (|f_{i-1}| n_{i-1} + |f_i| n_i) / (2|K|). |f| n is the edge vector
    // rotated clockwise, so the two terms combine into the chord x_{i+1} - x_{i-1}.
    lp.q.resize(2, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec2 chord = corners[(i + 1) % n] - corners[(i + n - 1) % n];
        lp.q.col(i) = Vec2(chord.y(), -chord.x()) / twice_area;
    }

    const double s = 1.0 / tensors::kSqrt2;
    lp.W_C = MatrixXd::Zero(3, 2 * n);
    lp.W_R = MatrixXd::Zero(3, 2 * n);
    lp.N_C = MatrixXd::Zero(2 * n, 3);
    lp.N_R = MatrixXd::Zero(2 * n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double qx = lp.q(0, i);
        const double qy = lp.q(1, i);
        lp.W_C(0, 2 * i) = qx;
        lp.W_C(1, 2 * i + 1) = qy;
        lp.W_C(2, 2 * i) = s * qy;
        lp.W_C(2, 2 * i + 1) = s * qx;

        lp.W_R(0, 2 * i) = 1.0 / static_cast<double>(n);
        lp.W_R(1, 2 * i + 1) = 1.0 / static_cast<double>(n);
        lp.W_R(2, 2 * i) = -0.5 * qy;
        lp.W_R(2, 2 * i + 1) = 0.5 * qx;

        const Vec2 r = corners[i] - center;
        lp.N_C(2 * i, 0) = r.x();
        lp.N_C(2 * i, 2) = s * r.y();
        lp.N_C(2 * i + 1, 1) = r.y();
        lp.N_C(2 * i + 1, 2) = s * r.x();

        lp.N_R(2 * i, 0) = 1.0;
        lp.N_R(2 * i + 1, 1) = 1.0;
        lp.N_R(2 * i, 2) = -r.y();
        lp.N_R(2 * i + 1, 2) = r.x();
    }
    lp.P_R = lp.N_R * lp.W_R;
    lp.P_C = lp.N_C * lp.W_C;
    return lp;
}

/// Local VEM operators: A_K = |K| W_C^T D W_C + (I - P)^T S_K (I - P) with
/// S_K = alpha I, alpha = trace(|K| W_C^T D W_C) / 2N.
struct LocalVem {
    double area = 0.0;
    MatrixXd W_C;
    MatrixXd P;
    MatrixXd consistency;
    MatrixXd stabilization;
    MatrixXd A_K;
};

inline LocalVem local_stiffness(std::span<const Vec2> corners, const tensors::StiffnessTensor& D) {
    if (!D.is_positive_definite()) throw AssemblyError("stiffness tensor is not positive definite");
    const LocalProjections lp = local_projections(corners);
    const auto dofs = lp.W_C.cols();

    LocalVem lv;
    lv.area = lp.area;
    lv.W_C = lp.W_C;
    lv.P = lp.P();
    lv.consistency = lp.area * lp.W_C.transpose() * D.matrix() * lp.W_C;
    const double alpha = lv.consistency.trace() / static_cast<double>(dofs);
    const MatrixXd I_minus_P = MatrixXd::Identity(dofs, dofs) - lv.P;
    lv.stabilization = alpha * I_minus_P.transpose() * I_minus_P;
    lv.A_K = lv.consistency + lv.stabilization;
    return lv;
}

inline std::vector<Vec2> cell_corners(const mesh::PolyMesh& m, std::size_t cell) {
    std::vector<Vec2> out;
    out.reserve(m.cells[cell].size());
    for (int v : m.cells[cell]) out.push_back(m.nodes[v]);
    return out;
}

// ---------------------------------------------------------------------------
// Boundary conditions and global assembly
// ---------------------------------------------------------------------------

enum class Side { Left, Right, Bottom, Top };

struct SideBc {
    enum class Type { Rolling, Fixed, Traction };
    Type type = Type::Rolling;
    Vec2 traction = Vec2::Zero();
    // Prescribed displacement for Fixed sides; empty means zero.
    std::function<Vec2(const Vec2&)> displacement;

    static SideBc rolling() { return {}; }
    static SideBc fixed(std::function<Vec2(const Vec2&)> g = {}) {
        SideBc b;
        b.type = Type::Fixed;
        b.displacement = std::move(g);
        return b;
    }
    static SideBc traction_load(const Vec2& t) {
        SideBc b;
        b.type = Type::Traction;
        b.traction = t;
        return b;
    }
};

/// Conditions on the four sides of the mesh's axis-aligned bounding box.
struct BcSpec {
    SideBc left = SideBc::rolling();
    SideBc right = SideBc::rolling();
    SideBc bottom = SideBc::rolling();
    SideBc top = SideBc::rolling();

    const SideBc& operator[](Side s) const {
        switch (s) {
        case Side::Left: return left;
        case Side::Right: return right;
        case Side::Bottom: return bottom;
        case Side::Top: return top;
        }
        return left;
    }

    static BcSpec all_fixed(std::function<Vec2(const Vec2&)> g = {}) {
        BcSpec b;
        b.left = b.right = b.bottom = b.top = SideBc::fixed(std::move(g));
        return b;
    }
};

/// Full-space operator and load plus the reduction onto free DOFs.
struct GlobalSystem {
    SparseMatrix full;
    VectorXd load;
    std::vector<char> fixed;
    VectorXd prescribed;
    std::vector<int> free_dofs;
    std::vector<int> full_to_free;
    SparseMatrix reduced;
    VectorXd reduced_rhs;

    Eigen::Index dof_count() const { return full.rows(); }

    /// Full displacement vector from values on the free DOFs.
    VectorXd expand(const VectorXd& free_values) const {
        VectorXd u = prescribed;
        for (std::size_t k = 0; k < free_dofs.size(); ++k) u(free_dofs[k]) = free_values(static_cast<Eigen::Index>(k));
        return u;
    }
};

/// Constraint masks and consistent nodal loads derived from a BcSpec.
struct BoundaryData {
    std::vector<char> fixed;
    VectorXd prescribed;
    VectorXd load;
};

inline BoundaryData apply_boundary(const mesh::PolyMesh& m, const mesh::Topology& topo, const BcSpec& bc) {
    const auto [lo, hi] = mesh::bounding_box(m);
    const double tol = 1e-10 * std::max(1.0, (hi - lo).norm());
    const auto ndof = static_cast<Eigen::Index>(2 * m.num_nodes());

    BoundaryData out;
    out.fixed.assign(ndof, 0);
    out.prescribed = VectorXd::Zero(ndof);
    out.load = VectorXd::Zero(ndof);
    // 0 = unset, 1 = rolling-constrained, 2 = fixed with prescribed value.
    std::vector<int> strength(ndof, 0);

    auto side_of = [&](const Vec2& a, const Vec2& b) -> std::optional<Side> {
        if (std::abs(a.x() - lo.x()) < tol && std::abs(b.x() - lo.x()) < tol) return Side::Left;
        if (std::abs(a.x() - hi.x()) < tol && std::abs(b.x() - hi.x()) < tol) return Side::Right;
        if (std::abs(a.y() - lo.y()) < tol && std::abs(b.y() - lo.y()) < tol) return Side::Bottom;
        if (std::abs(a.y() - hi.y()) < tol && std::abs(b.y() - hi.y()) < tol) return Side::Top;
        return std::nullopt;
    };

    auto constrain = [&](int node, int comp, double value, int level) {
        const auto d = static_cast<Eigen::Index>(2 * node + comp);
        if (level < strength[d]) return;
        strength[d] = level;
        out.fixed[d] = 1;
        out.prescribed(d) = value;
    };

    for (std::size_t e = 0; e < topo.num_edges(); ++e) {
        if (!topo.is_boundary(static_cast<int>(e))) continue;
        const int a = topo.edge_nodes[e][0];
        const int b = topo.edge_nodes[e][1];
        const auto side = side_of(m.nodes[a], m.nodes[b]);
        if (!side) {
            throw ConfigError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") is not covered by any side condition");
        }
        const SideBc& cond = bc[*side];
        switch (cond.type) {
        case SideBc::Type::Rolling: {
            const int comp = (*side == Side::Left || *side == Side::Right) ? 0 : 1;
            constrain(a, comp, 0.0, 1);
            constrain(b, comp, 0.0, 1);
            break;
        }
        case SideBc::Type::Fixed:
            for (int node : {a, b}) {
                const Vec2 g = cond.displacement ? cond.displacement(m.nodes[node]) : Vec2::Zero();
                constrain(node, 0, g.x(), 2);
                constrain(node, 1, g.y(), 2);
            }
            break;
        case SideBc::Type::Traction: {
            const double len = (m.nodes[b] - m.nodes[a]).norm();
            for (int node : {a, b}) {
                out.load(2 * node) += 0.5 * len * cond.traction.x();
                out.load(2 * node + 1) += 0.5 * len * cond.traction.y();
            }
            break;
        }
        }
    }
    return out;
}

/// Local VEM operators for every cell; independent per cell, optionally split
/// across threads. Results do not depend on the thread count.
inline std::vector<LocalVem> local_operators(const mesh::PolyMesh& m, const std::vector<tensors::StiffnessTensor>& D,
                                             unsigned threads = 1) {
    if (D.size() != m.num_cells()) throw AssemblyError("one stiffness tensor per cell is required");
    std::vector<LocalVem> locals(m.num_cells());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const auto corners = cell_corners(m, c);
            try {
                locals[c] = local_stiffness(corners, D[c]);
            } catch (const AssemblyError& e) {
                throw AssemblyError("cell " + std::to_string(c) + ": " + e.what());
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m.num_cells())));
    if (threads == 1) {
        work(0, m.num_cells());
        return locals;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (m.num_cells() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(m.num_cells(), begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return locals;
}

inline SparseMatrix assemble_operator(const mesh::PolyMesh& m, const std::vector<MatrixXd>& local_matrices) {
    std::vector<Triplet> trips;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const auto& loop = m.cells[c];
        const auto& A = local_matrices[c];
        for (std::size_t i = 0; i < loop.size(); ++i) {
            for (std::size_t j = 0; j < loop.size(); ++j) {
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        const double v = A(2 * i + a, 2 * j + b);
                        if (v != 0.0) trips.emplace_back(2 * loop[i] + a, 2 * loop[j] + b, v);
                    }
                }
            }
        }
    }
    const auto ndof = static_cast<Eigen::Index>(2 * m.num_nodes());
    SparseMatrix A(ndof, ndof);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

/// Eliminates constrained DOFs: reduced = A_ff, rhs = f_f - A_fc u_c.
inline void reduce(GlobalSystem& sys) {
    const auto ndof = sys.full.rows();
    sys.free_dofs.clear();
    sys.full_to_free.assign(ndof, -1);
    for (Eigen::Index d = 0; d < ndof; ++d) {
        if (!sys.fixed[d]) {
            sys.full_to_free[d] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(static_cast<int>(d));
        }
    }
    const auto nfree = static_cast<Eigen::Index>(sys.free_dofs.size());
    VectorXd rhs(nfree);
    for (Eigen::Index k = 0; k < nfree; ++k) rhs(k) = sys.load(sys.free_dofs[k]);

    std::vector<Triplet> trips;
    for (Eigen::Index col = 0; col < sys.full.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(sys.full, col); it; ++it) {
            const int r = sys.full_to_free[it.row()];
            if (r < 0) continue;
            const int c = sys.full_to_free[it.col()];
            if (c >= 0) {
                trips.emplace_back(r, c, it.value());
            } else {
                rhs(r) -= it.value() * sys.prescribed(it.col());
            }
        }
    }
    sys.reduced.resize(nfree, nfree);
    sys.reduced.setFromTriplets(trips.begin(), trips.end());
    sys.reduced_rhs = rhs;
}

inline GlobalSystem assemble(const mesh::PolyMesh& m, const mesh::Topology& topo,
                             const std::vector<LocalVem>& locals, const BcSpec& bc,
                             const VectorXd* nodal_loads = nullptr) {
    std::vector<MatrixXd> mats;
    mats.reserve(locals.size());
    for (const auto& lv : locals) mats.push_back(lv.A_K);

    GlobalSystem sys;
    sys.full = assemble_operator(m, mats);
    BoundaryData bd = apply_boundary(m, topo, bc);
    sys.fixed = std::move(bd.fixed);
    sys.prescribed = std::move(bd.prescribed);
    sys.load = std::move(bd.load);
    if (nodal_loads) {
        if (nodal_loads->size() != sys.load.size()) throw AssemblyError("nodal load vector has the wrong size");
        sys.load += *nodal_loads;
    }
    reduce(sys);
    return sys;
}

inline GlobalSystem assemble(const mesh::PolyMesh& m, const std::vector<tensors::StiffnessTensor>& D,
                             const BcSpec& bc, const VectorXd* nodal_loads = nullptr, unsigned threads = 1) {
    return assemble(m, mesh::build_topology(m), local_operators(m, D, threads), bc, nodal_loads);
}

/// Cell-wise volume change of a nodal displacement field: row K applied to u
/// equals the boundary integral of u . n with trapezoidal edge averages, which
/// is exact for linear fields.
inline SparseMatrix discrete_divergence(const mesh::PolyMesh& m, const mesh::GeometryCache& g) {
    std::vector<Triplet> trips;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const auto& loop = m.cells[c];
        const std::size_t n = loop.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Vec2 w = 0.5 * g.edge_length[c][k] * g.edge_normal[c][k];
            for (int node : {loop[k], loop[(k + 1) % n]}) {
                trips.emplace_back(static_cast<int>(c), 2 * node, w.x());
                trips.emplace_back(static_cast<int>(c), 2 * node + 1, w.y());
            }
        }
    }
    SparseMatrix div(static_cast<Eigen::Index>(m.num_cells()), static_cast<Eigen::Index>(2 * m.num_nodes()));
    div.setFromTriplets(trips.begin(), trips.end());
    return div;
}

/// Constant Kelvin strain of each cell from nodal displacements.
inline std::vector<tensors::KelvinVector> cell_strains(const mesh::PolyMesh& m, const std::vector<LocalVem>& locals,
                                                       const VectorXd& u) {
    std::vector<tensors::KelvinVector> out(m.num_cells());
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const auto& loop = m.cells[c];
        VectorXd ue(2 * loop.size());
        for (std::size_t i = 0; i < loop.size(); ++i) {
            ue(2 * i) = u(2 * loop[i]);
            ue(2 * i + 1) = u(2 * loop[i] + 1);
        }
        out[c] = locals[c].W_C * ue;
    }
    return out;
}

} // namespace vemdem::vem
