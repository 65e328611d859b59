#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/tensors.hpp"

// Per-triangle MDEM operators.
//
// Edges of a triangle (p0, p1, p2) are ordered (p0->p1), (p0->p2), (p1->p2).
// An edge extension U_m > 0 means the edge lengthens. Under a uniform strain
// eps the extension of edge m is d_m (I^m . eps I^m), which is row m of M in
// Kelvin form.

namespace vemdem::mdem {

using tensors::KelvinMatrix;
using tensors::KelvinVector;
using Vec2 = Eigen::Vector2d;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

inline constexpr std::array<std::array<int, 2>, 3> kEdges{{{0, 1}, {0, 2}, {1, 2}}};

struct EdgeStrainOperator {
    KelvinMatrix M = KelvinMatrix::Zero();  // Kelvin strain -> edge extensions
    Mat36 R = Mat36::Zero();                // nodal DOFs -> edge extensions
    std::array<Vec2, 3> direction{};        // unit vectors I^m
    std::array<double, 3> length{};         // d_m
    double area = 0.0;
};

inline EdgeStrainOperator edge_strain_operator(std::span<const Vec2> nodes) {
    if (nodes.size() != 3) throw GeometryError("MDEM operators need exactly 3 nodes");
    EdgeStrainOperator op;
    const Vec2 e1 = nodes[1] - nodes[0];
    const Vec2 e2 = nodes[2] - nodes[0];
    op.area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    const double scale = std::max({e1.squaredNorm(), e2.squaredNorm(), (nodes[2] - nodes[1]).squaredNorm()});
    if (!(std::abs(op.area) > 1e-14 * scale)) throw GeometryError("collinear or coincident triangle nodes");
    if (op.area < 0.0) throw GeometryError("triangle nodes must be counter-clockwise");

    for (int m = 0; m < 3; ++m) {
        const auto [a, b] = kEdges[m];
        const Vec2 dx = nodes[b] - nodes[a];
        const double d = dx.norm();
        const Vec2 I = dx / d;
        op.direction[m] = I;
        op.length[m] = d;
        op.M.row(m) << d * I.x() * I.x(), d * I.y() * I.y(), d * tensors::kSqrt2 * I.x() * I.y();
        op.R(m, 2 * a) = -I.x();
        op.R(m, 2 * a + 1) = -I.y();
        op.R(m, 2 * b) = I.x();
        op.R(m, 2 * b + 1) = I.y();
    }
    return op;
}

/// MDEM stiffness state of one triangle.
struct MdemStiffness {
    KelvinMatrix K = KelvinMatrix::Zero();
    bool fractured = false;
    std::array<bool, 3> broken_edges{false, false, false};
};

/// K = |K| M^{-T} D M^{-1}, so that U^T K U / 2 equals |K| eps^T D eps / 2.
inline KelvinMatrix stiffness_from_cauchy(const EdgeStrainOperator& op, const KelvinMatrix& D) {
    Eigen::FullPivLU<KelvinMatrix> lu(op.M);
    if (!lu.isInvertible()) throw GeometryError("edge strain operator is singular");
    const KelvinMatrix Minv = lu.inverse();
    KelvinMatrix K = op.area * Minv.transpose() * D * Minv;
    return 0.5 * (K + K.transpose());
}

inline MdemStiffness mdem_stiffness(const EdgeStrainOperator& op, const tensors::StiffnessTensor& D) {
    if (!D.is_positive_definite()) throw ParameterError("stiffness tensor is not positive definite");
    MdemStiffness s;
    s.K = stiffness_from_cauchy(op, D.matrix());
    return s;
}

/// Inverse transform: D = M^T K M / |K|.
inline KelvinMatrix cauchy_from_mdem(const EdgeStrainOperator& op, const KelvinMatrix& K) {
    const KelvinMatrix D = op.M.transpose() * K * op.M / op.area;
    return 0.5 * (D + D.transpose());
}

/// Cauchy stiffness obtained by keeping only the diagonal (central-force) part
/// of the MDEM stiffness of D on this triangle.
inline KelvinMatrix central_force_cauchy(const EdgeStrainOperator& op, const KelvinMatrix& D) {
    const KelvinMatrix K = stiffness_from_cauchy(op, D);
    return cauchy_from_mdem(op, KelvinMatrix(K.diagonal().asDiagonal()));
}

inline KelvinMatrix gap_tensor(const EdgeStrainOperator& op, const KelvinMatrix& D) {
    return D - central_force_cauchy(op, D);
}

// ---------------------------------------------------------------------------
// Gap-tensor sweep over apex perturbations of the equilateral triangle
// ---------------------------------------------------------------------------

/// Reference triangle: base (-1/2, 0), (1/2, 0), apex (0, sqrt(3)/2).
inline std::array<Vec2, 3> reference_equilateral() {
    return {Vec2(-0.5, 0.0), Vec2(0.5, 0.0), Vec2(0.0, std::sqrt(3.0) / 2.0)};
}

struct GapSample {
    double dx = 0.0;
    double dy = 0.0;
    std::optional<KelvinMatrix> T;  // empty when the perturbed triangle is degenerate
};

struct GapGrid {
    int n = 0;              // samples per axis
    double extent = 0.0;    // apex offsets span [-extent, extent]
    std::vector<GapSample> samples;  // row-major in dy, then dx

    const GapSample& at(int ix, int iy) const { return samples[static_cast<std::size_t>(iy * n + ix)]; }
};

inline GapGrid gap_tensor_map(const KelvinMatrix& D, int n, double extent) {
    if (n < 1) throw ParameterError("gap map needs at least one sample per axis");
    if (!(extent >= 0.0)) throw ParameterError("gap map extent must be non-negative");
    GapGrid grid;
    grid.n = n;
    grid.extent = extent;
    const auto ref = reference_equilateral();
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            GapSample s;
            // Symmetric integer stencil so that mirrored samples are exact negatives.
            const int half = n - 1;
            s.dx = half == 0 ? 0.0 : extent * static_cast<double>(2 * ix - half) / half;
            s.dy = half == 0 ? 0.0 : extent * static_cast<double>(2 * iy - half) / half;
            std::array<Vec2, 3> tri = ref;
            tri[2] += Vec2(s.dx, s.dy);
            try {
                s.T = gap_tensor(edge_strain_operator(tri), D);
            } catch (const GeometryError&) {
                s.T.reset();
            }
            grid.samples.push_back(s);
        }
    }
    return grid;
}

/// CSV with columns dx, dy, T11, T22, T33, T23, T13, T12 (Kelvin indices).
/// Degenerate samples are written with empty component fields.
inline void write_gap_csv(const GapGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "dx,dy,T11,T22,T33,T23,T13,T12\n";
    out.precision(17);
    for (const auto& s : grid.samples) {
        out << s.dx << ',' << s.dy;
        if (s.T) {
            const auto& T = *s.T;
            out << ',' << T(0, 0) << ',' << T(1, 1) << ',' << T(2, 2) << ',' << T(1, 2) << ',' << T(0, 2) << ','
                << T(0, 1);
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
    if (!out) throw IoError(path, "write failed");
}

// ---------------------------------------------------------------------------
// Forces
// ---------------------------------------------------------------------------

struct MdemForces {
    KelvinVector edge = KelvinVector::Zero();  // F on the three edges
    Vec6 nodal = Vec6::Zero();                 // R^T F
};

/// Intact-cell forces F = K R u. The nodal vector is the internal force,
/// identical to A_K u of the VEM/P1 element.
inline MdemForces mdem_forces(const EdgeStrainOperator& op, const MdemStiffness& s, const Vec6& u) {
    MdemForces f;
    f.edge = s.K * (op.R * u);
    f.nodal = op.R.transpose() * f.edge;
    return f;
}

/// Central-force law after failure: only shortening edges (dU_i < 0) carry
/// force, with the diagonal stiffness K_ii.
inline KelvinVector post_fracture_forces(const KelvinMatrix& K, const KelvinVector& extension) {
    KelvinVector F = KelvinVector::Zero();
    for (int i = 0; i < 3; ++i) {
        if (extension(i) < 0.0) F(i) = K(i, i) * extension(i);
    }
    return F;
}

inline MdemForces fractured_forces(const EdgeStrainOperator& op, const MdemStiffness& s, const Vec6& u) {
    MdemForces f;
    f.edge = post_fracture_forces(s.K, op.R * u);
    f.nodal = op.R.transpose() * f.edge;
    return f;
}

/// Cell stress from edge forces, sigma = M^T F / |K|. For an intact cell this
/// equals D eps.
inline KelvinVector stress_from_edge_forces(const EdgeStrainOperator& op, const KelvinVector& F) {
    return op.M.transpose() * F / op.area;
}

/// Tensile criterion: the maximum principal (tension-positive) stress exceeds
/// the strength.
inline bool check_failure(const KelvinVector& sigma, double tensile_strength) {
    if (tensile_strength < 0.0) throw ParameterError("tensile strength must be non-negative");
    return tensors::max_principal(sigma) > tensile_strength;
}

} // namespace vemdem::mdem
