#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "vemdem/error.hpp"

// Kelvin-notation tensor algebra for 2D symmetric tensors.
//
// A symmetric 2x2 tensor e is stored as [e11, e22, sqrt(2) e12]. With this
// weighting the Euclidean dot product of two Kelvin vectors equals the tensor
// double contraction, and a fourth-order stiffness becomes a 3x3 matrix D.
//
// Sign convention: stresses are tension-positive throughout the library.

namespace vemdem::tensors {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using KelvinVector = Eigen::Vector3d;
using KelvinMatrix = Eigen::Matrix3d;

inline const double kSqrt2 = std::numbers::sqrt2;

enum class PlaneMode { PlaneStrain, PlaneStress };

inline std::string to_string(PlaneMode mode) {
    return mode == PlaneMode::PlaneStrain ? "plane-strain" : "plane-stress";
}

inline PlaneMode plane_mode_from_string(const std::string& s) {
    if (s == "plane-strain") return PlaneMode::PlaneStrain;
    if (s == "plane-stress") return PlaneMode::PlaneStress;
    throw ParameterError("unknown plane mode '" + s + "'");
}

/// Converts a symmetric 2x2 tensor to Kelvin form. Asymmetry beyond 1e-12
/// (relative to the largest entry) is rejected.
inline KelvinVector to_kelvin(const Mat2& t) {
    const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
    if (std::abs(t(0, 1) - t(1, 0)) > 1e-12 * scale) {
        throw ValidationError("to_kelvin: tensor is not symmetric");
    }
    const double shear = 0.5 * (t(0, 1) + t(1, 0));
    return {t(0, 0), t(1, 1), kSqrt2 * shear};
}

inline Mat2 from_kelvin(const KelvinVector& k) {
    const double shear = k(2) / kSqrt2;
    Mat2 t;
    t << k(0), shear, shear, k(1);
    return t;
}

inline double double_dot(const Mat2& a, const Mat2& b) {
    return (a.transpose() * b).trace();
}

/// Lame constants together with the Young/Poisson pair they were derived
/// from. `lambda` is the 3D constant; `lambda_star` is the one that enters the
/// 2D law for the chosen plane mode.
struct ElasticModuli {
    double E = 0.0;
    double nu = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    PlaneMode mode = PlaneMode::PlaneStrain;

    double lambda_star() const {
        if (mode == PlaneMode::PlaneStrain) return lambda;
        return E * nu / (1.0 - nu * nu);
    }
};

inline ElasticModuli elastic_moduli(double E, double nu, PlaneMode mode = PlaneMode::PlaneStrain) {
    if (!(E > 0.0) || !std::isfinite(E)) {
        throw ParameterError("Young's modulus must be positive and finite");
    }
    // Plane stress only needs the 2D bound; lambda is still quoted as the 3D
    // constant, which diverges at nu = 1/2.
    const double upper = mode == PlaneMode::PlaneStrain ? 0.5 : 1.0;
    if (!(nu > -1.0 && nu < upper)) {
        throw ParameterError("Poisson's ratio " + std::to_string(nu) + " outside (-1, " +
                             std::to_string(upper) + ") for " + to_string(mode));
    }
    ElasticModuli m;
    m.E = E;
    m.nu = nu;
    m.mode = mode;
    m.mu = E / (2.0 * (1.0 + nu));
    m.lambda = nu == 0.5 ? std::numeric_limits<double>::infinity()
                         : E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    return m;
}

/// Cauchy stiffness in Kelvin representation.
class StiffnessTensor {
public:
    StiffnessTensor() = default;
    StiffnessTensor(const KelvinMatrix& D, PlaneMode mode) : D_(D), mode_(mode) {}

    const KelvinMatrix& matrix() const { return D_; }
    PlaneMode mode() const { return mode_; }

    KelvinVector apply(const KelvinVector& strain) const { return D_ * strain; }

    bool is_symmetric(double tol = 1e-12) const {
        return (D_ - D_.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, D_.cwiseAbs().maxCoeff());
    }

    bool is_positive_definite() const {
        Eigen::LLT<KelvinMatrix> llt(0.5 * (D_ + D_.transpose()));
        return llt.info() == Eigen::Success;
    }

private:
    KelvinMatrix D_ = KelvinMatrix::Zero();
    PlaneMode mode_ = PlaneMode::PlaneStrain;
};

inline StiffnessTensor isotropic_stiffness(const ElasticModuli& m) {
    const double ls = m.lambda_star();
    KelvinMatrix D;
    D << ls + 2.0 * m.mu, ls, 0.0,
         ls, ls + 2.0 * m.mu, 0.0,
         0.0, 0.0, 2.0 * m.mu;
    return {D, m.mode};
}

inline StiffnessTensor isotropic_stiffness(double E, double nu, PlaneMode mode = PlaneMode::PlaneStrain) {
    return isotropic_stiffness(elastic_moduli(E, nu, mode));
}

struct PrincipalStresses {
    double max = 0.0;
    double min = 0.0;
    Vec2 dir_max = Vec2::UnitX();
    Vec2 dir_min = Vec2::UnitY();
};

/// Closed-form eigen-decomposition of a symmetric 2x2 tensor given in Kelvin
/// form. `max >= min`; directions are unit and orthogonal.
inline PrincipalStresses principal_stresses(const KelvinVector& sigma) {
    const double sxx = sigma(0);
    const double syy = sigma(1);
    const double sxy = sigma(2) / kSqrt2;
    const double mean = 0.5 * (sxx + syy);
    const double half_diff = 0.5 * (sxx - syy);
    const double radius = std::hypot(half_diff, sxy);

    PrincipalStresses out;
    out.max = mean + radius;
    out.min = mean - radius;
    if (radius == 0.0) return out;

    const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    out.dir_max = Vec2(std::cos(angle), std::sin(angle));
    out.dir_min = Vec2(-std::sin(angle), std::cos(angle));
    return out;
}

inline double max_principal(const KelvinVector& sigma) {
    const double mean = 0.5 * (sigma(0) + sigma(1));
    return mean + std::hypot(0.5 * (sigma(0) - sigma(1)), sigma(2) / kSqrt2);
}

} // namespace vemdem::tensors
