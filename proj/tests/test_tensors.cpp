#include <gtest/gtest.h>

#include <random>

#include "vemdem/tensors.hpp"

using namespace vemdem;
using namespace vemdem::tensors;

namespace {

Mat2 sym(double a, double b, double c) {
    Mat2 m;
    m << a, b, b, c;
    return m;
}

} // namespace

TEST(Kelvin, ShearWeightOnOffDiagonal) {
    const KelvinVector k = to_kelvin(sym(1, 2, 3));
    EXPECT_DOUBLE_EQ(k(0), 1.0);
    EXPECT_DOUBLE_EQ(k(1), 3.0);
    EXPECT_NEAR(k(2), 2.0 * std::sqrt(2.0), 1e-15);
}

TEST(Kelvin, IdentityHasNoShear) {
    const KelvinVector k = to_kelvin(Mat2::Identity());
    EXPECT_EQ(k, KelvinVector(1, 1, 0));
}

TEST(Kelvin, PureShearNormMatchesDoubleDot) {
    const double s = 0.7;
    const Mat2 e = sym(0, s, 0);
    const KelvinVector k = to_kelvin(e);
    EXPECT_NEAR(k(2), std::sqrt(2.0) * s, 1e-15);
    EXPECT_NEAR(k.squaredNorm(), 2 * s * s, 1e-15);
    EXPECT_NEAR(k.squaredNorm(), double_dot(e, e), 1e-15);
}

TEST(Kelvin, RejectsAsymmetricInput) {
    Mat2 m;
    m << 1, 2, 2.1, 3;
    EXPECT_THROW(to_kelvin(m), ValidationError);
}

TEST(Kelvin, RoundTripAndInnerProductOnRandomTensors) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double round_trip = 0.0;
    double inner = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Mat2 a = sym(U(rng), U(rng), U(rng));
        const Mat2 b = sym(U(rng), U(rng), U(rng));
        round_trip = std::max(round_trip, (from_kelvin(to_kelvin(a)) - a).cwiseAbs().maxCoeff());
        inner = std::max(inner, std::abs(to_kelvin(a).dot(to_kelvin(b)) - double_dot(a, b)));
    }
    EXPECT_LT(round_trip, 1e-14);
    EXPECT_LT(inner, 1e-13);
}

TEST(Stiffness, PlaneStrainQuarterPoisson) {
    const ElasticModuli m = elastic_moduli(1.0, 0.25);
    EXPECT_NEAR(m.lambda, 0.4, 1e-15);
    EXPECT_NEAR(m.mu, 0.4, 1e-15);
    KelvinMatrix expected;
    expected << 1.2, 0.4, 0, 0.4, 1.2, 0, 0, 0, 0.8;
    EXPECT_LT((isotropic_stiffness(1.0, 0.25).matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Stiffness, ZeroPoissonDecouplesAxesInBothModes) {
    for (auto mode : {PlaneMode::PlaneStrain, PlaneMode::PlaneStress}) {
        EXPECT_LT((isotropic_stiffness(1.0, 0.0, mode).matrix() - KelvinMatrix::Identity()).norm(), 1e-15);
    }
}

TEST(Stiffness, RockModuli) {
    const ElasticModuli m = elastic_moduli(1e9, 0.3);
    // lambda = E nu / ((1 + nu)(1 - 2 nu)), mu = E / (2 (1 + nu))
    EXPECT_NEAR(m.lambda, 0.3e9 / (1.3 * 0.4), 1e-3);
    EXPECT_NEAR(m.mu, 1e9 / 2.6, 1e-3);
    EXPECT_NEAR(m.lambda, 5.769e8, 1e5);
    EXPECT_NEAR(m.mu, 3.846e8, 1e5);
}

TEST(Stiffness, PlaneStrainMatchesRestrictedThreeDimensionalHooke) {
    // Plane strain: eps_zz = 0, so the in-plane block of the 3D compliance
    // inverse gives D.
    const double E = 3.0, nu = 0.2;
    Eigen::Matrix3d S;
    S << 1, -nu, -nu, -nu, 1, -nu, -nu, -nu, 1;
    S /= E;
    const Eigen::Matrix3d C = S.inverse();
    const KelvinMatrix D = isotropic_stiffness(E, nu).matrix();
    EXPECT_NEAR(D(0, 0), C(0, 0), 1e-13);
    EXPECT_NEAR(D(0, 1), C(0, 1), 1e-13);
    EXPECT_NEAR(D(2, 2), E / (1 + nu), 1e-13);
}

TEST(Stiffness, PlaneStressMatchesReducedCompliance) {
    const double E = 2.0, nu = 0.3;
    Eigen::Matrix2d S;
    S << 1, -nu, -nu, 1;
    const Eigen::Matrix2d C = (S / E).inverse();
    const KelvinMatrix D = isotropic_stiffness(E, nu, PlaneMode::PlaneStress).matrix();
    EXPECT_NEAR(D(0, 0), C(0, 0), 1e-13);
    EXPECT_NEAR(D(0, 1), C(0, 1), 1e-13);
}

TEST(Stiffness, InvalidPoissonRatiosRejected) {
    EXPECT_THROW(elastic_moduli(1.0, 0.5), ParameterError);
    EXPECT_THROW(elastic_moduli(1.0, -1.0), ParameterError);
    EXPECT_THROW(elastic_moduli(0.0, 0.2), ParameterError);
    EXPECT_NO_THROW(elastic_moduli(1.0, 0.7, PlaneMode::PlaneStress));
    EXPECT_THROW(elastic_moduli(1.0, 1.0, PlaneMode::PlaneStress), ParameterError);
}

TEST(Stiffness, AppliedToStrainGivesLameForm) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const ElasticModuli m = elastic_moduli(7.0, 0.27);
    const StiffnessTensor D = isotropic_stiffness(m);
    EXPECT_TRUE(D.is_symmetric());
    EXPECT_TRUE(D.is_positive_definite());
    for (int i = 0; i < 100; ++i) {
        const Mat2 e = sym(U(rng), U(rng), U(rng));
        const Mat2 sigma = 2 * m.mu * e + m.lambda * e.trace() * Mat2::Identity();
        const KelvinVector got = D.apply(to_kelvin(e));
        EXPECT_LT((got - to_kelvin(sigma)).norm(), 1e-12 * to_kelvin(sigma).norm());
    }
}

TEST(Principal, DiagonalStress) {
    const auto p = principal_stresses(to_kelvin(sym(3e5, 0, 1e5)));
    EXPECT_NEAR(p.max, 3e5, 1e-9);
    EXPECT_NEAR(p.min, 1e5, 1e-9);
    EXPECT_NEAR(std::abs(p.dir_max.x()), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(p.dir_min.y()), 1.0, 1e-15);
}

TEST(Principal, PureShear) {
    const double s = 2.5;
    const auto p = principal_stresses(to_kelvin(sym(0, s, 0)));
    EXPECT_NEAR(p.max, s, 1e-14);
    EXPECT_NEAR(p.min, -s, 1e-14);
    EXPECT_NEAR(std::abs(p.dir_max.dot(Vec2(1, 1).normalized())), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(p.dir_min.dot(Vec2(1, -1).normalized())), 1.0, 1e-14);
}

TEST(Principal, SymmetricTwoByTwo) {
    const auto p = principal_stresses(to_kelvin(sym(2, 1, 2)));
    EXPECT_NEAR(p.max, 3.0, 1e-14);
    EXPECT_NEAR(p.min, 1.0, 1e-14);
    EXPECT_NEAR(std::abs(p.dir_max.dot(Vec2(1, 1).normalized())), 1.0, 1e-14);
    EXPECT_NEAR(max_principal(to_kelvin(sym(2, 1, 2))), 3.0, 1e-14);
}

TEST(Principal, ReconstructionOnRandomTensors) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const Mat2 s = sym(U(rng), U(rng), U(rng));
        const auto p = principal_stresses(to_kelvin(s));
        EXPECT_GE(p.max, p.min);
        EXPECT_NEAR(p.dir_max.dot(p.dir_min), 0.0, 1e-14);
        const Mat2 r = p.max * p.dir_max * p.dir_max.transpose() + p.min * p.dir_min * p.dir_min.transpose();
        EXPECT_LT((r - s).norm(), 1e-12 * s.norm());
    }
}

TEST(Principal, IsotropicStateGivesOrthonormalPair) {
    const auto p = principal_stresses(to_kelvin(sym(4, 0, 4)));
    EXPECT_DOUBLE_EQ(p.max, 4.0);
    EXPECT_DOUBLE_EQ(p.min, 4.0);
    EXPECT_NEAR(p.dir_max.norm(), 1.0, 1e-15);
    EXPECT_NEAR(p.dir_max.dot(p.dir_min), 0.0, 1e-15);
}

TEST(PlaneMode, StringRoundTrip) {
    EXPECT_EQ(plane_mode_from_string(to_string(PlaneMode::PlaneStress)), PlaneMode::PlaneStress);
    EXPECT_EQ(plane_mode_from_string("plane-strain"), PlaneMode::PlaneStrain);
    EXPECT_THROW(plane_mode_from_string("3d"), Error);
}
