#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "vemdem/error.hpp"

// Contact-lattice DEM with microrotations, used to derive and check the
// micro-macro identities of the discrete model. Lattices are small stars of
// particles with prescribed (linear) states; nothing here is time-integrated.
//
// Contact m joins p1 -> p2 with I = (X2 - X1)/d. A positive normal extension
// gives a force along +I, i.e. the force that contact m exerts on p1.

namespace vemdem::dem {

template <int Dim>
struct Space;

template <>
struct Space<2> {
    using Vec = Eigen::Vector2d;
    using Mat = Eigen::Matrix2d;
    using Rotation = double;  // microrotation about the out-of-plane axis
    using Torque = double;

    static Vec rotate(Rotation t, const Vec& x) { return {-t * x.y(), t * x.x()}; }
    static Torque moment(const Vec& lever, const Vec& force) { return lever.x() * force.y() - lever.y() * force.x(); }
    static Rotation zero_rotation() { return 0.0; }
    static Mat skew(Rotation t) {
        Mat m;
        m << 0.0, -t, t, 0.0;
        return m;
    }
};

template <>
struct Space<3> {
    using Vec = Eigen::Vector3d;
    using Mat = Eigen::Matrix3d;
    using Rotation = Eigen::Vector3d;
    using Torque = Eigen::Vector3d;

    static Vec rotate(const Rotation& t, const Vec& x) { return t.cross(x); }
    static Torque moment(const Vec& lever, const Vec& force) { return lever.cross(force); }
    static Rotation zero_rotation() { return Rotation::Zero(); }
    static Mat skew(const Rotation& t) {
        Mat m;
        m << 0.0, -t.z(), t.y(), t.z(), 0.0, -t.x(), -t.y(), t.x(), 0.0;
        return m;
    }
};

struct Contact {
    int p1 = 0;
    int p2 = 0;
};

template <int Dim>
struct ContactLattice {
    using S = Space<Dim>;
    std::vector<typename S::Vec> positions;
    std::vector<Contact> contacts;
    double kn = 0.0;
    double ks = 0.0;
    double volume = 1.0;

    typename S::Vec offset(std::size_t m) const { return positions[contacts[m].p2] - positions[contacts[m].p1]; }
    double length(std::size_t m) const { return offset(m).norm(); }
    typename S::Vec direction(std::size_t m) const { return offset(m) / length(m); }
};

template <int Dim>
struct ParticleState {
    using S = Space<Dim>;
    std::vector<typename S::Vec> U;
    std::vector<typename S::Rotation> theta;
};

template <int Dim>
struct ContactForce {
    typename Space<Dim>::Vec normal;
    typename Space<Dim>::Vec shear;
    typename Space<Dim>::Vec total() const { return normal + shear; }
};

template <int Dim>
void check_lattice(const ContactLattice<Dim>& lat) {
    if (lat.kn < 0.0 || lat.ks < 0.0) throw ParameterError("contact stiffnesses must be non-negative");
    if (!(lat.volume > 0.0)) throw ParameterError("effective volume must be positive");
}

/// F_n = k_n (dU . I) I and F_s = k_s (dU - dU_n - theta_m x dX), with theta_m the
/// mean microrotation of the two particles.
template <int Dim>
ContactForce<Dim> contact_forces(const ContactLattice<Dim>& lat, const ParticleState<Dim>& st, std::size_t m) {
    using S = Space<Dim>;
    const Contact& c = lat.contacts[m];
    const typename S::Vec dX = lat.offset(m);
    const typename S::Vec I = dX / dX.norm();
    const typename S::Vec dU = st.U[c.p2] - st.U[c.p1];
    const typename S::Rotation theta_m = 0.5 * (st.theta[c.p1] + st.theta[c.p2]);

    const typename S::Vec dUn = dU.dot(I) * I;
    const typename S::Vec dUs = dU - dUn - S::rotate(theta_m, dX);
    return {lat.kn * dUn, lat.ks * dUs};
}

/// sigma = (1/V) sum_m d_m F^m (x) I^m. Not symmetric when microrotations lag
/// the rigid rotation.
template <int Dim>
typename Space<Dim>::Mat cauchy_stress(const ContactLattice<Dim>& lat, const ParticleState<Dim>& st) {
    check_lattice(lat);
    typename Space<Dim>::Mat sigma = Space<Dim>::Mat::Zero();
    for (std::size_t m = 0; m < lat.contacts.size(); ++m) {
        const auto F = contact_forces(lat, st, m).total();
        sigma += lat.length(m) * F * lat.direction(m).transpose();
    }
    return sigma / lat.volume;
}

/// Net moment on one particle: sum over its contacts of lever dX x force, with
/// lever and force both taken from that particle's side of the contact.
template <int Dim>
typename Space<Dim>::Torque net_torque(const ContactLattice<Dim>& lat, const ParticleState<Dim>& st, int particle = 0) {
    using S = Space<Dim>;
    typename S::Torque total{};
    if constexpr (Dim == 3) total = S::Torque::Zero();
    for (std::size_t m = 0; m < lat.contacts.size(); ++m) {
        const Contact& c = lat.contacts[m];
        if (c.p1 != particle && c.p2 != particle) continue;
        // (-dX) x (-F) == dX x F, so both ends give the same moment.
        total += S::moment(lat.offset(m), contact_forces(lat, st, m).total());
    }
    return total;
}

/// Particle state of a uniform linear map: U^p = (e + r) X^p, theta^p = theta.
template <int Dim>
ParticleState<Dim> linear_state(const ContactLattice<Dim>& lat, const typename Space<Dim>::Mat& strain,
                                const typename Space<Dim>::Rotation& rigid_rotation,
                                const typename Space<Dim>::Rotation& theta) {
    using S = Space<Dim>;
    const typename S::Mat ell = strain + S::skew(rigid_rotation);
    ParticleState<Dim> st;
    for (const auto& X : lat.positions) {
        st.U.push_back(ell * X);
        st.theta.push_back(theta);
    }
    return st;
}

// ---------------------------------------------------------------------------
// Reference packings
// ---------------------------------------------------------------------------

/// Centre particle with its six axis neighbours at distance d; V = 1.
inline ContactLattice<3> square_lattice_3d(double d, double kn, double ks) {
    ContactLattice<3> lat;
    lat.kn = kn;
    lat.ks = ks;
    lat.volume = 1.0;
    lat.positions.push_back(Eigen::Vector3d::Zero());
    for (int axis = 0; axis < 3; ++axis) {
        for (double sgn : {1.0, -1.0}) {
            Eigen::Vector3d p = Eigen::Vector3d::Zero();
            p(axis) = sgn * d;
            lat.contacts.push_back({0, static_cast<int>(lat.positions.size())});
            lat.positions.push_back(p);
        }
    }
    return lat;
}

/// Centre particle with six neighbours at 60 degree spacing (the star of a
/// regular triangular packing). With V = 6 d^2 / 8 the isotropic constants
/// come out as exactly lambda = k_n - k_s, mu = k_n + k_s.
inline ContactLattice<2> hexagonal_lattice_2d(double d, double kn, double ks, double volume = -1.0) {
    ContactLattice<2> lat;
    lat.kn = kn;
    lat.ks = ks;
    lat.volume = volume > 0.0 ? volume : 6.0 * d * d / 8.0;
    lat.positions.push_back(Eigen::Vector2d::Zero());
    for (int k = 0; k < 6; ++k) {
        const double a = k * std::numbers::pi / 3.0;
        lat.contacts.push_back({0, static_cast<int>(lat.positions.size())});
        lat.positions.emplace_back(d * std::cos(a), d * std::sin(a));
    }
    return lat;
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

enum class Packing { Square3d, RegularSimplex };

inline Packing packing_from_string(const std::string& s) {
    if (s == "square-3d") return Packing::Square3d;
    if (s == "regular-simplex") return Packing::RegularSimplex;
    throw ParameterError("unknown packing '" + s + "'");
}

struct LameConstants {
    double lambda = 0.0;
    double mu = 0.0;
};

inline LameConstants effective_lame(Packing packing, double kn, double ks) {
    if (kn < 0.0 || ks < 0.0) throw ParameterError("contact stiffnesses must be non-negative");
    switch (packing) {
    case Packing::Square3d: return {2.0 * (kn - ks), ks};
    case Packing::RegularSimplex: return {kn - ks, kn + ks};
    }
    throw ParameterError("unknown packing");
}

enum class PoissonMode { ThreeD, PlaneStrain, PlaneStress };

inline PoissonMode poisson_mode_from_string(const std::string& s) {
    if (s == "3d") return PoissonMode::ThreeD;
    if (s == "plane-strain") return PoissonMode::PlaneStrain;
    if (s == "plane-stress") return PoissonMode::PlaneStress;
    throw ParameterError("unknown Poisson mode '" + s + "'");
}

/// Poisson's ratio reachable by a regular-simplex packing.
inline double poisson_limit(double kn, double ks, PoissonMode mode) {
    if (!(kn > 0.0)) throw ParameterError("normal stiffness must be positive");
    if (ks < 0.0) throw ParameterError("shear stiffness must be non-negative");
    const double ratio = ks / kn;
    double nu = 0.0;
    if (mode == PoissonMode::PlaneStress) {
        nu = (kn - ks) / (3.0 * kn + ks);
        if (!(nu > -1.0 && nu <= 1.0 / 3.0)) throw ParameterError("plane-stress Poisson ratio out of (-1, 1/3]");
    } else {
        nu = 0.25 * (1.0 - ratio);
        if (!(nu <= 0.25)) throw ParameterError("Poisson ratio above 1/4");
    }
    return nu;
}

/// Micropolar energy density mu e:e + lambda/2 tr(e)^2 + kappa/2 (tau - phi):(tau - phi),
/// with tau - phi given as the skew matrix of (r - theta).
template <int Dim>
double micropolar_energy_density(const typename Space<Dim>::Mat& strain,
                                 const typename Space<Dim>::Rotation& rotation_gap, double lambda, double mu,
                                 double kappa) {
    const typename Space<Dim>::Mat w = Space<Dim>::skew(rotation_gap);
    const double tr = strain.trace();
    return mu * (strain.array() * strain.array()).sum() + 0.5 * lambda * tr * tr +
           0.5 * kappa * (w.array() * w.array()).sum();
}

/// (k_s/k_n, nu) table for the three modes.
inline void write_poisson_table(const std::string& path, int samples = 21) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "ks_over_kn,nu_3d,nu_plane_strain,nu_plane_stress\n";
    out.precision(17);
    for (int i = 0; i < samples; ++i) {
        const double r = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        out << r << ',' << poisson_limit(1.0, r, PoissonMode::ThreeD) << ','
            << poisson_limit(1.0, r, PoissonMode::PlaneStrain) << ',' << poisson_limit(1.0, r, PoissonMode::PlaneStress)
            << '\n';
    }
    if (!out) throw IoError(path, "write failed");
}

} // namespace vemdem::dem
