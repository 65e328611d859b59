#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <concepts>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "vemdem/error.hpp"
#include "vemdem/vem.hpp"

// Quasi-static driver: explicit pseudo-time integration with local (Cundall)
// damping, and a direct solve used as the oracle for linear problems.

namespace vemdem::relax {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct RelaxConfig {
    double damping = 0.8;          // alpha_d
    double tol = 1e-8;             // on max|residual| / reference force
    std::size_t max_steps = 200000;
    double mass_scale = 1.0;       // beta
    double dt = 1.0;
    std::size_t trace_every = 0;   // 0: no trace

    void check() const {
        if (!(damping > 0.0 && damping < 1.0)) throw ParameterError("damping must lie in (0, 1)");
        if (!(tol > 0.0)) throw ParameterError("relaxation tolerance must be positive");
        if (!(mass_scale > 0.0)) throw ParameterError("mass scale must be positive");
        if (!(dt > 0.0)) throw ParameterError("pseudo time step must be positive");
        if (max_steps == 0) throw ParameterError("max steps must be positive");
    }
};

struct DynamicState {
    VectorXd u;
    VectorXd v;
    VectorXd mass;
};

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// F - alpha_d |F| sign(v): resists motion, assists reversal.
inline double damped_force(double force, double velocity, double alpha) {
    return force - alpha * std::abs(force) * sign(velocity);
}

/// One central-difference step on the free DOFs.
inline void damped_step(DynamicState& s, const VectorXd& residual, double dt, double alpha,
                        const std::vector<char>* fixed = nullptr) {
    for (Eigen::Index i = 0; i < s.u.size(); ++i) {
        if (fixed && (*fixed)[i]) continue;
        s.v(i) += damped_force(residual(i), s.v(i), alpha) * dt / s.mass(i);
        s.u(i) += s.v(i) * dt;
    }
}

/// Lumped mass beta * sum_j |A_ij|. The row sum bounds the largest eigenvalue
/// of M^{-1} A by one, which keeps dt = 1 stable.
inline VectorXd gershgorin_mass(const SparseMatrix& A, double beta) {
    VectorXd m = VectorXd::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) m(it.row()) += std::abs(it.value());
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!(m(i) > 0.0)) m(i) = 1.0;  // DOF with no stiffness; only reachable when fixed
        m(i) *= beta;
    }
    return m;
}

/// Anything that can report out-of-balance forces on a displacement field.
template <class M>
concept ForceModel = requires(const M& m, const VectorXd& u, VectorXd& r, double beta) {
    { m.dof_count() } -> std::convertible_to<Eigen::Index>;
    { m.fixed() } -> std::convertible_to<const std::vector<char>&>;
    m.residual(u, r);  // external - internal; zero on fixed DOFs
    { m.nodal_mass(beta) } -> std::convertible_to<VectorXd>;
    { m.reference_force() } -> std::convertible_to<double>;
};

/// Linear model r = f - A u on a GlobalSystem.
class LinearModel {
public:
    explicit LinearModel(const vem::GlobalSystem& sys, const VectorXd* extra_load = nullptr) : sys_(sys) {
        load_ = sys.load;
        if (extra_load) load_ += *extra_load;
    }

    Eigen::Index dof_count() const { return sys_.dof_count(); }
    const std::vector<char>& fixed() const { return sys_.fixed; }

    void residual(const VectorXd& u, VectorXd& r) const {
        r.noalias() = load_ - sys_.full * u;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (sys_.fixed[i]) r(i) = 0.0;
        }
    }

    VectorXd nodal_mass(double beta) const { return gershgorin_mass(sys_.full, beta); }

    /// Effective load on the free DOFs, prescribed displacements included.
    double reference_force() const {
        VectorXd r;
        residual(sys_.prescribed, r);
        return r.cwiseAbs().maxCoeff();
    }

    VectorXd initial() const { return sys_.prescribed; }

private:
    const vem::GlobalSystem& sys_;
    VectorXd load_;
};

struct TracePoint {
    std::size_t step = 0;
    double ratio = 0.0;
};

struct RelaxResult {
    VectorXd u;
    std::size_t steps = 0;
    double ratio = 0.0;
    std::vector<TracePoint> trace;
};

class NonConvergence : public SolverError {
public:
    NonConvergence(double ratio, std::size_t steps, VectorXd u)
        : SolverError("relaxation did not converge in " + std::to_string(steps) +
                      " steps (residual ratio " + std::to_string(ratio) + ")"),
          ratio_(ratio), u_(std::move(u)) {}

    double residual_ratio() const noexcept { return ratio_; }
    const VectorXd& state() const noexcept { return u_; }

private:
    double ratio_;
    VectorXd u_;
};

/// Integrates from u0 until max|r| / max(reference, floor) < tol. Fixed DOFs
/// keep their value from u0.
template <ForceModel Model>
RelaxResult relax_to_equilibrium(const Model& model, const VectorXd& u0, const RelaxConfig& cfg,
                                 const VectorXd* mass = nullptr) {
    cfg.check();
    if (u0.size() != model.dof_count()) throw ParameterError("relax: initial state has the wrong size");
    DynamicState s;
    s.u = u0;
    s.v = VectorXd::Zero(u0.size());
    s.mass = mass ? *mass : model.nodal_mass(cfg.mass_scale);
    if (s.mass.size() != u0.size() || !(s.mass.minCoeff() > 0.0)) throw ParameterError("relax: masses must be positive");

    const double ref = std::max(model.reference_force(), std::numeric_limits<double>::min());
    RelaxResult out;
    VectorXd r(u0.size());
    for (std::size_t step = 0;; ++step) {
        model.residual(s.u, r);
        const double ratio = r.size() ? r.cwiseAbs().maxCoeff() / ref : 0.0;
        if (cfg.trace_every && step % cfg.trace_every == 0) out.trace.push_back({step, ratio});
        if (!std::isfinite(ratio)) throw NonConvergence(ratio, step, s.u);
        if (ratio < cfg.tol) {
            out.u = std::move(s.u);
            out.steps = step;
            out.ratio = ratio;
            return out;
        }
        if (step == cfg.max_steps) throw NonConvergence(ratio, step, s.u);
        damped_step(s, r, cfg.dt, cfg.damping, &model.fixed());
    }
}

inline void write_trace_csv(const std::vector<TracePoint>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << "step,residual_ratio\n";
    out.precision(17);
    for (const auto& t : trace) out << t.step << ',' << t.ratio << '\n';
    if (!out) throw IoError(path, "write failed");
}

/// Free-DOF count above which the direct solve switches to Jacobi-preconditioned CG.
inline constexpr Eigen::Index kDirectLimit = 400000;

/// Solves the reduced system and returns the full displacement vector.
inline VectorXd direct_solve(const vem::GlobalSystem& sys) {
    const auto n = sys.reduced.rows();
    if (n == 0) return sys.prescribed;
    VectorXd x;
    const double scale = sys.reduced.diagonal().cwiseAbs().maxCoeff();
    if (n <= kDirectLimit) {
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.reduced);
        if (ldlt.info() != Eigen::Success) throw ConstraintError("factorization failed: system is singular");
        if (!(ldlt.vectorD().minCoeff() > 1e-12 * scale)) {
            throw ConstraintError("stiffness matrix is singular: constraints do not remove all rigid modes");
        }
        x = ldlt.solve(sys.reduced_rhs);
    } else {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
        cg.setTolerance(1e-13);
        cg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
        cg.compute(sys.reduced);
        x = cg.solve(sys.reduced_rhs);
        if (cg.info() != Eigen::Success) throw SolverError("conjugate gradients did not converge");
    }
    const double bnorm = sys.reduced_rhs.norm();
    const double res = (sys.reduced * x - sys.reduced_rhs).norm();
    if (!x.allFinite() || res > 1e-10 * std::max(bnorm, scale * x.norm())) {
        throw ConstraintError("linear solve is inaccurate: system is singular or ill-conditioned");
    }
    return sys.expand(x);
}

} // namespace vemdem::relax
