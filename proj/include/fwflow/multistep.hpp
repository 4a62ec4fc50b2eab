#pragma once

#include "fwflow/core.hpp"
#include "fwflow/schedules.hpp"
#include "fwflow/solvers.hpp"
#include "fwflow/trace.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fwflow {

/// Explicit Runge-Kutta (Butcher) tableau: strictly lower-triangular A,
/// stage weights beta summing to one, nodes omega with omega_0 = 0.
struct RKTableau {
    std::string name;
    Matrix A;
    Vector beta;
    Vector omega;

    int stages() const { return static_cast<int>(beta.size()); }

    /// Throws std::invalid_argument if the structural invariants fail.
    void validate(double tol = 1e-12) const;

    static RKTableau euler();
    static RKTableau midpoint();
    static RKTableau rk44();
    static RKTableau rk38();
    static RKTableau rk5();

    static std::vector<RKTableau> builtins();
    /// Built-in by name: euler, midpoint, rk44, rk38, rk5.
    static RKTableau by_name(const std::string& name);

    /// Plain-text format: q, then q rows of A, then the beta row, then the
    /// omega row; whitespace-separated decimals (fractions like 1/3 allowed).
    static RKTableau parse(std::istream& in, std::string name = "custom");
    static RKTableau load(const std::string& path);
};

/// Feasibility certificate of a tableau at iteration k:
/// P = Gamma (I + A^T Gamma)^{-1}, z = q P beta, with
/// Gamma = diag(c / (c + k + omega_i)). Iterates stay in the set whenever
/// 0 <= z <= 1.
struct FeasibilityCertificate {
    long k;
    Vector gamma_bar;
    Matrix P;
    Vector z;
    bool feasible;

    /// ||P (I + A^T Gamma) - Gamma||_max
    double residual(const RKTableau& tab) const;
};

FeasibilityCertificate build_certificate(const RKTableau& tab, double c, long k);

/// True if the certificate holds at every k in [k_first, k_last].
bool certified_feasible(const RKTableau& tab, double c, long k_first = 0, long k_last = 1000);

/// One q-stage multistep Frank-Wolfe step of time length delta. Stage i uses
/// the rate c / (c + (k + omega_i) delta) scaled by delta.
SolverState multistep_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                           const RKTableau& tab, double c, double delta = 1.0);

/// Generic explicit RK step for y' = f(t, y).
using OdeRhs = std::function<Vector(double, const Vector&)>;
Vector rk_step(const RKTableau& tab, const OdeRhs& rhs, double t, const Vector& y, double h);
/// Integrates from t = 0 to t_end with fixed step h; returns y(t_end).
Vector rk_integrate(const RKTableau& tab, const OdeRhs& rhs, const Vector& y0, double h, double t_end);

struct FlowOptions {
    // Every sub-step point is kept in Trace::points when set.
    bool keep_points = false;
    std::optional<double> f_star;
};

/// Simulates x' = c/(c+t) (LMO(x) - x) by running `tab` with time step delta
/// up to horizon T. Records are sampled at integer times 0..T.
Trace simulate_flow(const Objective& obj, const FeasibleSet& set, const Vector& x0, double c, double delta,
                    double horizon, const FlowOptions& opts = {}, const RKTableau& tab = RKTableau::euler());

}  // namespace fwflow
