#pragma once

#include "fwflow/core.hpp"
#include "fwflow/schedules.hpp"
#include "fwflow/trace.hpp"

#include <chrono>
#include <optional>
#include <vector>

namespace fwflow {

struct ActiveAtom {
    Vector atom;
    double weight;
};

/// Iterate plus the optional per-method memory. Each solver touches only the
/// fields it owns.
struct SolverState {
    long k = 0;
    Vector x;
    long grad_calls = 0;
    double last_step = 0.0;
    // Support of the atom used by the last step.
    std::vector<int> last_atom_support;
    std::optional<std::vector<ActiveAtom>> active_set;  // away-step
    std::optional<Vector> momentum_prev;                // Nesterov
    std::optional<Vector> grad_avg;                     // gradient averaging

    static SolverState at(Vector x0) {
        SolverState s;
        s.x = std::move(x0);
        return s;
    }
};

struct GapResult {
    double gap;
    Vector s;
};

/// grad f(x)^T (x - s) with s = LMO(grad f(x)); does not count as a solver
/// gradient call.
GapResult fw_gap(const Objective& obj, const FeasibleSet& set, const Vector& x);
GapResult fw_gap_from_grad(const FeasibleSet& set, const Vector& x, const Vector& grad);

/// Minimizer of f(x + t d) over t in [0, gamma_max] for quadratic objectives.
double exact_line_search(const Objective& obj, const Vector& x, const Vector& d, double gamma_max = 1.0);
double exact_line_search(const Objective& obj, const Vector& x, const Vector& grad, const Vector& d,
                         double gamma_max);

/// Backtracking from gamma_max until f(x + t d) <= f(x) + sigma t grad^T d.
double armijo_search(const Objective& obj, const Vector& x, double fx, const Vector& grad, const Vector& d,
                     double gamma_max, const StepSchedule& schedule);

/// Vanilla Frank-Wolfe step.
SolverState fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                    const StepSchedule& schedule);

/// FW step whose gradient is taken at y_k = x_k + max(0,(k-1)/(k+2)) (x_k - x_{k-1});
/// the convex update stays anchored at x_k.
SolverState nesterov_fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                             const StepSchedule& schedule);

/// Moves x to LMO(grad f(x)) and seeds the active set with that single atom.
SolverState init_active_set(SolverState state, const Objective& obj, const FeasibleSet& set);

/// Away-step Frank-Wolfe. Requires `state.active_set`. Uses exact line search
/// on quadratics and Armijo otherwise, regardless of `schedule.rule`.
SolverState away_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                      const StepSchedule& schedule);

/// FW driven by LMO of the running gradient average
/// g_bar_k = g_bar_{k-1} + beta_k (grad f(x_k) - g_bar_{k-1}).
SolverState grad_avg_fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                             const StepSchedule& schedule, const AveragingSchedule& avg);

struct ReferenceSolution {
    Vector x;
    double f;
    double gap;
    long iterations;
};

/// High-accuracy away-step solve used to supply f* and x* support when no
/// analytic solution exists.
ReferenceSolution reference_solve(const Objective& obj, const FeasibleSet& set, const Vector& x0,
                                  double gap_tol = 1e-12, long max_iterations = 200000);

/// Builds a Trace by evaluating diagnostics (f, gap, LMO support) at each
/// recorded iterate.
class TraceRecorder {
public:
    TraceRecorder(const Objective& obj, const FeasibleSet& set, std::optional<double> f_star = std::nullopt,
                  bool keep_points = false);

    void record(long k, long grad_calls, const Vector& x, double step_size);
    // Stores the point without adding a record (flow sub-steps).
    void keep_point(const Vector& x);
    void set_last_step(double step);
    std::size_t size() const { return trace_.records.size(); }

    Trace finish(std::string problem_id, std::string solver_id);

private:
    const Objective& obj_;
    const FeasibleSet& set_;
    bool keep_points_;
    Trace trace_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace fwflow
