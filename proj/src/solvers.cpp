#include "fwflow/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fwflow {

namespace {

constexpr double kDropWeight = 1e-12;

double choose_step(const StepSchedule& schedule, const Objective& obj, const Vector& x, const Vector& grad,
                   const Vector& d, long k) {
    switch (schedule.rule) {
        case StepRule::OpenLoop:
            return schedule.open_loop(k);
        case StepRule::ExactLineSearch:
            return exact_line_search(obj, x, grad, d, 1.0);
        case StepRule::Armijo:
            return armijo_search(obj, x, obj.value(x), grad, d, 1.0, schedule);
    }
    return schedule.open_loop(k);
}

}  // namespace

std::vector<double> Trace::suboptimality() const {
    if (!f_star) throw std::logic_error("trace has no f_star");
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.f_value - *f_star);
    return out;
}

std::vector<double> Trace::gaps() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.duality_gap);
    return out;
}

GapResult fw_gap_from_grad(const FeasibleSet& set, const Vector& x, const Vector& grad) {
    Vector s = set.lmo(grad);
    // The LMO minimizes grad^T s, so the gap is nonnegative up to rounding.
    const double gap = std::max(0.0, grad.dot(x - s));
    return {gap, std::move(s)};
}

GapResult fw_gap(const Objective& obj, const FeasibleSet& set, const Vector& x) {
    require_dim(set.dimension(), x.size(), "fw_gap");
    return fw_gap_from_grad(set, x, obj.gradient(x));
}

double exact_line_search(const Objective& obj, const Vector& x, const Vector& grad, const Vector& d,
                         double gamma_max) {
    const auto curv = obj.curvature(d);
    if (!curv) throw std::invalid_argument("exact_line_search: objective is not quadratic");
    const double slope = grad.dot(d);
    (void)x;
    if (!(*curv > 0.0)) return slope < 0.0 ? gamma_max : 0.0;
    return std::clamp(-slope / *curv, 0.0, gamma_max);
}

double exact_line_search(const Objective& obj, const Vector& x, const Vector& d, double gamma_max) {
    return exact_line_search(obj, x, obj.gradient(x), d, gamma_max);
}

double armijo_search(const Objective& obj, const Vector& x, double fx, const Vector& grad, const Vector& d,
                     double gamma_max, const StepSchedule& schedule) {
    const double slope = grad.dot(d);
    if (!(slope < 0.0)) return 0.0;
    double t = gamma_max;
    while (t > 1e-20) {
        if (obj.value(x + t * d) <= fx + schedule.armijo_sufficient_decrease * t * slope) return t;
        t *= schedule.armijo_ratio;
    }
    return 0.0;
}

SolverState fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                    const StepSchedule& schedule) {
    const Vector g = obj.gradient(state.x);
    const Vector s = set.lmo(g);
    const Vector d = s - state.x;
    const double gamma = choose_step(schedule, obj, state.x, g, d, state.k);
    state.x = state.x + gamma * (s - state.x);
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = gamma;
    state.last_atom_support = support_of(s);
    return state;
}

SolverState nesterov_fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                             const StepSchedule& schedule) {
    if (schedule.rule != StepRule::OpenLoop)
        throw std::invalid_argument("nesterov_fw_step: only the open-loop schedule is supported");
    const double k = static_cast<double>(state.k);
    const double coef = state.k >= 1 ? (k - 1.0) / (k + 2.0) : 0.0;
    const Vector prev = state.momentum_prev.value_or(state.x);
    const Vector y = state.x + coef * (state.x - prev);
    const Vector s = set.lmo(obj.gradient(y));
    const double gamma = schedule.open_loop(state.k);
    state.momentum_prev = state.x;
    state.x = state.x + gamma * (s - state.x);
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = gamma;
    state.last_atom_support = support_of(s);
    return state;
}

SolverState init_active_set(SolverState state, const Objective& obj, const FeasibleSet& set) {
    Vector s = set.lmo(obj.gradient(state.x));
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = 1.0;
    state.last_atom_support = support_of(s);
    state.x = s;
    state.active_set = std::vector<ActiveAtom>{{std::move(s), 1.0}};
    return state;
}

SolverState away_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                      const StepSchedule& schedule) {
    if (!state.active_set || state.active_set->empty())
        throw std::invalid_argument("away_step: state has no active set");
    auto& atoms = *state.active_set;

    const double fx = obj.is_quadratic() ? 0.0 : obj.value(state.x);
    const Vector g = obj.gradient(state.x);
    state.grad_calls += 1;
    const Vector s = set.lmo(g);

    std::size_t away = 0;
    double away_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const double v = g.dot(atoms[i].atom);
        if (v > away_val) {
            away_val = v;
            away = i;
        }
    }
    const double gx = g.dot(state.x);
    const double fw_gain = gx - g.dot(s);
    const double away_gain = away_val - gx;

    const bool take_away = atoms.size() > 1 && away_gain > fw_gain;
    Vector d;
    double gamma_max;
    if (take_away) {
        const double w = atoms[away].weight;
        d = state.x - atoms[away].atom;
        gamma_max = w / (1.0 - w);
    } else {
        d = s - state.x;
        gamma_max = 1.0;
    }

    const double gamma = obj.is_quadratic() ? exact_line_search(obj, state.x, g, d, gamma_max)
                                            : armijo_search(obj, state.x, fx, g, d, gamma_max, schedule);
    state.x += gamma * d;

    if (take_away) {
        for (auto& a : atoms) a.weight *= (1.0 + gamma);
        atoms[away].weight -= gamma;
        if (gamma >= gamma_max) atoms[away].weight = 0.0;
        state.last_atom_support = support_of(atoms[away].atom);
    } else if (gamma >= 1.0) {
        atoms.assign(1, ActiveAtom{s, 1.0});
        state.last_atom_support = support_of(s);
    } else {
        for (auto& a : atoms) a.weight *= (1.0 - gamma);
        auto it = std::find_if(atoms.begin(), atoms.end(), [&](const ActiveAtom& a) { return a.atom == s; });
        if (it != atoms.end())
            it->weight += gamma;
        else
            atoms.push_back({s, gamma});
        state.last_atom_support = support_of(s);
    }

    std::erase_if(atoms, [](const ActiveAtom& a) { return a.weight <= kDropWeight; });
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    for (auto& a : atoms) a.weight /= total;

    state.k += 1;
    state.last_step = gamma;
    return state;
}

SolverState grad_avg_fw_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                             const StepSchedule& schedule, const AveragingSchedule& avg) {
    const Vector g = obj.gradient(state.x);
    if (!state.grad_avg) state.grad_avg = g;
    Vector& gbar = *state.grad_avg;
    gbar = gbar + avg.beta(state.k) * (g - gbar);
    const Vector s = set.lmo(gbar);
    const Vector d = s - state.x;
    const double gamma = choose_step(schedule, obj, state.x, g, d, state.k);
    state.x = state.x + gamma * (s - state.x);
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = gamma;
    state.last_atom_support = support_of(s);
    return state;
}

ReferenceSolution reference_solve(const Objective& obj, const FeasibleSet& set, const Vector& x0,
                                  double gap_tol, long max_iterations) {
    StepSchedule schedule;
    schedule.rule = obj.is_quadratic() ? StepRule::ExactLineSearch : StepRule::Armijo;
    SolverState state = init_active_set(SolverState::at(x0), obj, set);
    Vector best_x = state.x;
    double best_gap = fw_gap(obj, set, state.x).gap;
    long it = 0;
    for (; it < max_iterations && best_gap > gap_tol; ++it) {
        state = away_step(std::move(state), obj, set, schedule);
        if (it % 10 == 9 || it + 1 == max_iterations) {
            const double gap = fw_gap(obj, set, state.x).gap;
            if (gap < best_gap) {
                best_gap = gap;
                best_x = state.x;
            }
        }
    }
    return {best_x, obj.value(best_x), best_gap, it};
}

TraceRecorder::TraceRecorder(const Objective& obj, const FeasibleSet& set, std::optional<double> f_star,
                             bool keep_points)
    : obj_(obj), set_(set), keep_points_(keep_points), start_(std::chrono::steady_clock::now()) {
    require_dim(set.dimension(), obj.dimension(), "trace recorder");
    trace_.f_star = f_star;
}

void TraceRecorder::record(long k, long grad_calls, const Vector& x, double step_size) {
    const auto vg = obj_.value_and_grad(x);
    const auto gap = fw_gap_from_grad(set_, x, vg.grad);
    IterateRecord r;
    r.k = k;
    r.grad_calls = grad_calls;
    r.f_value = vg.value;
    r.duality_gap = gap.gap;
    r.step_size = step_size;
    r.atom_support = support_of(gap.s);
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    trace_.records.push_back(std::move(r));
    if (keep_points_) trace_.points.push_back(x);
}

void TraceRecorder::keep_point(const Vector& x) {
    if (keep_points_) trace_.points.push_back(x);
}

void TraceRecorder::set_last_step(double step) {
    if (!trace_.records.empty()) trace_.records.back().step_size = step;
}

Trace TraceRecorder::finish(std::string problem_id, std::string solver_id) {
    trace_.problem_id = std::move(problem_id);
    trace_.solver_id = std::move(solver_id);
    return std::move(trace_);
}

}  // namespace fwflow
