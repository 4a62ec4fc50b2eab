#include "fwflow/avgfw.hpp"

#include <cmath>
#include <sstream>

namespace fwflow {

namespace {

double avg_step_size(const StepSchedule& step, const Objective& obj, const Vector& x, const Vector& grad,
                     const Vector& d, long k) {
    switch (step.rule) {
        case StepRule::OpenLoop:
            return step.open_loop(k);
        case StepRule::ExactLineSearch:
            return exact_line_search(obj, x, grad, d, 1.0);
        case StepRule::Armijo:
            return armijo_search(obj, x, obj.value(x), grad, d, 1.0, step);
    }
    return step.open_loop(k);
}

}  // namespace

AvgState avgfw_step(AvgState state, const Objective& obj, const FeasibleSet& set, const StepSchedule& step,
                    const AveragingSchedule& avg) {
    const Vector g = obj.gradient(state.x);
    const Vector s = set.lmo(g);
    if (!state.s_bar) state.s_bar = s;
    Vector& sbar = *state.s_bar;
    sbar = sbar + avg.beta(state.k) * (s - sbar);
    const double gamma = avg_step_size(step, obj, state.x, g, sbar - state.x, state.k);
    state.x = state.x + gamma * (sbar - state.x);
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = gamma;
    state.last_atom_support = support_of(s);
    return state;
}

AvgState avgfw_flow_step(AvgState state, const Objective& obj, const FeasibleSet& set, double c,
                         const AveragingSchedule& avg, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("avgfw_flow_step: delta must lie in (0,1]");
    const double t = static_cast<double>(state.k) * delta;
    const Vector s = set.lmo(obj.gradient(state.x));
    if (!state.s_bar) state.s_bar = s;
    Vector& sbar = *state.s_bar;
    sbar = sbar + (delta * avg.rate(t)) * (s - sbar);
    const double gamma = delta * (c / (c + t));
    state.x = state.x + gamma * (sbar - state.x);
    state.grad_calls += 1;
    state.k += 1;
    state.last_step = gamma;
    state.last_atom_support = support_of(s);
    return state;
}

std::vector<double> averaging_weights(const AveragingSchedule& avg, long k) {
    if (k < 0) throw std::invalid_argument("averaging_weights: k must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(k) + 1);
    double tail = 1.0;  // prod_{j=i+1..k} (1 - beta_j)
    for (long i = k; i >= 1; --i) {
        const double b = avg.beta(i);
        w[static_cast<std::size_t>(i)] = b * tail;
        tail *= (1.0 - b);
    }
    w[0] = tail;
    return w;
}

double accumulation_reference(double c, double p, double t) {
    if (!(c > 0.0)) throw std::invalid_argument("accumulation_reference: c must be > 0");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("accumulation_reference: p must lie in (0,1]");
    if (t < 0.0) throw std::invalid_argument("accumulation_reference: t must be >= 0");
    if (p == 1.0) return -std::expm1(c * std::log(c / (c + t)));
    const double growth = std::pow(c, p) * (std::pow(c + t, 1.0 - p) - std::pow(c, 1.0 - p)) / (1.0 - p);
    return -std::expm1(-growth);
}

Trace avgfw_flow(const Objective& obj, const FeasibleSet& set, const Vector& x0, double c,
                 const AveragingSchedule& avg, double delta, double horizon, const FlowOptions& opts) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("avgfw_flow: delta must lie in (0,1]");
    const double per_unit_d = 1.0 / delta;
    const long per_unit = std::lround(per_unit_d);
    if (std::abs(per_unit_d - static_cast<double>(per_unit)) > 1e-9 * per_unit_d)
        throw std::invalid_argument("avgfw_flow: 1/delta must be an integer");
    if (horizon < 0 || horizon != std::floor(horizon))
        throw std::invalid_argument("avgfw_flow: horizon must be a nonnegative integer");
    const long T = static_cast<long>(horizon);

    TraceRecorder rec(obj, set, opts.f_star, opts.keep_points);
    AvgState state = AvgState::at(x0);
    rec.record(0, 0, state.x, 0.0);
    for (long t = 1; t <= T; ++t) {
        for (long sub = 0; sub < per_unit; ++sub) {
            if (sub > 0) rec.keep_point(state.x);
            state = avgfw_flow_step(std::move(state), obj, set, c, avg, delta);
        }
        rec.set_last_step(state.last_step);
        rec.record(t, state.grad_calls, state.x, 0.0);
    }
    std::ostringstream solver;
    solver << "avgflow-d" << delta;
    return rec.finish("", solver.str());
}

}  // namespace fwflow
