#pragma once

#include "fwflow/core.hpp"
#include "fwflow/multistep.hpp"
#include "fwflow/schedules.hpp"
#include "fwflow/trace.hpp"

#include <optional>
#include <vector>

namespace fwflow {

/// State of LMO-averaged Frank-Wolfe. `s_bar` is empty until the first step,
/// which seeds it with s_0 = LMO(grad f(x_0)).
struct AvgState {
    Vector x;
    std::optional<Vector> s_bar;
    long k = 0;
    long grad_calls = 0;
    double last_step = 0.0;
    std::vector<int> last_atom_support;

    static AvgState at(Vector x0) {
        AvgState s;
        s.x = std::move(x0);
        return s;
    }
};

/// s_k = LMO(grad f(x_k)); s_bar_k = s_bar_{k-1} + beta_k (s_k - s_bar_{k-1});
/// x_{k+1} = x_k + gamma_k (s_bar_k - x_k).
AvgState avgfw_step(AvgState state, const Objective& obj, const FeasibleSet& set, const StepSchedule& step,
                    const AveragingSchedule& avg);

/// Same update as a time-delta Euler step of the averaged flow; delta = 1 is
/// avgfw_step with the open-loop schedule.
AvgState avgfw_flow_step(AvgState state, const Objective& obj, const FeasibleSet& set, double c,
                         const AveragingSchedule& avg, double delta);

/// Weights of s_bar_k as a combination of s_0..s_k: entry 0 is the mass
/// prod_{i=1..k} (1 - beta_i) still carried by s_bar_0 = s_0, entry i >= 1 is
/// beta_i prod_{j=i+1..k} (1 - beta_j).
std::vector<double> averaging_weights(const AveragingSchedule& avg, long k);

/// s_bar(t) for the constant atom stream s = 1 started at s_bar(0) = 0:
/// 1 - (c/(c+t))^c for p = 1, otherwise 1 - exp(a(0) - a(t)) with
/// a(t) = c^p (c+t)^(1-p) / (1-p).
double accumulation_reference(double c, double p, double t);

/// Simulates the averaged flow with time step delta up to horizon T. Records
/// are sampled at integer times.
Trace avgfw_flow(const Objective& obj, const FeasibleSet& set, const Vector& x0, double c,
                 const AveragingSchedule& avg, double delta, double horizon, const FlowOptions& opts = {});

}  // namespace fwflow
