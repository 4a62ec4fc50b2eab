#pragma once

#include "fwflow/core.hpp"
#include "fwflow/trace.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fwflow {

/// Zig-zag energy over consecutive W-blocks of a trajectory.
///
/// For the block starting at k, with d_bar = x_{k+W} - x_k and
/// d_i = x_{i+1} - x_i, the block energy is the mean over i = k+1..k+W-1 of
/// ||Q d_i||, Q = I - d_bar d_bar^T / ||d_bar||^2. Blocks with a vanishing
/// d_bar contribute 0. The `printed_*` fields use the 1/||d_bar|| scaling
/// instead of the orthogonal projector and are kept for comparison only.
struct ZigzagReport {
    int window = 0;
    std::vector<double> energies;
    double mean_energy = 0.0;
    std::vector<double> printed_energies;
    double printed_mean_energy = 0.0;
};

ZigzagReport zigzag_energy(const std::vector<Vector>& points, int window);

struct IdentificationReport {
    std::optional<long> k_bar;
    std::vector<int> reference_support;
    bool stable = false;
};

/// k_bar is the first record index k such that every atom support from k to
/// the end of the trace lies inside the reference support. Requires at least
/// `window` records in that tail; otherwise the manifold is reported as not
/// identified. Uses trace.x_star_support unless `reference` is given.
IdentificationReport detect_identification(const Trace& trace, int window,
                                           std::optional<std::vector<int>> reference = std::nullopt);

/// Sets IterateRecord::identified for records at or after k_bar.
void annotate_identification(Trace& trace, const IdentificationReport& report);

enum class RateSeries { Suboptimality, Gap };

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
    // A nonpositive value cut the range short.
    bool truncated = false;
};

/// Least-squares fit of log(value) against log(k).
RateFit fit_power_law(std::span<const double> ks, std::span<const double> values);

/// Fits the chosen series over records with k in [k_min, k_max].
RateFit fit_rate(const Trace& trace, long k_min, long k_max, RateSeries series = RateSeries::Suboptimality);

struct FlowComparisonRow {
    double delta = 0.0;
    // First time the suboptimality exceeds twice the flow bound.
    std::optional<long> crossover;
    double terminal_value = 0.0;
    // Fits over the last decade [T/10, T], of suboptimality and of the gap.
    RateFit terminal_fit;
    RateFit terminal_gap_fit;
};

struct FlowComparison {
    double c = 0.0;
    std::vector<long> times;
    // E(0) c^c / (c + t)^c
    std::vector<double> bound;
    std::vector<FlowComparisonRow> rows;
};

/// Flow bound E(0) c^c/(c+t)^c at time t.
double flow_bound(double e0, double c, double t);

/// Compares per-delta method traces (records at integer times, f_star set)
/// against the flow bound. The flow trace comes first in the rows.
FlowComparison compare_flow_method(const Trace& flow_trace, double flow_delta,
                                   const std::vector<std::pair<double, Trace>>& method_traces, double c);

}  // namespace fwflow
