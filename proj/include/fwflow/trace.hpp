#pragma once

#include "fwflow/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fwflow {

/// One row of a solver trace. `k` is the iteration index, or the integer time
/// for flow simulations sampled at unit intervals.
struct IterateRecord {
    long k = 0;
    long grad_calls = 0;
    double f_value = 0.0;
    double duality_gap = 0.0;
    // Step taken from this iterate (0 for the last record of a run).
    double step_size = 0.0;
    // Support of LMO(grad f(x_k)).
    std::vector<int> atom_support;
    double wall_ms = 0.0;
    bool identified = false;
};

struct Trace {
    std::vector<IterateRecord> records;
    std::string problem_id;
    std::string solver_id;
    std::optional<double> f_star;
    std::optional<std::vector<int>> x_star_support;
    // Every iterate, when the producer was asked to keep them.
    std::vector<Vector> points;

    /// f_value - f_star per record; requires f_star.
    std::vector<double> suboptimality() const;
    std::vector<double> gaps() const;
};

}  // namespace fwflow
