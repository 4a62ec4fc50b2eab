#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace fwflow {

enum class StepRule { OpenLoop, ExactLineSearch, Armijo };

/// gamma_k = c / (c + k) for the open-loop rule. Line-search rules ignore c
/// except as a fallback when no descent is possible.
struct StepSchedule {
    double c = 2.0;
    StepRule rule = StepRule::OpenLoop;
    double armijo_ratio = 0.5;
    double armijo_sufficient_decrease = 1e-4;

    /// Continuous-time rate c / (c + t).
    double rate(double t) const { return c / (c + t); }
    double open_loop(long k) const { return rate(static_cast<double>(k)); }

    void validate() const {
        if (!(c > 1.0) || !std::isfinite(c)) throw std::invalid_argument("step schedule: c must be > 1");
        if (!(armijo_ratio > 0.0 && armijo_ratio < 1.0))
            throw std::invalid_argument("step schedule: armijo ratio must lie in (0,1)");
        if (!(armijo_sufficient_decrease > 0.0 && armijo_sufficient_decrease < 1.0))
            throw std::invalid_argument("step schedule: sufficient-decrease constant must lie in (0,1)");
    }
};

/// beta_k = (c / (c + k))^p. `c` defaults to the step schedule's constant;
/// setting `b` decouples the two.
struct AveragingSchedule {
    double c = 2.0;
    double p = 1.0;
    std::optional<double> b;
    // Forces beta_k = 1 for every k; averaging then reduces to vanilla FW.
    bool disabled = false;

    double constant() const { return b.value_or(c); }
    double rate(double t) const {
        if (disabled) return 1.0;
        const double cc = constant();
        const double r = cc / (cc + t);
        return p == 1.0 ? r : std::pow(r, p);
    }
    double beta(long k) const { return rate(static_cast<double>(k)); }

    void validate() const {
        if (!(constant() > 1.0) || !std::isfinite(constant()))
            throw std::invalid_argument("averaging schedule: c must be > 1");
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("averaging schedule: p must lie in (0,1]");
    }
};

}  // namespace fwflow
