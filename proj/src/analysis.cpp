#include "fwflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fwflow {

ZigzagReport zigzag_energy(const std::vector<Vector>& points, int window) {
    if (window < 2) throw std::invalid_argument("zigzag_energy: window must be >= 2");
    if (points.size() < static_cast<std::size_t>(window) + 1)
        throw std::invalid_argument("zigzag_energy: need at least window+1 points");
    const auto W = static_cast<std::size_t>(window);
    ZigzagReport rep;
    rep.window = window;
    for (std::size_t k = 0; k + W < points.size(); k += W) {
        const Vector dbar = points[k + W] - points[k];
        const double nrm = dbar.norm();
        double proj = 0.0;
        double printed = 0.0;
        if (nrm >= 1e-14) {
            const Vector u = dbar / nrm;
            for (std::size_t i = k + 1; i < k + W; ++i) {
                const Vector d = points[i + 1] - points[i];
                const double along = u.dot(d);
                proj += (d - along * u).norm();
                // (I - dbar dbar^T / ||dbar||) d
                printed += (d - (dbar.dot(d) / nrm) * dbar).norm();
            }
            proj /= static_cast<double>(W - 1);
            printed /= static_cast<double>(W - 1);
        }
        rep.energies.push_back(proj);
        rep.printed_energies.push_back(printed);
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e;
        return s / static_cast<double>(v.size());
    };
    rep.mean_energy = mean(rep.energies);
    rep.printed_mean_energy = mean(rep.printed_energies);
    return rep;
}

IdentificationReport detect_identification(const Trace& trace, int window, std::optional<std::vector<int>> reference) {
    if (!reference) reference = trace.x_star_support;
    if (!reference) throw std::invalid_argument("detect_identification: no reference support");
    if (window < 1) throw std::invalid_argument("detect_identification: window must be >= 1");
    IdentificationReport rep;
    rep.reference_support = *reference;
    std::sort(rep.reference_support.begin(), rep.reference_support.end());
    const auto& ref = rep.reference_support;

    auto inside = [&](const std::vector<int>& s) {
        return std::all_of(s.begin(), s.end(), [&](int i) { return std::binary_search(ref.begin(), ref.end(), i); });
    };
    const auto& recs = trace.records;
    std::size_t first = recs.size();
    while (first > 0 && inside(recs[first - 1].atom_support)) --first;
    const std::size_t tail = recs.size() - first;
    if (tail == 0 || tail < static_cast<std::size_t>(window)) return rep;
    rep.k_bar = recs[first].k;
    rep.stable = true;
    return rep;
}

void annotate_identification(Trace& trace, const IdentificationReport& report) {
    for (auto& r : trace.records) r.identified = report.k_bar && r.k >= *report.k_bar;
}

RateFit fit_power_law(std::span<const double> ks, std::span<const double> values) {
    if (ks.size() != values.size()) throw std::invalid_argument("fit_power_law: length mismatch");
    RateFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(values[i] > 0.0)) {
            fit.truncated = true;
            break;
        }
        if (!(ks[i] > 0.0)) throw std::invalid_argument("fit_power_law: k must be positive");
        const double x = std::log(ks[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_power_law: fewer than two usable points");
    const double dn = static_cast<double>(n);
    const double vx = sxx - sx * sx / dn;
    const double vy = syy - sy * sy / dn;
    const double cxy = sxy - sx * sy / dn;
    if (!(vx > 0.0)) throw std::invalid_argument("fit_power_law: degenerate k range");
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.r_squared = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
    fit.points = n;
    return fit;
}

RateFit fit_rate(const Trace& trace, long k_min, long k_max, RateSeries series) {
    if (series == RateSeries::Suboptimality && !trace.f_star)
        throw std::invalid_argument("fit_rate: trace has no f_star");
    std::vector<double> ks, vals;
    for (const auto& r : trace.records) {
        if (r.k < std::max(k_min, 1L) || r.k > k_max) continue;
        ks.push_back(static_cast<double>(r.k));
        vals.push_back(series == RateSeries::Gap ? r.duality_gap : r.f_value - *trace.f_star);
    }
    return fit_power_law(ks, vals);
}

double flow_bound(double e0, double c, double t) { return e0 * std::pow(c / (c + t), c); }

FlowComparison compare_flow_method(const Trace& flow_trace, double flow_delta,
                                   const std::vector<std::pair<double, Trace>>& method_traces, double c) {
    if (!flow_trace.f_star) throw std::invalid_argument("compare_flow_method: flow trace has no f_star");
    if (flow_trace.records.empty()) throw std::invalid_argument("compare_flow_method: empty flow trace");
    FlowComparison out;
    out.c = c;
    const double e0 = flow_trace.records.front().f_value - *flow_trace.f_star;
    for (const auto& r : flow_trace.records) {
        out.times.push_back(r.k);
        out.bound.push_back(flow_bound(e0, c, static_cast<double>(r.k)));
    }

    auto row_for = [&](double delta, const Trace& tr) {
        if (!tr.f_star) throw std::invalid_argument("compare_flow_method: trace has no f_star");
        if (tr.records.empty()) throw std::invalid_argument("compare_flow_method: empty trace");
        FlowComparisonRow row;
        row.delta = delta;
        const double te0 = tr.records.front().f_value - *tr.f_star;
        for (const auto& r : tr.records) {
            if (r.k <= 0) continue;
            if (r.f_value - *tr.f_star > 2.0 * flow_bound(te0, c, static_cast<double>(r.k))) {
                row.crossover = r.k;
                break;
            }
        }
        row.terminal_value = tr.records.back().f_value - *tr.f_star;
        const long T = tr.records.back().k;
        auto fit_or_flag = [&](RateSeries series) {
            try {
                return fit_rate(tr, std::max(1L, T / 10), T, series);
            } catch (const std::invalid_argument&) {
                RateFit bad;
                bad.truncated = true;
                return bad;
            }
        };
        row.terminal_fit = fit_or_flag(RateSeries::Suboptimality);
        row.terminal_gap_fit = fit_or_flag(RateSeries::Gap);
        return row;
    };
    out.rows.push_back(row_for(flow_delta, flow_trace));
    for (const auto& [delta, tr] : method_traces) out.rows.push_back(row_for(delta, tr));
    return out;
}

}  // namespace fwflow
