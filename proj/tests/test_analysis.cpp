#include "fwflow/analysis.hpp"
#include "fwflow/bench.hpp"
#include "fwflow/multistep.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace fwflow;
using testutil::vec;

namespace {

Trace support_trace(const std::vector<std::vector<int>>& supports) {
    Trace t;
    for (std::size_t k = 0; k < supports.size(); ++k) {
        IterateRecord r;
        r.k = static_cast<long>(k);
        r.atom_support = supports[k];
        t.records.push_back(r);
    }
    return t;
}

Trace power_trace(long k_max, double (*e)(double)) {
    Trace t;
    t.f_star = 0.0;
    for (long k = 0; k <= k_max; ++k) {
        IterateRecord r;
        r.k = k;
        r.f_value = e(static_cast<double>(k));
        r.duality_gap = 2 * r.f_value;
        t.records.push_back(r);
    }
    return t;
}

Matrix random_rotation(Rng& rng, int n) {
    Matrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(M);
    return qr.householderQ();
}

}  // namespace

TEST_CASE("zig-zag energy examples") {
    const std::vector<Vector> line{vec({0, 0}), vec({1, 0}), vec({2, 0}), vec({3, 0})};
    CHECK(zigzag_energy(line, 3).mean_energy == 0.0);

    const std::vector<Vector> zz{vec({0, 0}), vec({1, 1}), vec({2, 0}), vec({3, 1})};
    const auto rep = zigzag_energy(zz, 3);
    const double expected = (std::hypot(0.4, -1.2) + std::hypot(-0.2, 0.6)) / 2;
    CHECK(rep.mean_energy == doctest::Approx(expected).epsilon(1e-14));
    CHECK(rep.mean_energy == doctest::Approx(0.9487).epsilon(1e-4));
    REQUIRE(rep.energies.size() == 1);
    CHECK(rep.printed_energies.size() == 1);

    // A stationary block contributes 0.
    const std::vector<Vector> still{vec({1, 1}), vec({2, 1}), vec({1, 1})};
    CHECK(zigzag_energy(still, 2).mean_energy == 0.0);

    CHECK_THROWS(zigzag_energy(line, 4));
    CHECK_THROWS(zigzag_energy(line, 1));
}

TEST_CASE("property: zig-zag energy is rigid-motion invariant and scales linearly") {
    Rng rng(2024, "zigzag");
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 4;
        std::vector<Vector> pts;
        for (int i = 0; i < 41; ++i) pts.push_back(testutil::random_vector(rng, n));
        const Matrix R = random_rotation(rng, n);
        const Vector shift = testutil::random_vector(rng, n, 10.0);
        const double lambda = 0.1 + 5 * rng.uniform();
        std::vector<Vector> moved, scaled;
        for (const auto& p : pts) {
            moved.push_back(R * p + shift);
            scaled.push_back(lambda * p);
        }
        for (int W : {2, 5, 20}) {
            const auto base = zigzag_energy(pts, W);
            const auto rot = zigzag_energy(moved, W);
            const auto sc = zigzag_energy(scaled, W);
            REQUIRE(std::abs(base.mean_energy - rot.mean_energy) <= 1e-10);
            REQUIRE(std::abs(lambda * base.mean_energy - sc.mean_energy) <= 1e-10);
            for (double e : base.energies) REQUIRE(e >= 0.0);
        }
    }
}

TEST_CASE("identification examples") {
    auto a = support_trace({{1, 3}, {3}, {1}, {1, 3}, {1}, {3}});
    const auto ra = detect_identification(a, 1, std::vector<int>{1, 3});
    REQUIRE(ra.k_bar);
    CHECK(*ra.k_bar == 0);
    CHECK(ra.stable);

    auto b = support_trace({{2}, {1}, {1}, {1}});
    const auto rb = detect_identification(b, 1, std::vector<int>{1});
    REQUIRE(rb.k_bar);
    CHECK(*rb.k_bar == 1);

    // Tail shorter than the window: not identified.
    CHECK_FALSE(detect_identification(b, 4, std::vector<int>{1}).k_bar);
    // Last record outside: not identified.
    CHECK_FALSE(detect_identification(support_trace({{1}, {2}}), 1, std::vector<int>{1}).k_bar);
    CHECK_THROWS(detect_identification(b, 1));
    b.x_star_support = std::vector<int>{1};
    CHECK(detect_identification(b, 1).k_bar == 1);

    annotate_identification(b, rb);
    CHECK_FALSE(b.records[0].identified);
    CHECK(b.records[1].identified);
    CHECK(b.records[3].identified);
}

TEST_CASE("property: identification is idempotent and ignores the prefix") {
    Rng rng(5, "ident");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<int>> sup;
        const int n = 5 + static_cast<int>(rng.below(30));
        for (int k = 0; k < n; ++k) {
            std::vector<int> s;
            for (int i = 0; i < 5; ++i)
                if (rng.uniform() < 0.3) s.push_back(i);
            sup.push_back(s);
        }
        const std::vector<int> ref{0, 2, 4};
        auto t = support_trace(sup);
        const auto r1 = detect_identification(t, 1, ref);
        annotate_identification(t, r1);
        const auto r2 = detect_identification(t, 1, ref);
        CHECK(r1.k_bar == r2.k_bar);
        if (r1.k_bar) {
            for (long k = *r1.k_bar; k < n; ++k)
                for (int i : sup[static_cast<std::size_t>(k)]) REQUIRE((i == 0 || i == 2 || i == 4));
            // Scrambling records before k_bar leaves it unchanged.
            auto scrambled = sup;
            for (long k = 0; k < *r1.k_bar; ++k) scrambled[static_cast<std::size_t>(k)] = {1, 3};
            CHECK(detect_identification(support_trace(scrambled), 1, ref).k_bar == r1.k_bar);
        }
    }
}

TEST_CASE("rate fit examples") {
    const auto inv = fit_rate(power_trace(1000, [](double k) { return 1.0 / k; }), 1, 1000);
    CHECK(std::abs(inv.slope + 1.0) <= 1e-9);
    CHECK(inv.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inv.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

    const auto p15 = fit_rate(power_trace(1000, [](double k) { return 5.0 / std::pow(k, 1.5); }), 10, 1000);
    CHECK(std::abs(p15.slope + 1.5) <= 1e-9);
    CHECK(std::exp(p15.intercept) == doctest::Approx(5.0).epsilon(1e-9));

    const auto c4 = fit_rate(power_trace(1000, [](double k) { return std::pow(4.0 / (4.0 + k), 4.0); }), 10, 1000);
    CHECK(c4.slope > -4.0);
    CHECK(c4.slope < -3.0);

    const auto gap = fit_rate(power_trace(1000, [](double k) { return 1.0 / (k * k); }), 1, 1000, RateSeries::Gap);
    CHECK(std::abs(gap.slope + 2.0) <= 1e-9);

    // A zero value cuts the range.
    auto t = power_trace(100, [](double k) { return k > 50 ? 0.0 : 1.0 / k; });
    const auto cut = fit_rate(t, 1, 100);
    CHECK(cut.truncated);
    CHECK(cut.points == 50);
    CHECK(std::abs(cut.slope + 1.0) <= 1e-9);

    Trace nostar = power_trace(10, [](double k) { return 1.0 / k; });
    nostar.f_star.reset();
    CHECK_THROWS(fit_rate(nostar, 1, 10));
}

TEST_CASE("property: power-law exponents are recovered to three decimals") {
    Rng rng(8, "powerlaw");
    for (int trial = 0; trial < 100; ++trial) {
        const double a = 0.2 + 3.0 * rng.uniform();
        const double scale = std::exp(4 * rng.uniform() - 2);
        std::vector<double> ks, vals;
        for (int k = 10; k <= 10000; k += 7) {
            ks.push_back(k);
            vals.push_back(scale * std::pow(k, -a));
        }
        const auto fit = fit_power_law(ks, vals);
        REQUIRE(std::abs(fit.slope + a) < 5e-4);
    }
}

TEST_CASE("flow comparison on case 2") {
    const auto inst = gen_case_study(2);
    const double c = 2.0;
    FlowOptions fo;
    fo.f_star = inst.f_star;
    const auto flow = simulate_flow(inst.objective, inst.set, inst.x_init, c, 0.01, 100, fo);
    std::vector<std::pair<double, Trace>> methods;
    for (double d : {1.0, 0.1}) methods.emplace_back(d, simulate_flow(inst.objective, inst.set, inst.x_init, c, d, 100, fo));
    const auto cmp = compare_flow_method(flow, 0.01, methods, c);
    REQUIRE(cmp.rows.size() == 3);
    CHECK(cmp.bound.front() == flow.records.front().f_value - *inst.f_star);
    CHECK(cmp.rows[0].delta == 0.01);

    // Smaller steps leave the bound later (or never).
    auto cross = [](const FlowComparisonRow& r) { return r.crossover.value_or(std::numeric_limits<long>::max()); };
    CHECK(cross(cmp.rows[0]) >= cross(cmp.rows[2]));
    CHECK(cross(cmp.rows[2]) >= cross(cmp.rows[1]));

    RunOptions opts;
    opts.budget = 10000;
    const auto fw = run_solver(inst, {"fw"}, ScheduleSpec{}, opts);
    // The gap decays like 1/k; the suboptimality here decays like 1/k^2 because
    // the gradient at x* is normal to the optimal edge.
    const auto row = compare_flow_method(flow, 0.01, {{1.0, fw}}, c).rows[1];
    CAPTURE(row.terminal_gap_fit.slope);
    CAPTURE(row.terminal_fit.slope);
    CHECK(std::abs(row.terminal_gap_fit.slope + 1.0) <= 0.25);
    CHECK(std::abs(row.terminal_fit.slope + 2.0) <= 0.25);
    CHECK(flow_bound(3.0, 4.0, 0.0) == 3.0);
}
