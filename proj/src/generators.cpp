#include "fwflow/bench.hpp"
#include "fwflow/rng.hpp"
#include "fwflow/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fwflow {

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

FeasibleSet unit_triangle() { return FeasibleSet::polytope({vec2(0, 0), vec2(1, 0), vec2(0, 1)}); }

SyntheticInstance quadratic_case(std::string id, FeasibleSet set, Vector target, Vector x_init, Vector x_star) {
    auto obj = Objective::least_squares_target(target);
    const double f_star = obj.value(x_star);
    auto support = support_of(x_star);
    return SyntheticInstance{std::move(id),   std::move(obj),     std::move(set), std::move(x_init),
                             std::move(x_star), f_star,           std::move(support), std::nullopt};
}

long support_count(double density, int dim) {
    return std::max(1L, static_cast<long>(std::ceil(density * dim - 1e-9)));
}

// Sorted k-subset of {0..dim-1} via a partial Fisher-Yates shuffle.
std::vector<int> sample_support(Rng& rng, int dim, long count) {
    std::vector<int> idx(static_cast<std::size_t>(dim));
    std::iota(idx.begin(), idx.end(), 0);
    for (long i = 0; i < count; ++i) {
        const auto j = static_cast<long>(i + static_cast<long>(rng.below(static_cast<std::uint64_t>(dim - i))));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
    Matrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = rng.normal();
    return A;
}

Vector sparse_signal(std::uint64_t seed, int dim, double density) {
    Rng support_rng(seed, "support");
    Rng value_rng(seed, "values");
    const auto support = sample_support(support_rng, dim, support_count(density, dim));
    Vector x0 = Vector::Zero(dim);
    for (int i : support) x0[i] = value_rng.normal();
    return x0;
}

std::string fmt_id(const char* prefix, int a, int b, double density, std::uint64_t seed) {
    std::ostringstream os;
    os << prefix << "-" << a << "x" << b << "-d" << density << "-s" << seed;
    return os.str();
}

}  // namespace

SyntheticInstance gen_case_study(int which) {
    const Vector centroid = vec2(1.0 / 3.0, 1.0 / 3.0);
    const Vector disk_start = vec2(-0.5, 0.5);
    switch (which) {
        case 1:
            return quadratic_case("case1", unit_triangle(), vec2(1.5, -0.5), centroid, vec2(1, 0));
        case 2:
            return quadratic_case("case2", unit_triangle(), vec2(0.5, -1.0), centroid, vec2(0.5, 0));
        case 3:
            return quadratic_case("case3", unit_triangle(), vec2(0.25, 0.25), centroid, vec2(0.25, 0.25));
        case 4:
            return quadratic_case("case4", FeasibleSet::l2_ball(2, 1.0), vec2(2, 0), disk_start, vec2(1, 0));
        case 5:
            return quadratic_case("case5", FeasibleSet::l2_ball(2, 1.0), vec2(0.3, 0.2), disk_start, vec2(0.3, 0.2));
        default:
            throw std::invalid_argument("gen_case_study: case must be 1..5");
    }
}

SyntheticInstance gen_compressed_sensing(int n, int m, double density, double alpha_scale, std::uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("gen_compressed_sensing: n and m must be positive");
    if (!(density > 0.0 && density < 1.0)) throw std::invalid_argument("gen_compressed_sensing: density must lie in (0,1)");
    if (!(alpha_scale >= 1.0) || !std::isfinite(alpha_scale))
        throw std::invalid_argument("gen_compressed_sensing: alpha_scale must be >= 1");

    Rng matrix_rng(seed, "matrix");
    Matrix A = gaussian_matrix(matrix_rng, n, m);
    const Vector x0 = sparse_signal(seed, m, density);
    Vector y = A * x0;
    const double alpha = alpha_scale * x0.lpNorm<1>();

    SyntheticInstance inst{fmt_id("cs", n, m, density, seed),
                           Objective::quadratic(std::move(A), std::move(y)),
                           FeasibleSet::l1_ball(m, alpha),
                           Vector::Zero(m),
                           std::nullopt,
                           0.0,
                           std::nullopt,
                           x0};
    if (n >= m) {
        // Full column rank with probability one: x0 is the unique minimizer.
        inst.x_star = x0;
        inst.support = support_of(x0);
    } else {
        const auto ref = reference_solve(inst.objective, inst.set, inst.x_init);
        inst.support = support_of(ref.x, 1e-8);
        inst.x_star = ref.x;
    }
    return inst;
}

SyntheticInstance gen_signed_cs(int m, int n, double density, std::uint64_t seed, const SignedCsOptions& opts) {
    if (n < 1 || m < 1) throw std::invalid_argument("gen_signed_cs: m and n must be positive");
    if (!(density > 0.0 && density < 1.0)) throw std::invalid_argument("gen_signed_cs: density must lie in (0,1)");

    Rng matrix_rng(seed, "matrix");
    Matrix A = gaussian_matrix(matrix_rng, m, n);
    const Vector x0 = sparse_signal(seed, n, density);
    const Vector margins = A * x0;
    Vector labels(m);
    for (int i = 0; i < m; ++i) labels[i] = margins[i] < 0.0 ? -1.0 : 1.0;
    const double alpha = opts.alpha.value_or(x0.lpNorm<1>());
    if (!(alpha > 0.0)) throw std::invalid_argument("gen_signed_cs: alpha must be > 0");

    SyntheticInstance inst{fmt_id("signed-cs", m, n, density, seed),
                           Objective::logistic(std::move(A), std::move(labels)),
                           FeasibleSet::l1_ball(n, alpha),
                           Vector::Zero(n),
                           std::nullopt,
                           std::nullopt,
                           std::nullopt,
                           x0};
    if (opts.reference_iterations > 0) {
        const auto ref = reference_solve(inst.objective, inst.set, inst.x_init, 1e-12, opts.reference_iterations);
        // f(x_ref) - gap(x_ref) is a certified lower bound on f*.
        inst.f_star = ref.f - ref.gap;
        inst.x_star = ref.x;
        inst.support = support_of(ref.x, 1e-8);
    }
    return inst;
}

SyntheticInstance gen_toy(double eps) {
    Vector x_init = Vector::Ones(1);
    return SyntheticInstance{"toy",
                             Objective::huber_toy(eps, 1),
                             FeasibleSet::box(1, -1.0, 1.0),
                             std::move(x_init),
                             Vector::Zero(1),
                             0.0,
                             std::vector<int>{},
                             std::nullopt};
}

}  // namespace fwflow
