#include "fwflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fwflow {

namespace {

// Minimizer of ||sum_i a_i p_i|| subject to sum_i a_i = 1 over the columns of B.
Vector affine_minimizer(const Matrix& B) {
    const auto s = B.cols();
    Matrix kkt = Matrix::Zero(s + 1, s + 1);
    kkt.topLeftCorner(s, s) = B.transpose() * B;
    kkt.block(0, s, s, 1).setOnes();
    kkt.block(s, 0, 1, s).setOnes();
    Vector rhs = Vector::Zero(s + 1);
    rhs[s] = 1.0;
    const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    return sol.head(s);
}

}  // namespace

double distance_to_hull(const std::vector<Vector>& points, const Vector& x) {
    if (points.empty()) throw std::invalid_argument("distance_to_hull: no points");
    const auto n = x.size();
    std::vector<Vector> p;
    p.reserve(points.size());
    double scale = 0.0;
    for (const auto& v : points) {
        require_dim(n, v.size(), "distance_to_hull");
        p.push_back(v - x);
        scale = std::max(scale, p.back().squaredNorm());
    }
    if (scale == 0.0) return 0.0;

    constexpr double kOptTol = 1e-15;
    constexpr double kPosTol = 1e-13;

    std::size_t start = 0;
    for (std::size_t j = 1; j < p.size(); ++j)
        if (p[j].squaredNorm() < p[start].squaredNorm()) start = j;

    std::vector<std::size_t> active{start};
    std::vector<double> weight{1.0};
    Vector y = p[start];

    const int max_major = 50 * static_cast<int>(p.size()) + 100;
    for (int major = 0; major < max_major; ++major) {
        if (y.squaredNorm() <= kOptTol * scale) return y.norm();
        std::size_t j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double v = y.dot(p[i]);
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (y.squaredNorm() - best <= kOptTol * scale) break;
        if (std::find(active.begin(), active.end(), j) != active.end()) break;
        active.push_back(j);
        weight.push_back(0.0);

        for (int minor = 0; minor < 10 * static_cast<int>(p.size()) + 10; ++minor) {
            Matrix B(n, static_cast<Eigen::Index>(active.size()));
            for (std::size_t i = 0; i < active.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = p[active[i]];
            const Vector alpha = affine_minimizer(B);
            if ((alpha.array() > kPosTol).all()) {
                for (std::size_t i = 0; i < active.size(); ++i) weight[i] = alpha[static_cast<Eigen::Index>(i)];
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < active.size(); ++i) {
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (a <= kPosTol && weight[i] - a > 0.0) theta = std::min(theta, weight[i] / (weight[i] - a));
            }
            for (std::size_t i = 0; i < active.size(); ++i)
                weight[i] += theta * (alpha[static_cast<Eigen::Index>(i)] - weight[i]);
            std::vector<std::size_t> keep_idx;
            std::vector<double> keep_w;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (weight[i] > kPosTol) {
                    keep_idx.push_back(active[i]);
                    keep_w.push_back(weight[i]);
                }
            }
            if (keep_idx.empty()) {
                // Degenerate; fall back to the newest point.
                keep_idx.push_back(active.back());
                keep_w.push_back(1.0);
            }
            double total = 0.0;
            for (double w : keep_w) total += w;
            for (double& w : keep_w) w /= total;
            active = std::move(keep_idx);
            weight = std::move(keep_w);
            if (active.size() == 1) break;
        }
        y.setZero();
        for (std::size_t i = 0; i < active.size(); ++i) y += weight[i] * p[active[i]];
    }
    return y.norm();
}

}  // namespace fwflow
