#include "fwflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fwflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// sign(0) = +1
inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Lowest index among maximal |g_i|.
Eigen::Index argmax_abs(const Vector& g) {
    Eigen::Index best = 0;
    double best_val = std::abs(g[0]);
    for (Eigen::Index i = 1; i < g.size(); ++i) {
        const double a = std::abs(g[i]);
        if (a > best_val) {
            best_val = a;
            best = i;
        }
    }
    return best;
}

Eigen::Index argmin_entry(const Vector& g) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < g.size(); ++i)
        if (g[i] < g[best]) best = i;
    return best;
}

double log1p_exp_neg(double t) {
    // log(1 + exp(-t)), branch at t = 0
    if (t >= 0.0) return std::log1p(std::exp(-t));
    return -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t))
double sigmoid_neg(double t) {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

void check_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
    if (expected != got) {
        std::ostringstream os;
        os << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
        throw DimensionError(os.str());
    }
}

std::vector<int> support_of(const Vector& v, double threshold) {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > threshold) out.push_back(static_cast<int>(i));
    return out;
}

// ---------------------------------------------------------------------------
// FeasibleSet
// ---------------------------------------------------------------------------

FeasibleSet::FeasibleSet(Variant v, Eigen::Index dim) : set_(std::move(v)), dim_(dim) {
    diameter_ = std::visit(
        overloaded{
            [](const L1Ball& s) { return 2.0 * s.radius; },
            [](const Box& s) { return (s.hi - s.lo).norm(); },
            [](const Simplex& s) { return s.scale * std::sqrt(2.0); },
            [](const L2Ball& s) { return 2.0 * s.radius; },
            [](const Polytope& s) {
                double d = 0.0;
                for (std::size_t i = 0; i < s.vertices.size(); ++i)
                    for (std::size_t j = i + 1; j < s.vertices.size(); ++j)
                        d = std::max(d, (s.vertices[i] - s.vertices[j]).norm());
                return d;
            },
        },
        set_);
}

FeasibleSet FeasibleSet::l1_ball(Eigen::Index dim, double radius) {
    if (dim < 1 || !(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("l1_ball: need dim >= 1 and finite radius > 0");
    return FeasibleSet(L1Ball{radius}, dim);
}

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
    require_dim(lo.size(), hi.size(), "box");
    if (lo.size() < 1) throw std::invalid_argument("box: empty bounds");
    check_finite(lo, "box");
    check_finite(hi, "box");
    if ((lo.array() > hi.array()).any()) throw std::invalid_argument("box: lo > hi");
    const auto n = lo.size();
    return FeasibleSet(Box{std::move(lo), std::move(hi)}, n);
}

FeasibleSet FeasibleSet::box(Eigen::Index dim, double lo, double hi) {
    return box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

FeasibleSet FeasibleSet::simplex(Eigen::Index dim, double scale) {
    if (dim < 1 || !(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("simplex: need dim >= 1 and finite scale > 0");
    return FeasibleSet(Simplex{scale}, dim);
}

FeasibleSet FeasibleSet::l2_ball(Eigen::Index dim, double radius) {
    if (dim < 1 || !(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("l2_ball: need dim >= 1 and finite radius > 0");
    return FeasibleSet(L2Ball{radius}, dim);
}

FeasibleSet FeasibleSet::polytope(std::vector<Vector> vertices) {
    if (vertices.empty()) throw std::invalid_argument("polytope: empty vertex list");
    const auto n = vertices.front().size();
    if (n < 1) throw std::invalid_argument("polytope: zero-dimensional vertices");
    for (const auto& v : vertices) {
        require_dim(n, v.size(), "polytope");
        check_finite(v, "polytope");
    }
    return FeasibleSet(Polytope{std::move(vertices)}, n);
}

std::string FeasibleSet::name() const {
    return std::visit(overloaded{
                          [](const L1Ball&) { return std::string("l1ball"); },
                          [](const Box&) { return std::string("box"); },
                          [](const Simplex&) { return std::string("simplex"); },
                          [](const L2Ball&) { return std::string("l2ball"); },
                          [](const Polytope&) { return std::string("polytope"); },
                      },
                      set_);
}

Vector FeasibleSet::lmo(const Vector& g) const {
    require_dim(dim_, g.size(), "lmo");
    if (!g.allFinite()) throw std::invalid_argument("lmo: non-finite gradient");
    return std::visit(
        overloaded{
            [&](const L1Ball& s) -> Vector {
                Vector out = Vector::Zero(dim_);
                const auto i = argmax_abs(g);
                out[i] = -sign_of(g[i]) * s.radius;
                return out;
            },
            [&](const Box& s) -> Vector {
                Vector out(dim_);
                for (Eigen::Index i = 0; i < dim_; ++i) out[i] = g[i] < 0.0 ? s.hi[i] : s.lo[i];
                return out;
            },
            [&](const Simplex& s) -> Vector {
                Vector out = Vector::Zero(dim_);
                out[argmin_entry(g)] = s.scale;
                return out;
            },
            [&](const L2Ball& s) -> Vector {
                const double nrm = g.norm();
                if (nrm == 0.0) {
                    Vector out = Vector::Zero(dim_);
                    out[0] = -s.radius;
                    return out;
                }
                return (-s.radius / nrm) * g;
            },
            [&](const Polytope& s) -> Vector {
                std::size_t best = 0;
                double best_val = g.dot(s.vertices[0]);
                for (std::size_t i = 1; i < s.vertices.size(); ++i) {
                    const double v = g.dot(s.vertices[i]);
                    if (v < best_val) {
                        best_val = v;
                        best = i;
                    }
                }
                return s.vertices[best];
            },
        },
        set_);
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
    require_dim(dim_, x.size(), "membership");
    if (tol < 0.0) throw std::invalid_argument("membership: tol must be nonnegative");
    if (!x.allFinite()) return false;
    return std::visit(overloaded{
                          [&](const L1Ball& s) { return x.lpNorm<1>() <= s.radius + tol; },
                          [&](const Box& s) {
                              return ((x - s.lo).array() >= -tol).all() &&
                                     ((s.hi - x).array() >= -tol).all();
                          },
                          [&](const Simplex& s) {
                              return (x.array() >= -tol).all() && std::abs(x.sum() - s.scale) <= tol;
                          },
                          [&](const L2Ball& s) { return x.norm() <= s.radius + tol; },
                          [&](const Polytope& s) {
                              for (const auto& v : s.vertices)
                                  if ((v - x).norm() <= tol) return true;
                              return distance_to_hull(s.vertices, x) <= tol;
                          },
                      },
                      set_);
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

namespace {

// Extreme eigenvalues of M^T M / scale.
std::pair<double, double> gram_spectrum(const Matrix& M, double scale) {
    const Matrix G = M.transpose() * M / scale;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {std::max(0.0, ev.minCoeff()), ev.maxCoeff()};
}

}  // namespace

Objective::Objective(Variant v, Eigen::Index dim) : obj_(std::move(v)), dim_(dim) {}

Objective Objective::quadratic(Matrix A, Vector y) {
    require_dim(A.rows(), y.size(), "quadratic");
    if (A.cols() < 1) throw std::invalid_argument("quadratic: A has no columns");
    if (!A.allFinite() || !y.allFinite()) throw std::invalid_argument("quadratic: non-finite data");
    const auto n = A.cols();
    Objective obj(Quadratic{std::move(A), std::move(y)}, n);
    const auto& q = std::get<Quadratic>(obj.obj_);
    const auto [lo, hi] = gram_spectrum(q.A, 1.0);
    obj.smoothness_ = hi;
    obj.strong_convexity_ = lo;
    return obj;
}

Objective Objective::least_squares_target(Vector target) {
    if (target.size() < 1) throw std::invalid_argument("least_squares_target: empty target");
    check_finite(target, "least_squares_target");
    const auto n = target.size();
    Objective obj(LeastSquaresTarget{std::move(target)}, n);
    obj.smoothness_ = 1.0;
    obj.strong_convexity_ = 1.0;
    return obj;
}

Objective Objective::logistic(Matrix features, Vector labels) {
    require_dim(features.rows(), labels.size(), "logistic");
    if (features.rows() < 1 || features.cols() < 1)
        throw std::invalid_argument("logistic: empty feature matrix");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        if (labels[i] != 1.0 && labels[i] != -1.0)
            throw std::invalid_argument("logistic: labels must be -1 or +1");
    if (!features.allFinite()) throw std::invalid_argument("logistic: non-finite features");
    const auto n = features.cols();
    const double m = static_cast<double>(features.rows());
    Objective obj(Logistic{std::move(features), std::move(labels)}, n);
    const auto& l = std::get<Logistic>(obj.obj_);
    obj.smoothness_ = gram_spectrum(l.features, 4.0 * m).second;
    return obj;
}

Objective Objective::huber_toy(double eps, Eigen::Index dim) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("huber_toy: eps must be > 0");
    if (dim < 1) throw std::invalid_argument("huber_toy: dim must be >= 1");
    Objective obj(HuberToy{eps, dim}, dim);
    obj.smoothness_ = 1.0;
    return obj;
}

std::string Objective::name() const {
    return std::visit(overloaded{
                          [](const Quadratic&) { return std::string("quadratic"); },
                          [](const LeastSquaresTarget&) { return std::string("least-squares-target"); },
                          [](const Logistic&) { return std::string("logistic"); },
                          [](const HuberToy&) { return std::string("huber-toy"); },
                      },
                      obj_);
}

bool Objective::is_quadratic() const {
    return std::holds_alternative<Quadratic>(obj_) || std::holds_alternative<LeastSquaresTarget>(obj_);
}

ValueGrad Objective::value_and_grad(const Vector& x) const {
    require_dim(dim_, x.size(), "objective");
    return std::visit(
        overloaded{
            [&](const Quadratic& q) {
                const Vector r = q.A * x - q.y;
                return ValueGrad{0.5 * r.squaredNorm(), q.A.transpose() * r};
            },
            [&](const LeastSquaresTarget& t) {
                Vector r = x - t.target;
                const double v = 0.5 * r.squaredNorm();
                return ValueGrad{v, std::move(r)};
            },
            [&](const Logistic& l) {
                const Vector margins = l.features * x;
                const double m = static_cast<double>(l.labels.size());
                double v = 0.0;
                Vector w(l.labels.size());
                for (Eigen::Index i = 0; i < w.size(); ++i) {
                    const double t = l.labels[i] * margins[i];
                    v += log1p_exp_neg(t);
                    w[i] = -l.labels[i] * sigmoid_neg(t) / m;
                }
                return ValueGrad{v / m, l.features.transpose() * w};
            },
            [&](const HuberToy& h) {
                double v = 0.0;
                Vector g(x.size());
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    const double xi = x[i];
                    if (std::abs(xi) < h.eps) {
                        v += 0.5 * xi * xi;
                        g[i] = xi;
                    } else {
                        v += h.eps * std::abs(xi) - 0.5 * h.eps * h.eps;
                        g[i] = sign_of(xi) * h.eps;
                    }
                }
                return ValueGrad{v, std::move(g)};
            },
        },
        obj_);
}

double Objective::value(const Vector& x) const {
    require_dim(dim_, x.size(), "objective");
    if (const auto* q = std::get_if<Quadratic>(&obj_)) return 0.5 * (q->A * x - q->y).squaredNorm();
    return value_and_grad(x).value;
}

Vector Objective::gradient(const Vector& x) const { return value_and_grad(x).grad; }

std::optional<double> Objective::curvature(const Vector& d) const {
    require_dim(dim_, d.size(), "curvature");
    if (const auto* q = std::get_if<Quadratic>(&obj_)) return (q->A * d).squaredNorm();
    if (std::holds_alternative<LeastSquaresTarget>(obj_)) return d.squaredNorm();
    return std::nullopt;
}

}  // namespace fwflow
