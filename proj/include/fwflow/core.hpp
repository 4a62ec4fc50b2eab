#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fwflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when operands disagree on dimension.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what);

// ---------------------------------------------------------------------------
// Feasible sets
// ---------------------------------------------------------------------------

struct L1Ball {
    double radius;
};

struct Box {
    Vector lo;
    Vector hi;
};

// {x >= 0, sum(x) = scale}
struct Simplex {
    double scale;
};

struct L2Ball {
    double radius;
};

struct Polytope {
    std::vector<Vector> vertices;
};

/// A compact convex set with a linear minimization oracle.
///
/// LMO ties go to the lowest index, and sign(0) is taken as +1, so a zero
/// gradient returns lo on a Box, -radius*e_0 on an L1 ball and -radius*e_0 on
/// an L2 ball.
class FeasibleSet {
public:
    using Variant = std::variant<L1Ball, Box, Simplex, L2Ball, Polytope>;

    static FeasibleSet l1_ball(Eigen::Index dim, double radius);
    static FeasibleSet box(Vector lo, Vector hi);
    static FeasibleSet box(Eigen::Index dim, double lo, double hi);
    static FeasibleSet simplex(Eigen::Index dim, double scale = 1.0);
    static FeasibleSet l2_ball(Eigen::Index dim, double radius);
    static FeasibleSet polytope(std::vector<Vector> vertices);

    Eigen::Index dimension() const { return dim_; }
    const Variant& variant() const { return set_; }
    std::string name() const;

    /// argmin over s in the set of g's.
    Vector lmo(const Vector& g) const;
    bool contains(const Vector& x, double tol = 0.0) const;
    /// Exact Euclidean diameter.
    double diameter() const { return diameter_; }

private:
    FeasibleSet(Variant v, Eigen::Index dim);

    Variant set_;
    Eigen::Index dim_;
    double diameter_;
};

// Free-function spellings used throughout the solvers.
inline Vector lmo(const FeasibleSet& set, const Vector& g) { return set.lmo(g); }
inline bool membership(const FeasibleSet& set, const Vector& x, double tol) {
    return set.contains(x, tol);
}

/// Euclidean distance from x to the convex hull of the given points
/// (Wolfe's minimum-norm-point algorithm).
double distance_to_hull(const std::vector<Vector>& points, const Vector& x);

// ---------------------------------------------------------------------------
// Objectives
// ---------------------------------------------------------------------------

// f(x) = 1/2 ||A x - y||^2
struct Quadratic {
    Matrix A;
    Vector y;
};

// f(x) = 1/2 ||x - target||^2
struct LeastSquaresTarget {
    Vector target;
};

// f(x) = 1/m sum_i log(1 + exp(-y_i a_i^T x)), rows of `features` are a_i.
struct Logistic {
    Matrix features;
    Vector labels;
};

// Separable scaled Huber: x^2/2 inside |x| < eps, eps|x| - eps^2/2 outside.
struct HuberToy {
    double eps;
    Eigen::Index dim = 1;
};

struct ValueGrad {
    double value;
    Vector grad;
};

class Objective {
public:
    using Variant = std::variant<Quadratic, LeastSquaresTarget, Logistic, HuberToy>;

    static Objective quadratic(Matrix A, Vector y);
    static Objective least_squares_target(Vector target);
    static Objective logistic(Matrix features, Vector labels);
    static Objective huber_toy(double eps, Eigen::Index dim = 1);

    Eigen::Index dimension() const { return dim_; }
    const Variant& variant() const { return obj_; }
    std::string name() const;

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    ValueGrad value_and_grad(const Vector& x) const;

    /// d^T H d for objectives with constant Hessian; empty otherwise.
    std::optional<double> curvature(const Vector& d) const;
    bool is_quadratic() const;

    std::optional<double> smoothness() const { return smoothness_; }
    std::optional<double> strong_convexity() const { return strong_convexity_; }

private:
    Objective(Variant v, Eigen::Index dim);

    Variant obj_;
    Eigen::Index dim_;
    std::optional<double> smoothness_;
    std::optional<double> strong_convexity_;
};

inline ValueGrad objective_value_and_grad(const Objective& obj, const Vector& x) {
    return obj.value_and_grad(x);
}

/// Support (indices of entries with |v_i| > threshold), ascending.
std::vector<int> support_of(const Vector& v, double threshold = 0.0);

}  // namespace fwflow
