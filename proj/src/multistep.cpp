#include "fwflow/multistep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fwflow {

namespace {

RKTableau make(std::string name, std::initializer_list<std::initializer_list<double>> a,
               std::initializer_list<double> beta, std::initializer_list<double> omega) {
    const auto q = static_cast<Eigen::Index>(beta.size());
    RKTableau t;
    t.name = std::move(name);
    t.A = Matrix::Zero(q, q);
    Eigen::Index i = 0;
    for (const auto& row : a) {
        Eigen::Index j = 0;
        for (double v : row) t.A(i, j++) = v;
        ++i;
    }
    t.beta = Vector(q);
    i = 0;
    for (double v : beta) t.beta[i++] = v;
    t.omega = Vector(q);
    i = 0;
    for (double v : omega) t.omega[i++] = v;
    return t;
}

// Accepts plain decimals and simple fractions "p/q".
double parse_number(const std::string& tok) {
    auto parse_plain = [&](std::string_view sv) {
        double v = 0.0;
        const auto* first = sv.data();
        const auto* last = sv.data() + sv.size();
        if (!sv.empty() && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) throw std::invalid_argument("tableau: bad number '" + tok + "'");
        return v;
    };
    const auto slash = tok.find('/');
    if (slash == std::string::npos) return parse_plain(tok);
    const std::string_view sv(tok);
    const double den = parse_plain(sv.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("tableau: zero denominator in '" + tok + "'");
    return parse_plain(sv.substr(0, slash)) / den;
}

}  // namespace

void RKTableau::validate(double tol) const {
    const auto q = beta.size();
    if (q < 1) throw std::invalid_argument("tableau " + name + ": no stages");
    if (A.rows() != q || A.cols() != q || omega.size() != q)
        throw std::invalid_argument("tableau " + name + ": inconsistent shapes");
    if (!A.allFinite() || !beta.allFinite() || !omega.allFinite())
        throw std::invalid_argument("tableau " + name + ": non-finite entries");
    for (Eigen::Index i = 0; i < q; ++i)
        for (Eigen::Index j = i; j < q; ++j)
            if (A(i, j) != 0.0)
                throw std::invalid_argument("tableau " + name + ": A must be strictly lower triangular");
    if (std::abs(beta.sum() - 1.0) > tol) throw std::invalid_argument("tableau " + name + ": beta must sum to 1");
    if (omega[0] != 0.0) throw std::invalid_argument("tableau " + name + ": omega_1 must be 0");
}

RKTableau RKTableau::euler() { return make("euler", {{0.0}}, {1.0}, {0.0}); }

RKTableau RKTableau::midpoint() { return make("midpoint", {{0, 0}, {0.5, 0}}, {0, 1}, {0, 0.5}); }

RKTableau RKTableau::rk44() {
    return make("rk44", {{0, 0, 0, 0}, {0.5, 0, 0, 0}, {0, 0.5, 0, 0}, {0, 0, 1, 0}},
                {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6}, {0, 0.5, 0.5, 1});
}

RKTableau RKTableau::rk38() {
    return make("rk38", {{0, 0, 0, 0}, {1.0 / 3, 0, 0, 0}, {-1.0 / 3, 1, 0, 0}, {1, -1, 1, 0}},
                {1.0 / 8, 3.0 / 8, 3.0 / 8, 1.0 / 8}, {0, 1.0 / 3, 2.0 / 3, 1});
}

RKTableau RKTableau::rk5() {
    return make("rk5",
                {{0, 0, 0, 0, 0, 0},
                 {1.0 / 4, 0, 0, 0, 0, 0},
                 {1.0 / 8, 1.0 / 8, 0, 0, 0, 0},
                 {0, -1.0 / 2, 1, 0, 0, 0},
                 {3.0 / 16, 0, 0, 9.0 / 16, 0, 0},
                 {-3.0 / 7, 2.0 / 7, 12.0 / 7, -12.0 / 7, 8.0 / 7, 0}},
                {7.0 / 90, 0, 32.0 / 90, 12.0 / 90, 32.0 / 90, 7.0 / 90}, {0, 0.25, 0.25, 0.5, 0.75, 1});
}

std::vector<RKTableau> RKTableau::builtins() { return {euler(), midpoint(), rk44(), rk38(), rk5()}; }

RKTableau RKTableau::by_name(const std::string& name) {
    for (auto& t : builtins())
        if (t.name == name) return t;
    if (name == "rk4") return rk44();
    throw std::invalid_argument("unknown tableau '" + name + "' (expected euler, midpoint, rk44, rk38, rk5)");
}

RKTableau RKTableau::parse(std::istream& in, std::string name) {
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    if (tokens.empty()) throw std::invalid_argument("tableau: empty input");
    const double qd = parse_number(tokens[0]);
    if (qd < 1 || qd != std::floor(qd) || qd > 64) throw std::invalid_argument("tableau: bad stage count");
    const auto q = static_cast<Eigen::Index>(qd);
    const auto expected = static_cast<std::size_t>(1 + q * q + 2 * q);
    if (tokens.size() != expected) {
        std::ostringstream os;
        os << "tableau: expected " << expected << " numbers for q=" << q << ", got " << tokens.size();
        throw std::invalid_argument(os.str());
    }
    RKTableau t;
    t.name = std::move(name);
    t.A = Matrix(q, q);
    t.beta = Vector(q);
    t.omega = Vector(q);
    std::size_t pos = 1;
    for (Eigen::Index i = 0; i < q; ++i)
        for (Eigen::Index j = 0; j < q; ++j) t.A(i, j) = parse_number(tokens[pos++]);
    for (Eigen::Index i = 0; i < q; ++i) t.beta[i] = parse_number(tokens[pos++]);
    for (Eigen::Index i = 0; i < q; ++i) t.omega[i] = parse_number(tokens[pos++]);
    t.validate(1e-9);
    return t;
}

RKTableau RKTableau::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tableau file '" + path + "'");
    auto name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    return parse(in, name);
}

FeasibilityCertificate build_certificate(const RKTableau& tab, double c, long k) {
    if (!(c > 1.0)) throw std::invalid_argument("build_certificate: c must be > 1");
    if (k < 0) throw std::invalid_argument("build_certificate: k must be >= 0");
    const auto q = tab.beta.size();
    FeasibilityCertificate cert;
    cert.k = k;
    cert.gamma_bar = Vector(q);
    for (Eigen::Index i = 0; i < q; ++i) cert.gamma_bar[i] = c / (c + static_cast<double>(k) + tab.omega[i]);
    const Matrix gamma = cert.gamma_bar.asDiagonal();
    // P (I + A^T G) = G  <=>  (I + G A) P^T = G, a unit lower-triangular system.
    const Matrix lower = Matrix::Identity(q, q) + gamma * tab.A;
    const Matrix pt = lower.triangularView<Eigen::UnitLower>().solve(gamma);
    cert.P = pt.transpose();
    cert.z = static_cast<double>(q) * cert.P * tab.beta;
    cert.feasible = (cert.z.array() >= 0.0).all() && (cert.z.array() <= 1.0).all();
    return cert;
}

double FeasibilityCertificate::residual(const RKTableau& tab) const {
    const auto q = gamma_bar.size();
    const Matrix gamma = gamma_bar.asDiagonal();
    return (P * (Matrix::Identity(q, q) + tab.A.transpose() * gamma) - gamma).cwiseAbs().maxCoeff();
}

bool certified_feasible(const RKTableau& tab, double c, long k_first, long k_last) {
    for (long k = k_first; k <= k_last; ++k)
        if (!build_certificate(tab, c, k).feasible) return false;
    return true;
}

SolverState multistep_step(SolverState state, const Objective& obj, const FeasibleSet& set,
                           const RKTableau& tab, double c, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("multistep_step: delta must lie in (0,1]");
    const auto q = tab.stages();
    std::vector<Vector> xi(static_cast<std::size_t>(q));
    std::set<int> support;
    const double k = static_cast<double>(state.k);
    for (int i = 0; i < q; ++i) {
        Vector xbar = state.x;
        for (int j = 0; j < i; ++j)
            if (tab.A(i, j) != 0.0) xbar += tab.A(i, j) * xi[static_cast<std::size_t>(j)];
        const Vector s = set.lmo(obj.gradient(xbar));
        const double rate = c / (c + (k + tab.omega[i]) * delta);
        xi[static_cast<std::size_t>(i)] = (delta * rate) * (s - xbar);
        for (int idx : support_of(s)) support.insert(idx);
    }
    Vector next = state.x;
    for (int i = 0; i < q; ++i) next += tab.beta[i] * xi[static_cast<std::size_t>(i)];
    state.x = std::move(next);
    state.grad_calls += q;
    state.last_step = delta * c / (c + k * delta);
    state.k += 1;
    state.last_atom_support.assign(support.begin(), support.end());
    return state;
}

Vector rk_step(const RKTableau& tab, const OdeRhs& rhs, double t, const Vector& y, double h) {
    const auto q = tab.stages();
    std::vector<Vector> slopes(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        Vector yi = y;
        for (int j = 0; j < i; ++j)
            if (tab.A(i, j) != 0.0) yi += (h * tab.A(i, j)) * slopes[static_cast<std::size_t>(j)];
        slopes[static_cast<std::size_t>(i)] = rhs(t + tab.omega[i] * h, yi);
    }
    Vector out = y;
    for (int i = 0; i < q; ++i) out += (h * tab.beta[i]) * slopes[static_cast<std::size_t>(i)];
    return out;
}

Vector rk_integrate(const RKTableau& tab, const OdeRhs& rhs, const Vector& y0, double h, double t_end) {
    if (!(h > 0.0)) throw std::invalid_argument("rk_integrate: step must be positive");
    const long steps = std::lround(t_end / h);
    if (std::abs(static_cast<double>(steps) * h - t_end) > 1e-9 * std::max(1.0, t_end))
        throw std::invalid_argument("rk_integrate: t_end must be a multiple of h");
    Vector y = y0;
    for (long n = 0; n < steps; ++n) y = rk_step(tab, rhs, static_cast<double>(n) * h, y, h);
    return y;
}

Trace simulate_flow(const Objective& obj, const FeasibleSet& set, const Vector& x0, double c, double delta,
                    double horizon, const FlowOptions& opts, const RKTableau& tab) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("simulate_flow: delta must lie in (0,1]");
    const double per_unit_d = 1.0 / delta;
    const long per_unit = std::lround(per_unit_d);
    if (std::abs(per_unit_d - static_cast<double>(per_unit)) > 1e-9 * per_unit_d)
        throw std::invalid_argument("simulate_flow: 1/delta must be an integer");
    if (horizon < 0 || horizon != std::floor(horizon))
        throw std::invalid_argument("simulate_flow: horizon must be a nonnegative integer");
    const long T = static_cast<long>(horizon);

    TraceRecorder rec(obj, set, opts.f_star, opts.keep_points);
    SolverState state = SolverState::at(x0);
    rec.record(0, 0, state.x, 0.0);
    for (long t = 1; t <= T; ++t) {
        for (long sub = 0; sub < per_unit; ++sub) {
            if (sub > 0) rec.keep_point(state.x);
            state = multistep_step(std::move(state), obj, set, tab, c, delta);
        }
        rec.set_last_step(state.last_step);
        rec.record(t, state.grad_calls, state.x, 0.0);
    }
    std::ostringstream solver;
    solver << "flow-" << tab.name << "-d" << delta;
    return rec.finish("", solver.str());
}

}  // namespace fwflow
