#pragma once

#include "fwflow/analysis.hpp"
#include "fwflow/core.hpp"
#include "fwflow/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwflow {

/// A generated problem: objective, constraint set, starting point and what is
/// known about the solution.
struct SyntheticInstance {
    std::string id;
    Objective objective;
    FeasibleSet set;
    Vector x_init;
    std::optional<Vector> x_star;
    std::optional<double> f_star;
    // Support of x* (analytic, or thresholded from a reference solve).
    std::optional<std::vector<int>> support;
    // Ground-truth signal for the sensing problems.
    std::optional<Vector> ground_truth;
};

/// 2-D problems f(x) = 1/2 ||x - x_t||^2:
///   1: triangle, x* a vertex;   2: triangle, x* inside an edge;
///   3: triangle, x* interior;   4: unit disk, x_t outside;
///   5: unit disk, x_t inside.
/// Triangle cases start at the centroid, disk cases at (-0.5, 0.5).
SyntheticInstance gen_case_study(int which);

/// min 1/2 ||A x - y||^2 s.t. ||x||_1 <= alpha with A (n x m) iid N(0,1),
/// x0 in R^m with ceil(density m) N(0,1) nonzeros, y = A x0 and
/// alpha = alpha_scale ||x0||_1. Starts at 0.
SyntheticInstance gen_compressed_sensing(int n, int m, double density, double alpha_scale, std::uint64_t seed);

struct SignedCsOptions {
    // L1 radius; defaults to ||x0||_1.
    std::optional<double> alpha;
    // Away-step iterations for the reference f*; 0 skips the reference solve.
    long reference_iterations = 20000;
};

/// Sparse logistic regression on m samples a_i ~ N(0, I_n) with labels
/// sign(a_i^T x0) (0 maps to +1) over the L1 ball.
SyntheticInstance gen_signed_cs(int m, int n, double density, std::uint64_t seed, const SignedCsOptions& opts = {});

/// Scalar Huber toy on [-1, 1], x_init = 1, x* = 0, f* = 0.
SyntheticInstance gen_toy(double eps = 1e-3);

// ---------------------------------------------------------------------------
// libsvm text format
// ---------------------------------------------------------------------------

class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& msg, long line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

struct LibsvmData {
    Matrix rows;
    Vector labels;
};

/// "label idx:val idx:val ..." with 1-based indices. Dense rows of dimension
/// max index. Two distinct labels map to -1 (smaller) and +1 (larger); a
/// single label maps to -1 if it is <= 0 and +1 otherwise.
LibsvmData parse_libsvm(std::istream& in);
LibsvmData load_libsvm(const std::string& path);

// ---------------------------------------------------------------------------
// Trace sinks
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceCsvHeader = "k,grad_calls,f,gap,step,support_size,identified,wall_ms";

struct TraceRow {
    long k;
    long grad_calls;
    double f;
    double gap;
    double step;
    long support_size;
    int identified;
    double wall_ms;

    bool operator==(const TraceRow&) const = default;
};

std::vector<TraceRow> trace_rows(const Trace& trace, bool include_time);
/// wall_ms is written as 0 unless include_time, so repeated runs give
/// identical bytes.
void write_trace_csv(std::ostream& out, const Trace& trace, bool include_time = false);
std::vector<TraceRow> read_trace_csv(std::istream& in);

/// Log-log plot of gap against gradient calls with slope guides at -1 and -1.5.
void write_gap_svg(std::ostream& out, const std::vector<const Trace*>& traces, const std::string& title);

/// Shortest decimal that round-trips.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ProblemSpec {
    // case-study | compressed-sensing | signed-cs | toy | libsvm
    std::string generator = "case-study";
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
};

struct SolverSpec {
    // fw | fw-ls | fw-nesterov | away | gradavg | multistep | avgfw
    std::string name = "fw";
    std::string tableau = "rk44";
};

struct ScheduleSpec {
    double c = 2.0;
    double p = 1.0;
    double delta = 1.0;
    // Separate averaging constant; defaults to c.
    std::optional<double> b;
};

struct ExperimentConfig {
    ProblemSpec problem;
    SolverSpec solver;
    ScheduleSpec schedule;
    long budget = 1000;
    // csv | svg
    std::vector<std::string> outputs{"csv"};
    std::string out_dir = ".";
    bool record_time = false;
    int identification_window = 10;
};

const std::vector<std::string>& solver_names();
const std::vector<std::string>& generator_names();

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Throws std::invalid_argument on unknown ids or out-of-range values.
void validate_config(const ExperimentConfig& cfg);

SyntheticInstance make_instance(const ProblemSpec& spec);

struct RunOptions {
    long budget = 1000;
    bool keep_points = false;
    int identification_window = 10;
};

/// Runs one solver on an instance until the next step would exceed the
/// gradient-call budget. Records every iterate.
Trace run_solver(const SyntheticInstance& inst, const SolverSpec& solver, const ScheduleSpec& schedule,
                 const RunOptions& opts);

std::string solver_id(const SolverSpec& solver, const ScheduleSpec& schedule);

struct ExperimentResult {
    Trace trace;
    std::vector<std::string> files;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs every config (up to `jobs` at a time) and writes manifest.json into
/// manifest_dir.
std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig>& configs, const std::string& manifest_dir,
                                        int jobs = 1);

}  // namespace fwflow
