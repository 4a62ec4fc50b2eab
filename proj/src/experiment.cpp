#include "fwflow/avgfw.hpp"
#include "fwflow/bench.hpp"
#include "fwflow/multistep.hpp"
#include "fwflow/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace fwflow {

using nlohmann::json;

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names{"fw", "fw-ls", "fw-nesterov", "away", "gradavg", "multistep", "avgfw"};
    return names;
}

const std::vector<std::string>& generator_names() {
    static const std::vector<std::string> names{"case-study", "compressed-sensing", "signed-cs", "toy", "libsvm"};
    return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params() {
    static const std::map<std::string, std::set<std::string>> p{
        {"case-study", {"case"}},
        {"compressed-sensing", {"n", "m", "density", "alpha_scale"}},
        {"signed-cs", {"m", "n", "density", "alpha", "reference_iterations"}},
        {"toy", {"eps"}},
        {"libsvm", {"path", "alpha", "reference_iterations"}},
    };
    return p;
}

template <class T>
T param(const json& params, const char* key, T fallback) {
    if (!params.contains(key)) return fallback;
    return params.at(key).get<T>();
}

bool is_builtin_tableau(const std::string& name) {
    try {
        (void)RKTableau::by_name(name);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

RKTableau resolve_tableau(const std::string& name) {
    if (is_builtin_tableau(name)) return RKTableau::by_name(name);
    return RKTableau::load(name);
}

void split_solver_name(SolverSpec& spec) {
    // Accept "multistep(rk44)" and "multistep:rk44".
    const auto open = spec.name.find_first_of("(:");
    if (open == std::string::npos) return;
    std::string tab = spec.name.substr(open + 1);
    if (!tab.empty() && tab.back() == ')') tab.pop_back();
    spec.name = spec.name.substr(0, open);
    if (!tab.empty()) spec.tableau = tab;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const std::set<std::string> top{"problem", "solver",  "schedule",     "budget",
                                           "outputs", "out_dir", "record_time", "identification_window"};
    for (const auto& [key, _] : j.items())
        if (!top.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

    ExperimentConfig cfg;
    try {
        if (j.contains("problem")) {
            const auto& p = j.at("problem");
            if (p.is_string()) {
                cfg.problem.generator = p.get<std::string>();
            } else {
                cfg.problem.generator = p.value("generator", cfg.problem.generator);
                if (p.contains("params")) cfg.problem.params = p.at("params");
                cfg.problem.seed = p.value("seed", std::uint64_t{0});
            }
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            if (s.is_string()) {
                cfg.solver.name = s.get<std::string>();
            } else {
                cfg.solver.name = s.value("name", cfg.solver.name);
                cfg.solver.tableau = s.value("tableau", cfg.solver.tableau);
            }
            split_solver_name(cfg.solver);
        }
        if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            cfg.schedule.c = s.value("c", cfg.schedule.c);
            cfg.schedule.p = s.value("p", cfg.schedule.p);
            cfg.schedule.delta = s.value("delta", cfg.schedule.delta);
            if (s.contains("b") && !s.at("b").is_null()) cfg.schedule.b = s.at("b").get<double>();
        }
        cfg.budget = j.value("budget", cfg.budget);
        if (j.contains("outputs")) cfg.outputs = j.at("outputs").get<std::vector<std::string>>();
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.record_time = j.value("record_time", cfg.record_time);
        cfg.identification_window = j.value("identification_window", cfg.identification_window);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["problem"] = {{"generator", cfg.problem.generator}, {"params", cfg.problem.params}, {"seed", cfg.problem.seed}};
    j["solver"] = {{"name", cfg.solver.name}, {"tableau", cfg.solver.tableau}};
    j["schedule"] = {{"c", cfg.schedule.c}, {"p", cfg.schedule.p}, {"delta", cfg.schedule.delta}};
    if (cfg.schedule.b) j["schedule"]["b"] = *cfg.schedule.b;
    j["budget"] = cfg.budget;
    j["outputs"] = cfg.outputs;
    j["out_dir"] = cfg.out_dir;
    j["record_time"] = cfg.record_time;
    j["identification_window"] = cfg.identification_window;
    return j;
}

void validate_config(const ExperimentConfig& cfg) {
    const auto& gens = generator_names();
    if (std::find(gens.begin(), gens.end(), cfg.problem.generator) == gens.end())
        throw std::invalid_argument("unknown generator '" + cfg.problem.generator + "'");
    const auto& sols = solver_names();
    if (std::find(sols.begin(), sols.end(), cfg.solver.name) == sols.end())
        throw std::invalid_argument("unknown solver '" + cfg.solver.name + "'");
    if (cfg.solver.name == "multistep") {
        if (!is_builtin_tableau(cfg.solver.tableau) && !std::filesystem::exists(cfg.solver.tableau))
            throw std::invalid_argument("unknown tableau '" + cfg.solver.tableau + "'");
    }
    if (!cfg.problem.params.is_object()) throw std::invalid_argument("problem params must be an object");
    const auto& allowed = allowed_params().at(cfg.problem.generator);
    for (const auto& [key, _] : cfg.problem.params.items())
        if (!allowed.count(key))
            throw std::invalid_argument("unknown parameter '" + key + "' for generator " + cfg.problem.generator);
    if (cfg.problem.generator == "case-study") {
        const int c = param<int>(cfg.problem.params, "case", 2);
        if (c < 1 || c > 5) throw std::invalid_argument("case must be 1..5");
    }
    if (cfg.problem.generator == "libsvm" && !cfg.problem.params.contains("path"))
        throw std::invalid_argument("libsvm generator needs a 'path' parameter");
    if (!(cfg.schedule.c > 1.0)) throw std::invalid_argument("schedule c must be > 1");
    if (!(cfg.schedule.p > 0.0 && cfg.schedule.p <= 1.0)) throw std::invalid_argument("schedule p must lie in (0,1]");
    if (!(cfg.schedule.delta > 0.0 && cfg.schedule.delta <= 1.0))
        throw std::invalid_argument("schedule delta must lie in (0,1]");
    if (cfg.schedule.b && !(*cfg.schedule.b > 1.0)) throw std::invalid_argument("schedule b must be > 1");
    if (cfg.budget <= 0) throw std::invalid_argument("budget must be positive");
    for (const auto& o : cfg.outputs)
        if (o != "csv" && o != "svg") throw std::invalid_argument("unknown output sink '" + o + "'");
    if (cfg.identification_window < 1) throw std::invalid_argument("identification_window must be >= 1");
}

SyntheticInstance make_instance(const ProblemSpec& spec) {
    const auto& p = spec.params;
    if (spec.generator == "case-study") return gen_case_study(param<int>(p, "case", 2));
    if (spec.generator == "compressed-sensing")
        return gen_compressed_sensing(param<int>(p, "n", 500), param<int>(p, "m", 500), param<double>(p, "density", 0.1),
                                      param<double>(p, "alpha_scale", 1.0), spec.seed);
    if (spec.generator == "signed-cs") {
        SignedCsOptions opts;
        if (p.contains("alpha")) opts.alpha = p.at("alpha").get<double>();
        opts.reference_iterations = param<long>(p, "reference_iterations", opts.reference_iterations);
        return gen_signed_cs(param<int>(p, "m", 5000), param<int>(p, "n", 100), param<double>(p, "density", 0.1),
                             spec.seed, opts);
    }
    if (spec.generator == "toy") return gen_toy(param<double>(p, "eps", 1e-3));
    if (spec.generator == "libsvm") {
        const auto path = p.at("path").get<std::string>();
        auto data = load_libsvm(path);
        const auto n = data.rows.cols();
        SyntheticInstance inst{"libsvm-" + std::filesystem::path(path).stem().string(),
                               Objective::logistic(std::move(data.rows), std::move(data.labels)),
                               FeasibleSet::l1_ball(n, param<double>(p, "alpha", 1.0)),
                               Vector::Zero(n),
                               std::nullopt,
                               std::nullopt,
                               std::nullopt,
                               std::nullopt};
        const long iters = param<long>(p, "reference_iterations", 20000);
        if (iters > 0) {
            const auto ref = reference_solve(inst.objective, inst.set, inst.x_init, 1e-12, iters);
            inst.f_star = ref.f - ref.gap;
            inst.x_star = ref.x;
            inst.support = support_of(ref.x, 1e-8);
        }
        return inst;
    }
    throw std::invalid_argument("unknown generator '" + spec.generator + "'");
}

std::string solver_id(const SolverSpec& solver, const ScheduleSpec& schedule) {
    std::string id = solver.name;
    if (solver.name == "multistep") id += "-" + std::filesystem::path(solver.tableau).stem().string();
    if (solver.name == "avgfw" || solver.name == "gradavg") id += "-p" + fmt_num(schedule.p);
    if (schedule.delta != 1.0) id += "-d" + fmt_num(schedule.delta);
    return id;
}

Trace run_solver(const SyntheticInstance& inst, const SolverSpec& solver, const ScheduleSpec& schedule,
                 const RunOptions& opts) {
    const auto& obj = inst.objective;
    const auto& set = inst.set;
    const long budget = opts.budget;
    if (budget <= 0) throw std::invalid_argument("run_solver: budget must be positive");

    StepSchedule step;
    step.c = schedule.c;
    step.validate();
    AveragingSchedule avg;
    avg.c = schedule.c;
    avg.p = schedule.p;
    avg.b = schedule.b;
    avg.validate();
    const double delta = schedule.delta;

    TraceRecorder rec(obj, set, inst.f_star, opts.keep_points);

    auto drive = [&](auto state, long cost, auto&& advance) {
        rec.record(state.k, state.grad_calls, state.x, 0.0);
        while (state.grad_calls + cost <= budget) {
            state = advance(std::move(state));
            rec.set_last_step(state.last_step);
            rec.record(state.k, state.grad_calls, state.x, 0.0);
        }
    };

    const auto& name = solver.name;
    if (name == "fw") {
        if (delta == 1.0) {
            drive(SolverState::at(inst.x_init), 1, [&](SolverState s) { return fw_step(std::move(s), obj, set, step); });
        } else {
            const auto euler = RKTableau::euler();
            drive(SolverState::at(inst.x_init), 1,
                  [&](SolverState s) { return multistep_step(std::move(s), obj, set, euler, schedule.c, delta); });
        }
    } else if (name == "fw-ls") {
        StepSchedule ls = step;
        ls.rule = obj.is_quadratic() ? StepRule::ExactLineSearch : StepRule::Armijo;
        drive(SolverState::at(inst.x_init), 1, [&](SolverState s) { return fw_step(std::move(s), obj, set, ls); });
    } else if (name == "fw-nesterov") {
        drive(SolverState::at(inst.x_init), 1,
              [&](SolverState s) { return nesterov_fw_step(std::move(s), obj, set, step); });
    } else if (name == "away") {
        StepSchedule ls = step;
        ls.rule = obj.is_quadratic() ? StepRule::ExactLineSearch : StepRule::Armijo;
        drive(SolverState::at(inst.x_init), 1, [&](SolverState s) {
            if (!s.active_set) return init_active_set(std::move(s), obj, set);
            return away_step(std::move(s), obj, set, ls);
        });
    } else if (name == "gradavg") {
        drive(SolverState::at(inst.x_init), 1,
              [&](SolverState s) { return grad_avg_fw_step(std::move(s), obj, set, step, avg); });
    } else if (name == "multistep") {
        const auto tab = resolve_tableau(solver.tableau);
        drive(SolverState::at(inst.x_init), tab.stages(),
              [&](SolverState s) { return multistep_step(std::move(s), obj, set, tab, schedule.c, delta); });
    } else if (name == "avgfw") {
        if (delta == 1.0) {
            drive(AvgState::at(inst.x_init), 1,
                  [&](AvgState s) { return avgfw_step(std::move(s), obj, set, step, avg); });
        } else {
            drive(AvgState::at(inst.x_init), 1,
                  [&](AvgState s) { return avgfw_flow_step(std::move(s), obj, set, schedule.c, avg, delta); });
        }
    } else {
        throw std::invalid_argument("unknown solver '" + name + "'");
    }

    Trace trace = rec.finish(inst.id, solver_id(solver, schedule));
    trace.x_star_support = inst.support;
    if (inst.support) annotate_identification(trace, detect_identification(trace, opts.identification_window));
    return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto inst = make_instance(cfg.problem);
    RunOptions opts;
    opts.budget = cfg.budget;
    opts.identification_window = cfg.identification_window;
    ExperimentResult result{run_solver(inst, cfg.solver, cfg.schedule, opts), {}};

    if (!cfg.outputs.empty()) std::filesystem::create_directories(cfg.out_dir);
    const std::string stem = result.trace.problem_id + "__" + result.trace.solver_id;
    for (const auto& sink : cfg.outputs) {
        const auto path = (std::filesystem::path(cfg.out_dir) / (stem + "." + sink)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        if (sink == "csv")
            write_trace_csv(out, result.trace, cfg.record_time);
        else
            write_gap_svg(out, {&result.trace}, stem);
        result.files.push_back(path);
    }
    return result;
}

std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig>& configs, const std::string& manifest_dir,
                                        int jobs) {
    for (const auto& c : configs) validate_config(c);
    jobs = std::max(1, jobs);
    std::vector<ExperimentResult> results;
    results.reserve(configs.size());
    for (std::size_t start = 0; start < configs.size(); start += static_cast<std::size_t>(jobs)) {
        std::vector<std::future<ExperimentResult>> batch;
        const auto end = std::min(configs.size(), start + static_cast<std::size_t>(jobs));
        for (std::size_t i = start; i < end; ++i)
            batch.push_back(std::async(std::launch::async, [&, i] { return run_experiment(configs[i]); }));
        for (auto& f : batch) results.push_back(f.get());
    }

    json manifest = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& t = results[i].trace;
        json entry{{"problem", t.problem_id},
                   {"solver", t.solver_id},
                   {"files", results[i].files},
                   {"config", config_to_json(configs[i])}};
        if (!t.records.empty()) {
            entry["final_gap"] = t.records.back().duality_gap;
            entry["final_f"] = t.records.back().f_value;
            entry["grad_calls"] = t.records.back().grad_calls;
        }
        if (t.f_star) entry["f_star"] = *t.f_star;
        manifest.push_back(std::move(entry));
    }
    std::filesystem::create_directories(manifest_dir);
    std::ofstream out(std::filesystem::path(manifest_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
    return results;
}

}  // namespace fwflow
