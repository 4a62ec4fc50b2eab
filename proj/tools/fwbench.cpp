// fwbench: command line front end for running and comparing the solvers.

#include "fwflow/analysis.hpp"
#include "fwflow/bench.hpp"
#include "fwflow/multistep.hpp"
#include "fwflow/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fwflow;
using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string generator;
    std::vector<std::string> params;
    std::string solver;
    std::string tableau;
    std::optional<double> c, p, delta;
    std::optional<long> budget;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool svg = false;
    int jobs = 1;
    int case_id = 2;
    double horizon = 100;
    long k_max = 10;
    std::vector<double> deltas{1.0, 0.1, 0.01};
    std::vector<int> windows{5, 20};
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// key=value, with the value read as JSON when it parses and as a string otherwise.
void apply_param(json& params, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    params[key] = json::accept(value) ? json::parse(value) : json(value);
}

ExperimentConfig config_from_flags(const Flags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : config_from_json(read_json(f.config));
    if (!f.generator.empty()) cfg.problem.generator = f.generator;
    for (const auto& kv : f.params) apply_param(cfg.problem.params, kv);
    if (f.seed) cfg.problem.seed = *f.seed;
    if (!f.solver.empty()) cfg.solver = config_from_json({{"solver", f.solver}}).solver;
    if (!f.tableau.empty()) cfg.solver.tableau = f.tableau;
    if (f.c) cfg.schedule.c = *f.c;
    if (f.p) cfg.schedule.p = *f.p;
    if (f.delta) cfg.schedule.delta = *f.delta;
    if (f.budget) cfg.budget = *f.budget;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.svg && std::find(cfg.outputs.begin(), cfg.outputs.end(), "svg") == cfg.outputs.end())
        cfg.outputs.push_back("svg");
    return cfg;
}

void print_summary(const ExperimentResult& r) {
    const auto& last = r.trace.records.back();
    std::printf("%-40s k=%-7ld calls=%-7ld f=%-14.8g gap=%.3e\n", r.trace.solver_id.c_str(), last.k,
                last.grad_calls, last.f_value, last.duality_gap);
    for (const auto& file : r.files) std::printf("  wrote %s\n", file.c_str());
}

int cmd_solve(const Flags& f) {
    const auto cfg = config_from_flags(f);
    validate_config(cfg);
    print_summary(run_experiment(cfg));
    return 0;
}

int cmd_sweep(const Flags& f) {
    if (f.config.empty()) throw std::invalid_argument("sweep needs --config with a JSON list of configs");
    const json list = read_json(f.config);
    if (!list.is_array()) throw std::invalid_argument("sweep config must be a JSON array");
    std::vector<ExperimentConfig> configs;
    for (const auto& item : list) {
        auto cfg = config_from_json(item);
        if (!f.out.empty()) cfg.out_dir = f.out;
        if (f.budget) cfg.budget = *f.budget;
        validate_config(cfg);
        configs.push_back(std::move(cfg));
    }
    const std::string manifest_dir = f.out.empty() ? "." : f.out;
    const auto results = run_sweep(configs, manifest_dir, f.jobs);
    for (const auto& r : results) print_summary(r);
    std::printf("%zu traces, manifest in %s\n", results.size(), (fs::path(manifest_dir) / "manifest.json").c_str());
    return 0;
}

int cmd_case_study(const Flags& f) {
    const std::string out = f.out.empty() ? "case-study" : f.out;
    std::vector<ExperimentConfig> configs;
    for (int c = 1; c <= 5; ++c)
        for (const auto& s : solver_names()) {
            ExperimentConfig cfg;
            cfg.problem.params = {{"case", c}};
            cfg.solver.name = s;
            if (!f.tableau.empty()) cfg.solver.tableau = f.tableau;
            if (f.c) cfg.schedule.c = *f.c;
            if (f.p) cfg.schedule.p = *f.p;
            cfg.budget = f.budget.value_or(1000);
            cfg.outputs = {"csv"};
            cfg.out_dir = out;
            validate_config(cfg);
            configs.push_back(std::move(cfg));
        }
    const auto results = run_sweep(configs, out, f.jobs);
    if (f.svg) {
        for (int c = 1; c <= 5; ++c) {
            std::vector<const Trace*> traces;
            for (const auto& r : results)
                if (r.trace.problem_id == "case" + std::to_string(c)) traces.push_back(&r.trace);
            const auto path = fs::path(out) / ("case" + std::to_string(c) + ".svg");
            std::ofstream svg(path);
            write_gap_svg(svg, traces, "case " + std::to_string(c));
        }
    }
    std::printf("%-8s %-28s %12s\n", "problem", "solver", "final gap");
    for (const auto& r : results)
        std::printf("%-8s %-28s %12.3e\n", r.trace.problem_id.c_str(), r.trace.solver_id.c_str(),
                    r.trace.records.back().duality_gap);
    std::printf("%zu traces written to %s\n", results.size(), out.c_str());
    return 0;
}

int cmd_toy(const Flags& f) {
    const auto toy = gen_toy();
    const double c = f.c.value_or(2.0);
    const long k_top = f.budget.value_or(10000);
    std::vector<std::string> names{"euler", "rk44", "rk38"};
    if (!f.tableau.empty()) names = {f.tableau};
    std::vector<long> checkpoints;
    for (long k = 100; k <= k_top; k *= 10) checkpoints.push_back(k);
    if (checkpoints.empty()) throw std::invalid_argument("toy needs --budget >= 100");
    std::printf("%-10s", "tableau");
    for (long k : checkpoints) std::printf("  max k'|x| on [%ld,%ld]", k, 2 * k);
    std::printf("\n");
    for (const auto& name : names) {
        const auto tab = RKTableau::by_name(name);
        std::vector<double> xs{toy.x_init[0]};
        SolverState s = SolverState::at(toy.x_init);
        for (long k = 0; k < 2 * k_top; ++k) {
            s = multistep_step(std::move(s), toy.objective, toy.set, tab, c);
            xs.push_back(s.x[0]);
        }
        std::printf("%-10s", name.c_str());
        for (long k : checkpoints) {
            double best = 0.0;
            for (long kp = k; kp <= 2 * k; ++kp)
                best = std::max(best, static_cast<double>(kp) * std::abs(xs[static_cast<std::size_t>(kp)]));
            std::printf("  %24.6f", best);
        }
        std::printf("\n");
    }
    return 0;
}

int cmd_flow_compare(const Flags& f) {
    const auto inst = gen_case_study(f.case_id);
    const double c = f.c.value_or(4.0);
    FlowOptions fo;
    fo.f_star = inst.f_star;
    const auto flow = simulate_flow(inst.objective, inst.set, inst.x_init, c, 1e-3, f.horizon, fo);
    std::vector<std::pair<double, Trace>> methods;
    for (double d : f.deltas)
        methods.emplace_back(d, simulate_flow(inst.objective, inst.set, inst.x_init, c, d, f.horizon, fo));
    const auto cmp = compare_flow_method(flow, 1e-3, methods, c);
    std::printf("case %d, c=%g, T=%g (flow reference delta=0.001)\n", f.case_id, c, f.horizon);
    std::printf("%-8s %-10s %-14s %-12s %-12s\n", "delta", "crossover", "E(T)", "E slope", "gap slope");
    for (const auto& row : cmp.rows) {
        const std::string cross = row.crossover ? std::to_string(*row.crossover) : "-";
        std::printf("%-8g %-10s %-14.4e %-12.3f %-12.3f\n", row.delta, cross.c_str(), row.terminal_value,
                    row.terminal_fit.slope, row.terminal_gap_fit.slope);
    }
    return 0;
}

int cmd_zigzag(const Flags& f) {
    SignedCsOptions so;
    so.reference_iterations = 0;
    const auto inst = gen_signed_cs(1000, 100, 0.1, f.seed.value_or(1), so);
    std::printf("%s, T=%g time units\n", inst.id.c_str(), f.horizon);
    std::printf("%-8s %-8s", "solver", "delta");
    for (int w : f.windows) std::printf("  W=%-10d", w);
    std::printf("\n");
    auto run = [&](const std::string& solver, double delta) {
        RunOptions opts;
        opts.budget = std::lround(f.horizon / delta);
        opts.keep_points = true;
        ScheduleSpec sch;
        sch.c = f.c.value_or(2.0);
        sch.p = f.p.value_or(1.0);
        sch.delta = delta;
        const auto tr = run_solver(inst, {solver}, sch, opts);
        std::printf("%-8s %-8g", solver.c_str(), delta);
        for (int w : f.windows) std::printf("  %-12.5g", zigzag_energy(tr.points, w).mean_energy);
        std::printf("\n");
    };
    for (double d : f.deltas) run("fw", d);
    run("avgfw", 1.0);
    return 0;
}

int cmd_certify(const Flags& f) {
    const auto tab = f.tableau.empty() ? RKTableau::rk44()
                     : fs::exists(f.tableau) ? RKTableau::load(f.tableau)
                                             : RKTableau::by_name(f.tableau);
    const double c = f.c.value_or(2.0);
    std::printf("%s, c=%g\n%-5s", tab.name.c_str(), c, "k");
    for (Eigen::Index i = 0; i < tab.A.rows(); ++i) std::printf(" %8s", ("z" + std::to_string(i + 1)).c_str());
    std::printf("  feasible\n");
    for (long k = 0; k <= f.k_max; ++k) {
        const auto cert = build_certificate(tab, c, k);
        std::printf("%-5ld", k);
        for (Eigen::Index i = 0; i < cert.z.size(); ++i) std::printf(" %8.4f", cert.z[i]);
        std::printf("  %s\n", cert.feasible ? "yes" : "no");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frank-Wolfe flow benchmarks"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--solver", f.solver, "fw | fw-ls | fw-nesterov | away | gradavg | multistep | avgfw");
        sub->add_option("--tableau", f.tableau, "euler | midpoint | rk44 | rk38 | rk5 | tableau file");
        sub->add_option("--c", f.c, "step-size constant");
        sub->add_option("--p", f.p, "averaging exponent");
        sub->add_option("--delta", f.delta, "time step");
        sub->add_option("--budget", f.budget, "gradient-call budget");
        sub->add_option("--seed", f.seed, "instance seed");
        sub->add_option("--out", f.out, "output directory");
        sub->add_flag("--svg", f.svg, "also write SVG plots");
    };

    auto* solve = app.add_subcommand("solve", "run one experiment");
    add_common(solve);
    solve->add_option("--generator", f.generator, "case-study | compressed-sensing | signed-cs | toy | libsvm");
    solve->add_option("--param", f.params, "generator parameter key=value (repeatable)");

    auto* sweep = app.add_subcommand("sweep", "run a JSON list of experiments");
    add_common(sweep);
    sweep->add_option("--jobs", f.jobs, "parallel experiments")->check(CLI::PositiveNumber);

    auto* cases = app.add_subcommand("case-study", "all solvers on the five 2-D cases");
    add_common(cases);
    cases->add_option("--jobs", f.jobs, "parallel experiments")->check(CLI::PositiveNumber);

    auto* toy = app.add_subcommand("toy", "k|x_k| on the Huber toy for multistep tableaus");
    add_common(toy);

    auto* flow = app.add_subcommand("flow-compare", "discretizations of the flow against its bound");
    add_common(flow);
    flow->add_option("--case", f.case_id, "case study 1..5")->check(CLI::Range(1, 5));
    flow->add_option("--horizon", f.horizon, "time horizon T");
    flow->add_option("--deltas", f.deltas, "time steps to compare");

    auto* zz = app.add_subcommand("zigzag", "zig-zag energy on the sensing problem");
    add_common(zz);
    zz->add_option("--horizon", f.horizon, "time horizon T");
    zz->add_option("--deltas", f.deltas, "time steps for FW");
    zz->add_option("--windows", f.windows, "smoothing windows");

    auto* cert = app.add_subcommand("certify", "print the feasibility certificate z^(k)");
    add_common(cert);
    cert->add_option("--k-max", f.k_max, "last k")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*solve) return cmd_solve(f);
        if (*sweep) return cmd_sweep(f);
        if (*cases) return cmd_case_study(f);
        if (*toy) return cmd_toy(f);
        if (*flow) return cmd_flow_compare(f);
        if (*zz) return cmd_zigzag(f);
        if (*cert) return cmd_certify(f);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fwbench: %s\n", e.what());
        return 1;
    }
    return 1;
}
