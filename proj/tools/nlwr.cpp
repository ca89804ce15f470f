#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlwr/nlwr.hpp"

namespace {

struct CommonOptions {
    std::string config;
    std::optional<double> dx;
    std::vector<std::string> overrides;
    std::string out;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "key = value configuration file");
        app->add_option("--dx", dx, "cell width (overrides the config)");
        app->add_option("--set", overrides, "extra key=value override, repeatable");
        app->add_option("--out", out, "output CSV path (default: stdout)");
    }

    nlwr::ExperimentConfig load() const {
        nlwr::ExperimentConfig cfg = config.empty() ? nlwr::ExperimentConfig{} : nlwr::load_config(config);
        for (const auto& o : overrides) nlwr::apply_override(cfg, o);
        if (dx) cfg.dx = *dx;
        return cfg;
    }
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw nlwr::config_error(path + ": cannot open output file");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& tok : nlwr::detail::split_list(text)) {
        auto v = nlwr::detail::parse_number(tok);
        if (!v) throw nlwr::config_error(std::string(what) + ": cannot parse '" + tok + "'");
        out.push_back(*v);
    }
    if (out.empty()) throw nlwr::config_error(std::string(what) + ": empty list");
    return out;
}

int run_solve(const CommonOptions& common) {
    const auto cfg = common.load();
    const nlwr::Problem p = nlwr::make_problem(cfg);
    const nlwr::Solution sol = nlwr::solve(p);
    Output out(common.out);
    nlwr::write_snapshot_csv(out.stream(), sol);
    std::cerr << "# summary mass=" << nlwr::format_double(nlwr::l1_norm(sol.final_state()))
              << " mass_drift=" << nlwr::format_double(sol.max_mass_drift)
              << " min=" << nlwr::format_double(sol.min_rho) << " max=" << nlwr::format_double(sol.max_rho)
              << " J=" << nlwr::format_double(nlwr::functional_j(sol))
              << " Psi=" << nlwr::format_double(nlwr::functional_psi(sol, cfg.queue_a, cfg.queue_b))
              << " steps=" << sol.n_steps() << " alpha=" << nlwr::format_double(sol.alpha) << '\n';
    return EXIT_SUCCESS;
}

struct SweepOptions {
    std::string param;
    double from = 0.0, to = 0.0, step = 0.0;
    bool no_timing = false;
};

int run_sweep(const CommonOptions& common, const SweepOptions& opt) {
    nlwr::SweepSpec spec;
    spec.param = nlwr::parse_sweep_param(opt.param);
    spec.values = nlwr::sweep_values(opt.from, opt.to, opt.step);
    spec.base = common.load();
    const auto rows = nlwr::run_sweep(spec);
    Output out(common.out);
    nlwr::write_sweep_csv(out.stream(), spec, rows, !opt.no_timing);
    if (const auto failures = nlwr::sweep_failures(rows); !failures.empty()) {
        std::cerr << "nlwr sweep: some runs failed\n" << failures;
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}

struct BoundsOptions {
    std::vector<std::string> perturb;
    std::string times;
    std::size_t nodes = 256;
    bool empirical = true;
    bool report = false;
};

nlwr::BoundKind infer_kind(const std::vector<std::string>& perturb) {
    static const std::set<std::string> kernel_keys{"eta", "delta", "kernel_orientation", "rho0"};
    bool kernel = false, velocity = false;
    for (const auto& a : perturb) {
        const auto key = nlwr::detail::trim(a.substr(0, a.find('=')));
        if (kernel_keys.contains(key)) kernel = true;
        else if (key == "m") velocity = true;
        else throw nlwr::config_error("--perturb: key '" + key + "' is not covered by a stability estimate");
    }
    if (kernel == velocity)
        throw nlwr::config_error("--perturb: perturb either kernel/datum keys (eta, delta, rho0) or m, not both");
    return kernel ? nlwr::BoundKind::kernel : nlwr::BoundKind::velocity;
}

int run_bounds(const CommonOptions& common, const BoundsOptions& opt) {
    if (opt.perturb.empty()) throw nlwr::config_error("bounds: at least one --perturb key=value is required");
    const auto cfg = common.load();
    auto cfg_t = cfg;
    for (const auto& a : opt.perturb) nlwr::apply_override(cfg_t, a);
    const nlwr::BoundKind kind = infer_kind(opt.perturb);
    const std::vector<double> times = opt.times.empty() ? std::vector<double>{cfg.T} : parse_list(opt.times, "--times");

    const nlwr::Problem p = nlwr::make_problem(cfg);
    const nlwr::Problem pt = nlwr::make_problem(cfg_t);
    std::vector<nlwr::BoundReport> reports;
    for (double t : times) {
        auto r = kind == nlwr::BoundKind::kernel ? nlwr::stability_bound_kernel(p, pt, t, opt.nodes)
                                                 : nlwr::stability_bound_velocity(p, pt, t, opt.nodes);
        if (opt.empirical) {
            if (t == 0.0) {
                r.empirical = nlwr::l1_distance(p.rho0, pt.rho0);
            } else {
                auto a = p, b = pt;
                a.config.T = b.config.T = t;
                r.empirical = nlwr::l1_distance(nlwr::solve(a).final_state(), nlwr::solve(b).final_state());
            }
        }
        if (opt.report) std::cerr << nlwr::format_report(r);
        reports.push_back(r);
    }
    Output out(common.out);
    nlwr::write_bounds_csv(out.stream(), reports);
    return EXIT_SUCCESS;
}

struct CompareOptions {
    std::string kind = "kernel";
    std::string values;
    std::optional<double> t;
    double slack = 0.0;
};

int run_compare(const CommonOptions& common, const CompareOptions& opt) {
    const auto cfg = common.load();
    const auto values = parse_list(opt.values, "--values");
    const nlwr::Problem base = nlwr::make_problem(cfg);
    std::vector<nlwr::StabilityPair> pairs;
    for (double v : values) {
        auto c = cfg;
        nlwr::StabilityPair pair{.base = base, .perturbed = base, .kind = nlwr::BoundKind::kernel, .label = {}};
        if (opt.kind == "kernel") {
            c.delta = cfg.delta + v;
            pair.label = "delta+" + nlwr::format_double(v);
        } else if (opt.kind == "velocity") {
            c.m = static_cast<int>(v);
            if (c.m != v) throw nlwr::config_error("--values: m must be an integer, got " + nlwr::format_double(v));
            pair.kind = nlwr::BoundKind::velocity;
            pair.label = "m=" + std::to_string(c.m);
        } else {
            throw nlwr::config_error("--kind: expected 'kernel' or 'velocity', got '" + opt.kind + "'");
        }
        pair.perturbed = nlwr::make_problem(c);
        pairs.push_back(std::move(pair));
    }
    const auto rows = nlwr::empirical_stability_ratio(pairs, opt.t.value_or(cfg.T), opt.slack);
    Output out(common.out);
    auto& o = out.stream();
    o << "label,kind,perturbation,distance,bound,log10_bound,ratio,status\n";
    for (const auto& r : rows)
        o << r.label << ',' << (r.kind == nlwr::BoundKind::kernel ? "kernel" : "velocity") << ','
          << nlwr::format_double(r.perturbation) << ',' << nlwr::format_double(r.distance) << ','
          << nlwr::format_double(r.bound) << ',' << nlwr::format_double(r.log10_bound) << ','
          << nlwr::format_double(r.ratio) << ',' << nlwr::to_string(r.status) << '\n';
    return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal traffic model: solver, sweeps and stability estimates"};
    app.require_subcommand(1);

    CommonOptions solve_common, sweep_common, bounds_common, compare_common;

    auto* solve = app.add_subcommand("solve", "run one simulation and write the snapshot CSV");
    solve_common.attach(solve);

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "sweep eta, delta or m and write J and Psi per run");
    sweep_common.attach(sweep);
    sweep->add_option("--param", sweep_opt.param, "eta, delta or m")->required();
    sweep->add_option("--from", sweep_opt.from, "first grid value")->required();
    sweep->add_option("--to", sweep_opt.to, "last grid value")->required();
    sweep->add_option("--step", sweep_opt.step, "grid spacing")->required();
    sweep->add_flag("--no-timing", sweep_opt.no_timing, "write 0 in the seconds column");

    BoundsOptions bounds_opt;
    auto* bounds = app.add_subcommand("bounds", "stability estimate for a problem and its perturbation");
    bounds_common.attach(bounds);
    bounds->add_option("--perturb", bounds_opt.perturb, "key=value defining the perturbed problem, repeatable");
    bounds->add_option("--times", bounds_opt.times, "comma-separated evaluation times (default: T)");
    bounds->add_option("--nodes", bounds_opt.nodes, "quadrature nodes for the time integrals");
    bounds->add_flag("!--no-empirical", bounds_opt.empirical, "skip the two solves for the empirical distance");
    bounds->add_flag("--report", bounds_opt.report, "print every constant to stderr");

    CompareOptions compare_opt;
    auto* compare = app.add_subcommand("compare", "empirical distance against the estimate over a battery");
    compare_common.attach(compare);
    compare->add_option("--kind", compare_opt.kind, "kernel (delta offsets) or velocity (m values)");
    compare->add_option("--values", compare_opt.values, "delta offsets or m values, comma-separated")->required();
    compare->add_option("--t", compare_opt.t, "comparison time (default: T)");
    compare->add_option("--slack", compare_opt.slack, "estimated L1 discretization error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) return run_solve(solve_common);
        if (sweep->parsed()) return run_sweep(sweep_common, sweep_opt);
        if (bounds->parsed()) return run_bounds(bounds_common, bounds_opt);
        if (compare->parsed()) return run_compare(compare_common, compare_opt);
    } catch (const std::exception& e) {
        std::cerr << "nlwr: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_FAILURE;
}
