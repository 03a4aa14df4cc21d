// dfmo: command-line runner for the derivative-free multi-objective solvers.
//
//   dfmo run --problem remark_a1 --algo strong --delta-tol 1e-3 --out out/
//
// Exit codes: 0 normal stop, 2 configuration error, 3 oracle error,
// 4 evaluation budget exhausted.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfmo/dfmo.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitTruncated = 4;

dfmo::Vector parse_reals(const std::string& text, const char* what) {
    dfmo::Vector out;
    std::string cleaned = text;
    for (char& ch : cleaned) {
        if (ch == ',') ch = ' ';
    }
    try {
        out = dfmo::decode_line(cleaned);
    } catch (const std::exception&) {
        throw dfmo::ConfigError(std::string(what) + ": cannot parse '" + text + "'");
    }
    if (out.empty()) throw dfmo::ConfigError(std::string(what) + ": empty vector");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Derivative-free multi-objective optimization with linesearch expansion"};
    app.require_subcommand(1);
    CLI::App* run = app.add_subcommand("run", "run a solver and write front, trace and lineage");

    std::string config_file, problem = "remark_a1", external_cmd, algo = "strong", strategy = "min";
    std::vector<std::string> x0;
    std::string ref_point, f_max, out_dir = "out", format = "csv";
    double theta = 0.5, gamma = 0.5, delta = 0.5, c = 0.9, eta = 0.1, s = 1.0, alpha0 = 1.0, fd_step = 1e-5;
    std::size_t r_extra = 0, max_iters = 0, max_evals = 0;
    double delta_tol = 0.0;
    std::uint64_t seed = 0;
    bool trace_criticality = false;

    run->add_option("--config", config_file, "config.json of a previous run; other flags override it");
    run->add_option("--problem", problem, "built-in problem: remark_a1, remark_a1_n<N>, tri_sphere");
    run->add_option("--external-cmd", external_cmd, "shell command serving the objective over the line protocol");
    run->add_option("--x0", x0, "start point as comma-separated reals; repeat for several");
    run->add_option("--algo", algo, "strong or light")->check(CLI::IsMember({"strong", "light"}));
    run->add_option("--strategy", strategy, "selection rule for light: min, max or rr")
        ->check(CLI::IsMember({"min", "max", "rr"}));
    run->add_option("--theta", theta, "stepsize reduction factor in (0,1)");
    run->add_option("--gamma", gamma, "sufficient non-domination constant in (0,1)");
    run->add_option("--delta", delta, "expansion factor in (0,1)");
    run->add_option("--c", c, "reference step fraction in (0,1)");
    run->add_option("--eta", eta, "cost-function weight, 0 < eta < gamma^q");
    run->add_option("--s", s, "reference point offset, > 0");
    run->add_option("--alpha0", alpha0, "initial stepsize for every direction");
    run->add_option("--r-extra", r_extra, "random unit directions added to the 2n coordinate ones");
    run->add_option("--max-iters", max_iters, "iteration limit");
    run->add_option("--max-evals", max_evals, "evaluation budget");
    run->add_option("--delta-tol", delta_tol, "stop when the largest max-step is at most this");
    run->add_option("--seed", seed, "seed for the random directions");
    run->add_option("--fd-step", fd_step, "finite-difference step for criticality columns");
    run->add_option("--ref-point", ref_point, "explicit reference point, comma-separated");
    run->add_option("--f-max", f_max, "objective upper bounds; reference point = f_max + s");
    run->add_flag("--trace-criticality", trace_criticality, "add gamma_max and gamma_min columns");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    dfmo::RunArtifacts art;
    try {
        dfmo::RunConfig cfg;
        if (!config_file.empty()) {
            std::ifstream is(config_file);
            if (!is) throw dfmo::ConfigError("cannot read " + config_file);
            cfg = dfmo::config_from_json(nlohmann::json::parse(is));
        }
        auto given = [&](const char* name) { return run->count(name) > 0; };
        const bool fresh = config_file.empty();
        if (fresh || given("--problem")) cfg.problem = problem;
        if (given("--external-cmd")) cfg.external_cmd = external_cmd;
        if (given("--x0")) {
            cfg.x0.clear();
            for (const auto& x : x0) cfg.x0.push_back(parse_reals(x, "--x0"));
        }
        if (fresh || given("--algo")) cfg.algo = dfmo::parse_algorithm(algo);
        if (fresh || given("--strategy")) cfg.strategy = dfmo::parse_strategy(strategy);
        auto& p = cfg.params;
        if (fresh || given("--theta")) p.theta = theta;
        if (fresh || given("--gamma")) p.gamma = gamma;
        if (fresh || given("--delta")) p.delta = delta;
        if (fresh || given("--c")) p.c = c;
        if (fresh || given("--eta")) p.eta = eta;
        if (fresh || given("--s")) p.s = s;
        if (fresh || given("--alpha0")) p.initial_step = alpha0;
        if (fresh || given("--seed")) p.seed = seed;
        if (fresh || given("--r-extra")) cfg.r_extra = r_extra;
        if (fresh || given("--fd-step")) cfg.fd_step = fd_step;
        if (fresh || given("--trace-criticality")) cfg.trace_criticality = trace_criticality;
        if (given("--ref-point")) cfg.ref_point = parse_reals(ref_point, "--ref-point");
        if (given("--f-max")) cfg.f_max = parse_reals(f_max, "--f-max");
        if (fresh) {
            p.stop = dfmo::StoppingRule{};
            if (!given("--max-iters") && !given("--max-evals") && !given("--delta-tol")) {
                p.stop.delta_tol = 1e-3;
                p.stop.max_evals = 100000;
            }
        }
        if (given("--max-iters")) p.stop.max_iters = max_iters;
        if (given("--max-evals")) p.stop.max_evals = max_evals;
        if (given("--delta-tol")) p.stop.delta_tol = delta_tol;

        art = dfmo::run(cfg);
        dfmo::write_artifacts(art, out_dir, format == "json" ? dfmo::OutputFormat::json : dfmo::OutputFormat::csv);
    } catch (const dfmo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dfmo::OracleError& e) {
        std::cerr << "oracle error: " << e.what() << '\n';
        return kExitOracle;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::cerr << "stop: " << dfmo::to_string(art.stop) << ", iterations: " << art.trace.back().k
              << ", front size: " << art.final_front.size() << ", evaluations: " << art.nf_algorithm << '\n';
    for (const auto& v : art.violations) std::cerr << "warning: " << v << '\n';
    if (art.rho_clipped) std::cerr << "warning: some points reached the reference point and were clipped\n";
    const bool budget = art.stop == dfmo::StopReason::truncated || art.stop == dfmo::StopReason::max_evals;
    return budget ? kExitTruncated : 0;
}
