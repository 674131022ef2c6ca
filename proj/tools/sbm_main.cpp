// Experiment driver: instance generation, simulation, offline benchmarks,
// closed-form evaluation, dual audits, and convergence tables.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sbm/analysis.hpp"
#include "sbm/benchmarks.hpp"
#include "sbm/dualaudit.hpp"
#include "sbm/engine.hpp"
#include "sbm/errors.hpp"
#include "sbm/experiments.hpp"
#include "sbm/instance.hpp"
#include "sbm/policy.hpp"
#include "sbm/report.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::int64_t trials = 100000;
    std::string out;
    int workers = 0;
};

void emit(const sbm::CsvReport& report, const std::string& out) {
    if (out.empty())
        std::cout << report.str();
    else
        report.write_file(out);
}

void add_standard_headers(sbm::CsvReport& report, const GlobalOpts& g,
                          const std::string& canonical) {
    report.add_header("seed", std::to_string(g.seed));
    report.add_header("trials", std::to_string(g.trials));
    report.add_header("version", std::string(sbm::kVersion));
    report.add_header("config", sbm::config_hash(canonical));
}

struct InstanceSource {
    std::string file;
    std::vector<double> gnb;  // n, b, p

    sbm::Instance resolve() const {
        if (!file.empty()) return sbm::load(file);
        if (gnb.size() == 3)
            return sbm::gen_gnb(static_cast<int>(gnb[0]), static_cast<int>(gnb[1]), gnb[2]);
        throw sbm::InvalidParameterError("no instance given: use --instance or --gnb");
    }

    std::string label() const {
        if (!file.empty()) return file;
        std::ostringstream s;
        s << "gnb(" << static_cast<int>(gnb[0]) << "," << static_cast<int>(gnb[1]) << ","
          << sbm::fmt(gnb[2]) << ")";
        return s.str();
    }
};

std::string join_ints(const std::vector<int>& xs) {
    std::ostringstream s;
    for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? "," : "") << xs[i];
    return s.str();
}

int cmd_gen(const GlobalOpts& g, const std::string& family, int n, int b, double p,
            const sbm::RandomSpec& random_spec) {
    sbm::Instance inst = [&] {
        if (family == "gnb") return sbm::gen_gnb(n, b, p);
        if (family == "hetero") {
            sbm::FamilySpec spec;
            spec.kind = sbm::FamilySpec::Kind::hetero;
            spec.n = n;
            spec.p = p;
            return sbm::make_family_instance(spec, b);
        }
        if (family == "random") {
            sbm::RandomSpec spec = random_spec;
            spec.seed = g.seed;
            return sbm::gen_random(spec);
        }
        throw sbm::InvalidParameterError("unknown family: " + family);
    }();
    if (g.out.empty()) throw sbm::InvalidParameterError("gen requires --out FILE");
    sbm::save(inst, g.out);
    std::cout << "wrote " << g.out << " (" << inst.n_servers() << " servers, "
              << inst.n_requests() << " requests, " << inst.n_edges() << " edges)\n";
    return 0;
}

int cmd_simulate(const GlobalOpts& g, const InstanceSource& source, const std::string& policy_name,
                 const std::string& trace_out) {
    const sbm::Instance inst = source.resolve();
    const auto policy = sbm::make_policy(policy_name);
    const sbm::Stats stats = sbm::monte_carlo(inst, *policy, g.trials, g.seed, g.workers);

    sbm::CsvReport report({"policy", "instance", "trials", "mean", "var", "ci95"});
    add_standard_headers(report, g, "simulate:" + source.label() + ":" + policy_name);
    report.add_row({policy_name, source.label(), sbm::fmt(stats.trials), sbm::fmt(stats.mean),
                    sbm::fmt(stats.variance), sbm::fmt(stats.ci95)});
    emit(report, g.out);

    if (!trace_out.empty()) {
        sbm::OutcomeOracle oracle =
            sbm::OutcomeOracle::lazy_stream(sbm::SplitMix64::derive(g.seed, 0));
        const sbm::Trace trace = sbm::run_online(inst, *policy, oracle);
        sbm::CsvReport tr({"request_id", "server_id", "success", "load_before"});
        tr.add_header("seed", std::to_string(g.seed));
        tr.add_header("trial", "0");
        for (int r = 0; r < inst.n_requests(); ++r) {
            const sbm::TraceStep& step = trace.steps[r];
            tr.add_row({sbm::fmt(static_cast<std::int64_t>(r)),
                        sbm::fmt(static_cast<std::int64_t>(step.server)),
                        step.server == sbm::Trace::kUnassigned ? "0"
                                                               : (step.success ? "1" : "0"),
                        sbm::fmt(step.load_before)});
        }
        tr.write_file(trace_out);
    }
    return 0;
}

int cmd_benchmark(const GlobalOpts& g, const std::string& mode, const InstanceSource& source,
                  const std::string& solution_out) {
    const sbm::Instance inst = source.resolve();
    if (mode == "opt") {
        const sbm::LpSolution sol = sbm::opt_fractional(inst);
        std::cout << "opt " << sbm::fmt(sol.objective) << "\n";
        if (!solution_out.empty()) {
            sbm::CsvReport report({"request", "server", "p", "mass"});
            report.add_header("objective", sbm::fmt(sol.objective));
            std::size_t idx = 0;
            for (const sbm::Request& r : inst.requests())
                for (const sbm::Edge& e : r.edges) {
                    report.add_row({sbm::fmt(static_cast<std::int64_t>(r.id)),
                                    sbm::fmt(static_cast<std::int64_t>(e.server)),
                                    sbm::fmt(e.probability), sbm::fmt(sol.edge_mass[idx])});
                    ++idx;
                }
            report.write_file(solution_out);
        }
        return 0;
    }
    if (mode == "sopt") {
        const bool keep_actions = !solution_out.empty();
        const sbm::DpValue dp = sbm::sopt_dp(inst, keep_actions);
        std::cout << "sopt " << sbm::fmt(dp.value) << "\n";
        if (keep_actions) {
            sbm::CsvReport report({"t", "state", "action"});
            report.add_header("value", sbm::fmt(dp.value));
            for (int t = 0; t < inst.n_requests(); ++t)
                for (std::int64_t s = 0; s < dp.n_states; ++s)
                    report.add_row(
                        {sbm::fmt(static_cast<std::int64_t>(t)), sbm::fmt(s),
                         sbm::fmt(static_cast<std::int64_t>(
                             dp.actions[static_cast<std::size_t>(t) * dp.n_states + s]))});
            report.write_file(solution_out);
        }
        return 0;
    }
    (void)g;
    throw sbm::InvalidParameterError("benchmark mode must be opt or sopt");
}

int cmd_formulas(const GlobalOpts& g, const std::string& name, int n, int b, int m,
                 double load, const std::vector<double>& probs,
                 const std::vector<int>& n_list) {
    const std::string canonical = "formulas:" + name;
    if (name == "round-dist") {
        const sbm::DistributionTable table = sbm::round_dist(b, m);
        sbm::CsvReport report({"k", "mass"});
        add_standard_headers(report, g, canonical);
        for (int k = 0; k <= table.max_value(); ++k)
            report.add_row({sbm::fmt(static_cast<std::int64_t>(k)), sbm::fmt(table.masses[k])});
        emit(report, g.out);
        return 0;
    }
    if (name == "server-bound") {
        const sbm::BoundReport bound = sbm::sbal_total_bound(n, b);
        sbm::CsvReport report({"j", "bound"});
        add_standard_headers(report, g, canonical);
        for (int j = 1; j <= n; ++j)
            report.add_row({sbm::fmt(static_cast<std::int64_t>(j)),
                            sbm::fmt(bound.server_bounds[j - 1])});
        emit(report, g.out);
        return 0;
    }
    if (name == "total-bound") {
        const sbm::BoundReport bound = sbm::sbal_total_bound(n, b);
        sbm::CsvReport report({"n", "b", "k", "aggregate", "ratio"});
        add_standard_headers(report, g, canonical);
        report.add_row({sbm::fmt(static_cast<std::int64_t>(n)),
                        sbm::fmt(static_cast<std::int64_t>(b)),
                        sbm::fmt(static_cast<std::int64_t>(bound.k)), sbm::fmt(bound.aggregate),
                        sbm::fmt(bound.ratio)});
        emit(report, g.out);
        return 0;
    }
    if (name == "greedy-expect") {
        sbm::CsvReport report({"n", "m", "recurrence", "closed"});
        add_standard_headers(report, g, canonical);
        report.add_row({sbm::fmt(static_cast<std::int64_t>(n)),
                        sbm::fmt(static_cast<std::int64_t>(m)),
                        sbm::fmt(sbm::greedy_expect_recurrence(n, m)),
                        sbm::fmt(sbm::greedy_expect_closed(n, m))});
        emit(report, g.out);
        return 0;
    }
    if (name == "greedy-ratio") {
        sbm::CsvReport report({"k", "summand", "ratio"});
        add_standard_headers(report, g, canonical);
        for (int k = 1; k <= n; ++k)
            report.add_row({sbm::fmt(static_cast<std::int64_t>(k)),
                            sbm::fmt(sbm::greedy_ratio_summand(k)),
                            sbm::fmt(sbm::greedy_ratio(k))});
        emit(report, g.out);
        return 0;
    }
    if (name == "pb-tail") {
        sbm::CsvReport report({"b", "tail"});
        add_standard_headers(report, g, canonical);
        report.add_row({sbm::fmt(static_cast<std::int64_t>(b)),
                        sbm::fmt(sbm::poisson_binomial_tail(probs, b))});
        emit(report, g.out);
        return 0;
    }
    if (name == "chebyshev") {
        sbm::CsvReport report({"load", "b", "bound"});
        add_standard_headers(report, g, canonical);
        report.add_row({sbm::fmt(load), sbm::fmt(static_cast<std::int64_t>(b)),
                        sbm::fmt(sbm::chebyshev_bound(load, b))});
        emit(report, g.out);
        return 0;
    }
    if (name == "convergence") {
        if (n_list.empty())
            throw sbm::InvalidParameterError("formulas convergence requires --n-list");
        sbm::CsvReport report({"n", "k", "ratio_bound"});
        add_standard_headers(report, g, canonical + ":" + join_ints(n_list));
        for (int ni : n_list) {
            const sbm::BoundReport bound = sbm::sbal_total_bound(ni, b);
            report.add_row({sbm::fmt(static_cast<std::int64_t>(ni)),
                            sbm::fmt(static_cast<std::int64_t>(bound.k)),
                            sbm::fmt(bound.ratio)});
        }
        emit(report, g.out);
        return 0;
    }
    throw sbm::InvalidParameterError("unknown formula: " + name);
}

int cmd_dual_audit(const GlobalOpts& g, const InstanceSource& source,
                   const std::vector<int>& b_sweep, const std::string& family, int n, double p) {
    if (!b_sweep.empty()) {
        sbm::FamilySpec spec;
        spec.kind = family == "hetero" ? sbm::FamilySpec::Kind::hetero
                                       : sbm::FamilySpec::Kind::gnb;
        spec.n = n;
        spec.p = p;
        const auto curve = sbm::epsilon_curve(b_sweep, spec, g.trials, g.seed, g.workers);
        sbm::CsvReport report({"b", "min_ratio", "ci95", "max_residual"});
        add_standard_headers(report, g,
                             "dual-audit:" + family + ":" + join_ints(b_sweep));
        for (const auto& point : curve)
            report.add_row({sbm::fmt(static_cast<std::int64_t>(point.b)),
                            sbm::fmt(point.min_ratio), sbm::fmt(point.ci95),
                            sbm::fmt(point.max_rel_residual)});
        emit(report, g.out);
        return 0;
    }

    const sbm::Instance inst = source.resolve();
    const sbm::SlackEstimate est = sbm::estimate_slack(inst, g.trials, g.seed, g.workers);
    sbm::CsvReport report({"request", "server", "estimate", "ci95", "target", "ratio"});
    add_standard_headers(report, g, "dual-audit:" + source.label());
    for (const sbm::EdgeSlack& e : est.edges)
        report.add_row({sbm::fmt(static_cast<std::int64_t>(e.request)),
                        sbm::fmt(static_cast<std::int64_t>(e.server)), sbm::fmt(e.estimate),
                        sbm::fmt(e.ci95), sbm::fmt(e.target), sbm::fmt(e.ratio)});
    report.add_header("min_ratio", sbm::fmt(est.min_ratio));
    report.add_header("c_effective", sbm::fmt(sbm::kBalanceRate * est.min_ratio));
    emit(report, g.out);
    return 0;
}

int cmd_convergence(const GlobalOpts& g, const std::vector<int>& n_list, int b, double p) {
    if (n_list.empty()) throw sbm::InvalidParameterError("convergence requires --n-list");
    const auto rows = sbm::convergence_table(n_list, b, p, g.trials, g.seed, g.workers);
    sbm::CsvReport report({"n", "trials", "sbal_mean", "sbal_ci95", "sbal_over_nb",
                           "bound_ratio", "greedy_ratio_nb", "ratio_ub", "ratio_ub_ci95"});
    add_standard_headers(report, g, "convergence:" + join_ints(n_list));
    for (const auto& row : rows)
        report.add_row({sbm::fmt(static_cast<std::int64_t>(row.n)), sbm::fmt(g.trials),
                        sbm::fmt(row.sbal_mean), sbm::fmt(row.sbal_ci95),
                        sbm::fmt(row.sbal_over_nb), sbm::fmt(row.bound_ratio),
                        sbm::fmt(row.greedy_ratio_nb), sbm::fmt(row.ratio_ub),
                        sbm::fmt(row.ratio_ub_ci95)});
    emit(report, g.out);
    return 0;
}

int cmd_compare(const GlobalOpts& g, const InstanceSource& source,
                const std::vector<std::string>& policies) {
    const sbm::Instance inst = source.resolve();
    const auto rows = sbm::compare_table(inst, policies, g.trials, g.seed, g.workers);
    sbm::CsvReport report({"policy", "mean", "ci95", "opt", "sopt", "ratio_opt", "ratio_sopt",
                           "degenerate"});
    add_standard_headers(report, g, "compare:" + source.label());
    const auto cell = [](const std::optional<double>& v) {
        return v ? sbm::fmt(*v) : std::string("na");
    };
    for (const auto& row : rows)
        report.add_row({row.policy, sbm::fmt(row.mean), sbm::fmt(row.ci95), cell(row.opt),
                        cell(row.sopt), cell(row.ratio_opt), cell(row.ratio_sopt),
                        row.degenerate ? "1" : "0"});
    emit(report, g.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online b-matching with stochastic rewards: simulation and verification"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "RNG seed (default 0)");
    app.add_option("--trials", g.trials, "Monte Carlo trials (default 100000)");
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--workers", g.workers, "worker threads, 0 = all cores");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance file");
    std::string gen_family = "gnb";
    int gen_n = 2, gen_b = 1;
    double gen_p = 0.5;
    sbm::RandomSpec random_spec;
    gen->add_option("--family", gen_family, "gnb | random | hetero");
    gen->add_option("--n", gen_n, "servers (gnb/hetero)");
    gen->add_option("--b", gen_b, "capacity (gnb), capacity scale (hetero)");
    gen->add_option("--p", gen_p, "edge probability");
    gen->add_option("--n-servers", random_spec.n_servers, "servers (random)");
    gen->add_option("--n-requests", random_spec.n_requests, "requests (random)");
    gen->add_option("--density", random_spec.edge_density, "edge density in (0,1] (random)");
    std::vector<double> p_range{0.5, 0.5}, w_range{1.0, 1.0};
    std::vector<int> cap_range{1, 1};
    gen->add_option("--p-range", p_range, "edge probability range (random)")->expected(2);
    gen->add_option("--cap-range", cap_range, "capacity range (random)")->expected(2);
    gen->add_option("--weight-range", w_range, "weight range (random)")->expected(2);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a policy");
    simulate->footer("columns: policy,instance,trials,mean,var,ci95\n"
                     "trace columns: request_id,server_id(-1 = unassigned),success(0/1),load_before");
    InstanceSource sim_source;
    std::string sim_policy = "sbal", sim_trace_out;
    simulate->add_option("--instance", sim_source.file, "instance file");
    simulate->add_option("--gnb", sim_source.gnb, "inline G_n^b: N B P")->expected(3);
    simulate->add_option("--policy", sim_policy, "sbal | greedy");
    simulate->add_option("--trace-out", sim_trace_out, "write the trial-0 trace here");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "exact offline benchmark");
    std::string bench_mode;
    InstanceSource bench_source;
    std::string bench_solution_out;
    benchmark->add_option("mode", bench_mode, "opt | sopt")->required();
    benchmark->add_option("--instance", bench_source.file, "instance file");
    benchmark->add_option("--gnb", bench_source.gnb, "inline G_n^b: N B P")->expected(3);
    benchmark->add_option("--solution-out", bench_solution_out,
                          "sidecar file for the LP solution / action table");

    // formulas
    auto* formulas = app.add_subcommand("formulas", "closed forms and bounds");
    formulas->footer(
        "names and columns:\n"
        "  round-dist --b --m          -> k,mass\n"
        "  server-bound --n --b        -> j,bound\n"
        "  total-bound --n --b         -> n,b,k,aggregate,ratio\n"
        "  greedy-expect --n --m       -> n,m,recurrence,closed\n"
        "  greedy-ratio --n            -> k,summand,ratio\n"
        "  pb-tail --probs --b         -> b,tail\n"
        "  chebyshev --load --b        -> load,b,bound\n"
        "  convergence --n-list [--b]  -> n,k,ratio_bound");
    std::string formula_name;
    int f_n = 1, f_b = 1, f_m = 0;
    double f_load = 0.0;
    std::vector<double> f_probs;
    std::vector<int> f_n_list;
    formulas->add_option("name", formula_name, "formula name")->required();
    formulas->add_option("--n", f_n, "n parameter");
    formulas->add_option("--b", f_b, "b parameter");
    formulas->add_option("--m", f_m, "m parameter");
    formulas->add_option("--load", f_load, "load parameter");
    formulas->add_option("--probs", f_probs, "probability list");
    formulas->add_option("--n-list", f_n_list, "n sweep");

    // dual-audit
    auto* dual = app.add_subcommand("dual-audit", "primal-dual feasibility audit");
    dual->footer("columns: request,server,estimate,ci95,target,ratio (per edge)\n"
                 "sweep columns: b,min_ratio,ci95,max_residual");
    InstanceSource dual_source;
    std::vector<int> dual_sweep;
    std::string dual_family = "gnb";
    int dual_n = 3;
    double dual_p = 0.1;
    dual->add_option("--instance", dual_source.file, "instance file");
    dual->add_option("--gnb", dual_source.gnb, "inline G_n^b: N B P")->expected(3);
    dual->add_option("--b-sweep", dual_sweep, "capacity sweep (family mode)");
    dual->add_option("--family", dual_family, "gnb | hetero (sweep mode)");
    dual->add_option("--n", dual_n, "family servers");
    dual->add_option("--p", dual_p, "family base probability");

    // convergence
    auto* convergence = app.add_subcommand("convergence", "ratio table approaching 1 - 1/e");
    convergence->footer(
        "columns: n,trials,sbal_mean,sbal_ci95,sbal_over_nb (simulated E/nb),\n"
        "bound_ratio (analytic min(k,n)/n), greedy_ratio_nb (analytic SOpt lower bound /nb),\n"
        "ratio_ub (simulated SBal / (nb greedy_ratio)), ratio_ub_ci95");
    std::vector<int> conv_n_list;
    int conv_b = 1;
    double conv_p = 0.01;
    convergence->add_option("--n-list", conv_n_list, "server counts to sweep");
    convergence->add_option("--b", conv_b, "uniform capacity");
    convergence->add_option("--p", conv_p, "edge probability");

    // compare
    auto* compare = app.add_subcommand("compare", "policies against both benchmarks");
    compare->footer("columns: policy,mean,ci95,opt,sopt,ratio_opt,ratio_sopt,degenerate\n"
                    "benchmarks print 'na' when the instance exceeds solver limits;\n"
                    "degenerate=1 marks 0/0 ratios reported as 1");
    InstanceSource cmp_source;
    std::vector<std::string> cmp_policies{"sbal", "greedy"};
    compare->add_option("--instance", cmp_source.file, "instance file");
    compare->add_option("--gnb", cmp_source.gnb, "inline G_n^b: N B P")->expected(3);
    compare->add_option("--policies", cmp_policies, "policy names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            random_spec.p_range = {p_range[0], p_range[1]};
            random_spec.cap_range = {cap_range[0], cap_range[1]};
            random_spec.weight_range = {w_range[0], w_range[1]};
            return cmd_gen(g, gen_family, gen_n, gen_b, gen_p, random_spec);
        }
        if (simulate->parsed())
            return cmd_simulate(g, sim_source, sim_policy, sim_trace_out);
        if (benchmark->parsed())
            return cmd_benchmark(g, bench_mode, bench_source, bench_solution_out);
        if (formulas->parsed())
            return cmd_formulas(g, formula_name, f_n, f_b, f_m, f_load, f_probs, f_n_list);
        if (dual->parsed())
            return cmd_dual_audit(g, dual_source, dual_sweep, dual_family, dual_n, dual_p);
        if (convergence->parsed()) return cmd_convergence(g, conv_n_list, conv_b, conv_p);
        if (compare->parsed()) return cmd_compare(g, cmp_source, cmp_policies);
        std::cerr << "no command given\n";
        return kExitUsage;
    } catch (const sbm::InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sbm::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sbm::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
