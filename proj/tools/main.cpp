// roughbsde: command line front end. Every subcommand prints a JSON summary on
// stdout and exits 0 only if the properties it asserts hold.

#include "roughbsde/bdsde.hpp"
#include "roughbsde/config.hpp"
#include "roughbsde/csv_io.hpp"
#include "roughbsde/experiments.hpp"
#include "roughbsde/metric.hpp"
#include "roughbsde/pvariation.hpp"
#include "roughbsde/selftest.hpp"
#include "roughbsde/young.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>

using namespace roughbsde;
using json = nlohmann::json;

namespace {

constexpr int kFail = 1;
constexpr int kError = 2;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// Summary on stdout: {"schema": "roughbsde.<command>.summary", "version": n, ...}.
void emit(json j) {
    j["schema"] = "roughbsde." + j.at("command").get<std::string>() + ".summary";
    j["version"] = kSchemaVersion;
    std::cout << j.dump(2) << '\n';
}

Config load_config(const std::string& file, const std::vector<std::string>& overrides) {
    Config cfg = file.empty() ? Config() : Config::load(file);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void warn_unused(const Config& cfg) {
    for (const auto& k : cfg.unused()) std::cerr << "warning: unused config key " << k << '\n';
}

json diagnostics_json(const Diagnostics& d) {
    json intervals = json::array();
    for (const auto& iv : d.intervals)
        intervals.push_back({{"t_start", iv.t_start}, {"t_end", iv.t_end}, {"iterations", iv.iterations},
                             {"residuals", iv.residuals}});
    return {{"y_p2", number(d.y_p2.value)},
            {"y_p2_exact", d.y_p2.exact},
            {"y_p2_method", d.y_p2.method},
            {"y_p2_upper", number(d.y_p2_upper)},
            {"z_bmo", number(d.z_bmo)},
            {"apriori", number(d.apriori)},
            {"max_abs_y", d.max_abs_y},
            {"equation_residual", d.equation_residual},
            {"final_picard_residual", d.final_picard_residual},
            {"eps_bar", d.eps_bar},
            {"shrinks", d.shrinks},
            {"snapped_jumps", d.snapped_jumps},
            {"forced_cells", d.forced_cells},
            {"w_qvar", d.w_qvar},
            {"xi_sup", d.xi_sup},
            {"intervals", intervals}};
}

Table solution_table(const Solution& s) {
    Table t;
    t.schema = "roughbsde.solve";
    t.columns = {"quantity", "component", "value"};
    auto row = [&](const std::string& q, int k, double v) { t.rows.push_back({q, std::to_string(k), format_double(v)}); };
    const Vec y0 = s.y0(), z0 = s.tree.brownian_steps() > 0 ? s.z0() : Vec::Zero(s.Z.dim);
    for (int k = 0; k < y0.size(); ++k) row("y0", k, y0(k));
    for (int k = 0; k < z0.size(); ++k) row("z0", k, z0(k));
    row("y_p2", 0, s.diag.y_p2.value);
    row("y_p2_upper", 0, s.diag.y_p2_upper);
    row("z_bmo", 0, s.diag.z_bmo);
    row("apriori", 0, s.diag.apriori);
    row("max_abs_y", 0, s.diag.max_abs_y);
    row("equation_residual", 0, s.diag.equation_residual);
    row("eps_bar", 0, s.diag.eps_bar);
    return t;
}

Table node_table(const Solution& s) {
    Table t;
    t.schema = "roughbsde.nodes";
    t.columns = {"slice", "time", "kind", "node", "probability", "b"};
    for (int k = 0; k < s.Y.dim; ++k) t.columns.push_back("y_" + std::to_string(k));
    for (int k = 0; k < s.Z.dim; ++k) t.columns.push_back("z_" + std::to_string(k));
    const char* kinds[] = {"brownian", "jump", "frozen"};
    for (std::size_t sl = 0; sl < s.tree.slices(); ++sl) {
        const std::string kind = sl < s.tree.steps() ? kinds[static_cast<int>(s.tree.kinds[sl])] : "terminal";
        for (int j = 0; j < s.tree.nodes(sl); ++j) {
            std::vector<std::string> row{std::to_string(sl), format_double(s.tree.times[sl]), kind, std::to_string(j),
                                         format_double(s.tree.node_probability(sl, j)),
                                         format_double(s.tree.brownian_value(sl, j))};
            for (int k = 0; k < s.Y.dim; ++k) row.push_back(format_double(s.Y.at(sl, j)(k)));
            for (int k = 0; k < s.Z.dim; ++k) row.push_back(format_double(s.Z.at(sl, j)(k)));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

int cmd_selftest(bool quick, const std::string& out) {
    SelftestOptions opts;
    opts.include_stability = !quick;
    const SelftestReport r = selftest(opts);
    json checks = json::array();
    Table t;
    t.schema = "roughbsde.selftest";
    t.columns = {"check", "passed", "value", "threshold", "seconds", "detail"};
    for (const auto& c : r.checks) {
        checks.push_back({{"check", c.name}, {"passed", c.passed}, {"value", number(c.value)},
                          {"threshold", c.threshold}, {"detail", c.detail}});
        t.rows.push_back({c.name, c.passed ? "1" : "0", format_double(c.value), format_double(c.threshold),
                          format_double(c.seconds), c.detail});
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value << " threshold=" << c.threshold
                  << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
    }
    if (!out.empty()) save_table(out, t);
    emit(json{{"command", "selftest"}, {"passed", r.passed()}, {"failed", r.failed()}, {"checks", checks}});
    return r.passed() ? 0 : kFail;
}

int cmd_young(const std::string& xfile, const std::string& yfile, bool forward, double p, double q,
              const std::string& out) {
    const GridPath x = load_path(xfile), y = load_path(yfile);
    const Regularity reg{p, q};
    const YoungIntegralResult r = forward ? forward_young(x, y, Anchor::Left, reg) : backward_young(x, y, Anchor::Left, reg);
    if (!out.empty()) save_table(out, path_table(r.cumulative));
    std::vector<double> total(r.total.data(), r.total.data() + r.total.size());
    const bool ok = r.total.allFinite() && std::isfinite(r.remainder_bound);
    emit(json{{"command", "young"},
                      {"direction", forward ? "forward" : "backward"},
                      {"value", total},
                      {"remainder_bound", number(r.remainder_bound)},
                      {"young_loeve_constant", young_loeve_constant(p, q)},
                      {"passed", ok}}
                     );
    return ok ? 0 : kFail;
}

int cmd_driver(const Config& cfg, const std::string& out) {
    const DriverSpec spec = driver_spec_from(cfg);
    DriverReport rep;
    const GridPath W = generate(spec, &rep);
    warn_unused(cfg);
    if (!out.empty()) save_table(out, path_table(W));
    const double qv = p_variation(W, spec.declared_q);
    const bool ok = std::isfinite(qv);
    emit(json{{"command", "driver"},       {"kind", std::string(to_string(spec.kind))},
                      {"seed", spec.seed},          {"points", W.size()},
                      {"jumps", rep.jumps},         {"jitter", rep.jitter},
                      {"declared_q", spec.declared_q}, {"q_variation", number(qv)},
                      {"passed", ok}}
                     );
    return ok ? 0 : kFail;
}

int cmd_solve(const Config& cfg, const std::string& out, const std::string& nodes) {
    const Problem pr = problem_from(cfg);
    const TreeConfig tc = tree_config_from(cfg);
    const SolverOptions so = solver_options_from(cfg);
    const Solution s = solve_rbsde(pr, tc, so);
    warn_unused(cfg);
    if (!out.empty()) save_table(out, solution_table(s));
    if (!nodes.empty()) save_table(nodes, node_table(s));
    const bool residual_ok = s.diag.equation_residual <= so.residual_factor * so.tol;
    const bool apriori_ok = s.diag.max_abs_y <= s.diag.apriori;
    const Vec y0 = s.y0();
    emit(json{{"command", "solve"},
                      {"mode", std::string(to_string(pr.mode))},
                      {"y0", std::vector<double>(y0.data(), y0.data() + y0.size())},
                      {"diagnostics", diagnostics_json(s.diag)},
                      {"residual_ok", residual_ok},
                      {"apriori_ok", apriori_ok},
                      {"passed", residual_ok && apriori_ok}}
                     );
    return residual_ok && apriori_ok ? 0 : kFail;
}

int cmd_stretch(const Config& cfg, double delta, double tolerance, const std::string& out) {
    const Problem pr = problem_from(cfg);
    const StretchResult r = time_stretched_solve(pr, delta, tree_config_from(cfg), solver_options_from(cfg));
    warn_unused(cfg);
    if (!out.empty()) {
        Table t;
        t.schema = "roughbsde.stretch";
        t.columns = {"slice", "time", "node", "y_direct", "y_retracted"};
        for (std::size_t sl = 0; sl < r.direct.tree.slices(); ++sl)
            for (int j = 0; j < r.direct.tree.nodes(sl); ++j)
                t.rows.push_back({std::to_string(sl), format_double(r.direct.tree.times[sl]), std::to_string(j),
                                  format_double(r.direct.Y.at(sl, j)(0)), format_double(r.retracted.Y.at(sl, j)(0))});
        save_table(out, t);
    }
    const bool ok = r.max_difference <= tolerance;
    emit(json{{"command", "stretch"},
                      {"delta", delta},
                      {"extended_horizon", r.extended.tree.times.back()},
                      {"max_difference", r.max_difference},
                      {"tolerance", tolerance},
                      {"passed", ok}}
                     );
    return ok ? 0 : kFail;
}

int cmd_metric(const std::string& afile, const std::string& bfile, double p, const std::vector<double>& deltas,
               bool brute, const AlphaOptions& opts, const std::string& out) {
    const DecoratedPath a = load_decorated(afile), b = load_decorated(bfile);
    const AlphaResult r = alpha_p_upper(a, b, p, deltas, opts);
    Table t;
    t.schema = "roughbsde.metric";
    t.columns = {"delta", "alpha_upper", "alpha_brute"};
    json rows = json::array();
    bool ok = std::isfinite(r.value);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        double exact = NAN;
        if (brute) {
            exact = alpha_brute(a, b, p, deltas[k], opts.refine);
            ok = ok && r.per_delta[k] <= 1.05 * exact + 1e-12;
        }
        t.add_row({deltas[k], r.per_delta[k], exact});
        rows.push_back({{"delta", deltas[k]}, {"alpha_upper", r.per_delta[k]}, {"alpha_brute", number(exact)}});
    }
    if (!out.empty()) save_table(out, t);
    emit(json{{"command", "metric"}, {"p", number(p)}, {"alpha", number(r.value)}, {"per_delta", rows},
                      {"passed", ok}}
                     );
    return ok ? 0 : kFail;
}

int cmd_bdsde(const Config& cfg, const std::string& out, const std::string& samples) {
    const BdsdeRun run = bdsde_from(cfg);
    const BdsdeResult r = solve_bdsde(run);
    warn_unused(cfg);
    const BdsdeAggregate& a = r.aggregate;
    if (!out.empty()) {
        Table t;
        t.schema = "roughbsde.bdsde";
        t.columns = {"n", "mean_y0", "std_error", "q05", "q50", "q95", "mean_z_energy", "rejections"};
        t.add_row({static_cast<double>(a.n), a.mean_y0, a.std_error, a.q05, a.q50, a.q95, a.mean_z_energy,
                   static_cast<double>(r.rejections)});
        save_table(out, t);
    }
    if (!samples.empty()) {
        Table t;
        t.schema = "roughbsde.bdsde_samples";
        t.columns = {"index", "seed", "attempts", "y0", "z_energy", "w_qvar", "jumps"};
        for (const auto& s : r.samples)
            t.rows.push_back({std::to_string(s.index), std::to_string(s.seed), std::to_string(s.attempts),
                              format_double(s.y0), format_double(s.z_energy), format_double(s.w_qvar),
                              std::to_string(s.jumps)});
        save_table(samples, t);
    }
    // The aggregate must be recomputable from the per-sample rows.
    const BdsdeAggregate again = aggregate_samples(r.samples);
    const bool ok = again.mean_y0 == a.mean_y0 && again.std_error == a.std_error && std::isfinite(a.mean_y0);
    emit(json{{"command", "bdsde"},       {"n", a.n},
                      {"mean_y0", a.mean_y0},     {"std_error", a.std_error},
                      {"q05", a.q05},             {"q50", a.q50},
                      {"q95", a.q95},             {"mean_z_energy", a.mean_z_energy},
                      {"rejections", r.rejections}, {"passed", ok}}
                     );
    return ok ? 0 : kFail;
}

int cmd_stability(const Config& cfg, const std::string& out) {
    const StabilityConfig sc = stability_from(cfg);
    const StabilityReport r = stability_experiment(sc);
    warn_unused(cfg);
    Table t;
    t.schema = "roughbsde.stability";
    t.meta = {{"paths", std::to_string(r.paths)}, {"exact_paths", r.exact_paths ? "1" : "0"}};
    t.columns = {"mesh", "mean_alpha_y", "q90_alpha_y", "z_l2", "alpha_w"};
    json rows = json::array();
    for (const auto& row : r.rows) {
        t.add_row({row.mesh, row.mean_alpha_y, row.q90_alpha_y, row.z_l2, row.alpha_w});
        rows.push_back({{"mesh", row.mesh}, {"mean_alpha_y", row.mean_alpha_y}, {"q90_alpha_y", row.q90_alpha_y},
                        {"z_l2", row.z_l2}, {"alpha_w", row.alpha_w}});
    }
    if (!out.empty()) save_table(out, t);
    emit(json{{"command", "stability"},
                      {"rows", rows},
                      {"alpha_y_decreasing", r.alpha_y_decreasing},
                      {"alpha_w_decreasing", r.alpha_w_decreasing},
                      {"z_decreasing", r.z_decreasing},
                      {"final_third", r.final_third},
                      {"passed", r.passed()}}
                     );
    return r.passed() ? 0 : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rough BSDE solver and decorated-path metric toolkit"};
    app.require_subcommand(1);

    std::string config_file, out, extra;
    std::vector<std::string> overrides;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_file, "key=value configuration file");
        sub->add_option("--set", overrides, "override a configuration key (key=value)");
    };

    bool quick = false;
    auto* st = app.add_subcommand("selftest", "run every module's invariant checks");
    st->add_flag("--quick", quick, "skip the stability ladder");
    st->add_option("-o,--out", out, "CSV report");

    std::string xfile, yfile;
    bool forward = false;
    double p = 3.0, q = 1.0;
    auto* yg = app.add_subcommand("young", "Young integral of two CSV paths");
    yg->add_option("integrand", xfile, "path CSV")->required()->check(CLI::ExistingFile);
    yg->add_option("integrator", yfile, "path CSV")->required()->check(CLI::ExistingFile);
    yg->add_flag("--forward", forward, "left-point sums instead of the backward integral");
    yg->add_option("--p", p, "variation exponent of the integrand");
    yg->add_option("--q", q, "variation exponent of the integrator");
    yg->add_option("-o,--out", out, "cumulative integral CSV");

    auto* dr = app.add_subcommand("driver", "generate a rough driver path");
    add_config(dr);
    dr->add_option("-o,--out", out, "path CSV");

    auto* so = app.add_subcommand("solve", "solve an RBSDE on the binomial tree");
    add_config(so);
    so->add_option("-o,--out", out, "summary CSV");
    so->add_option("--nodes", extra, "full node dump CSV");

    double delta = 0.1, tolerance = 1e-8;
    auto* sr = app.add_subcommand("stretch", "time-stretched solve and retraction");
    add_config(sr);
    sr->add_option("--delta", delta, "total fictitious time")->check(CLI::PositiveNumber);
    sr->add_option("--tolerance", tolerance, "asserted bound on |Y_direct - Y_retracted|");
    sr->add_option("-o,--out", out, "node comparison CSV");

    std::string afile, bfile;
    std::vector<double> deltas{0.01};
    bool brute = false;
    AlphaOptions aopts;
    auto* me = app.add_subcommand("metric", "alpha_p distance between decorated paths");
    me->add_option("a", afile, "decorated CSV bundle")->required()->check(CLI::ExistingFile);
    me->add_option("b", bfile, "decorated CSV bundle")->required()->check(CLI::ExistingFile);
    me->add_option("--p", p, "variation exponent (inf allowed)");
    me->add_option("--delta", deltas, "delta schedule")->delimiter(',');
    me->add_option("--beam", aopts.beam);
    me->add_option("--refine", aopts.refine);
    me->add_option("--bands", aopts.bands);
    me->add_flag("--brute", brute, "also run the exhaustive search and assert the 1.05 factor");
    me->add_option("-o,--out", out, "per-delta CSV");

    auto* bd = app.add_subcommand("bdsde", "annealed solve over sampled drivers");
    add_config(bd);
    bd->add_option("-o,--out", out, "aggregate CSV");
    bd->add_option("--samples", extra, "per-sample CSV");

    auto* sb = app.add_subcommand("stability", "Wong-Zakai stability ladder");
    add_config(sb);
    sb->add_option("-o,--out", out, "table CSV");

    CLI11_PARSE(app, argc, argv);
    try {
        if (st->parsed()) return cmd_selftest(quick, out);
        if (yg->parsed()) return cmd_young(xfile, yfile, forward, p, q, out);
        if (me->parsed()) return cmd_metric(afile, bfile, p, deltas, brute, aopts, out);
        const Config cfg = load_config(config_file, overrides);
        if (dr->parsed()) return cmd_driver(cfg, out);
        if (so->parsed()) return cmd_solve(cfg, out, extra);
        if (sr->parsed()) return cmd_stretch(cfg, delta, tolerance, out);
        if (bd->parsed()) return cmd_bdsde(cfg, out, extra);
        if (sb->parsed()) return cmd_stability(cfg, out);
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << '\n';
        return kError;
    } catch (const ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
