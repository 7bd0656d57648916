#include "lrising/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "lrising/contour.hpp"
#include "lrising/gibbs.hpp"
#include "lrising/metastate.hpp"
#include "lrising/toy.hpp"

namespace lrising {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

static std::string fmt(long v) { return std::to_string(v); }
static std::string fmt(int v) { return std::to_string(v); }
static std::string fmt(std::size_t v) { return std::to_string(v); }

namespace {

std::string pattern_text(std::size_t idx, std::size_t len)
{
    std::string s;
    for (std::size_t b = 0; b < len; ++b)
        s += ((idx >> (len - 1 - b)) & 1u) ? '+' : '-';
    return s;
}

} // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size())
{
    if (!out_)
        throw std::runtime_error("cannot write " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (cells.size() != width_)
        throw std::logic_error("CsvWriter: row width differs from header");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void RunReport::check(const std::string& name, double value, const std::string& relation,
                      double threshold)
{
    bool ok = false;
    if (relation == "<")
        ok = value < threshold;
    else if (relation == "<=")
        ok = value <= threshold;
    else if (relation == ">")
        ok = value > threshold;
    else if (relation == ">=")
        ok = value >= threshold;
    else if (relation == "==")
        ok = value == threshold;
    else
        throw std::logic_error("unknown relation " + relation);
    assertions.push_back({name, value, threshold, relation, ok});
}

bool RunReport::all_pass() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

namespace {

struct Ctx
{
    const ExperimentConfig& cfg;
    fs::path dir;
    RunReport& report;
    std::ostream& log;

    CsvWriter csv(const std::string& name, const std::vector<std::string>& header)
    {
        report.outputs.push_back(name);
        return CsvWriter((dir / name).string(), header);
    }
};

void cmd_toy_scan(Ctx& c)
{
    const auto& g = c.cfg;
    const double alpha = g.real("alpha");
    const auto grid = g.int_list("N_grid");
    const int yf = static_cast<int>(g.integer("Y_factor"));
    const int Y = static_cast<int>(g.integer("Y"));
    const auto samples = static_cast<std::size_t>(g.integer("samples"));
    const double tol = g.real("slope_tolerance");
    auto sb = smallball_scaling_experiment(alpha, g.real("K"), g.real("beta"), grid, samples,
                                           g.u64("seed"), yf, Y, g.real("J"));
    auto w = c.csv("toy_smallball.csv", {"N", "Y", "p", "stderr_p", "scaled", "tail_variance_bound"});
    for (const auto& r : sb.rows)
        w.row({fmt(r.N), fmt(r.Y), fmt(r.p), fmt(r.stderr_p), fmt(r.scaled), fmt(r.tail_variance_bound)});
    auto var = variance_scaling_experiment(alpha, grid, samples, g.u64("seed"), yf, Y,
                                           static_cast<int>(g.integer("bootstrap")), g.real("J"));
    auto v = c.csv("toy_variance.csv", {"N", "Y", "var", "boot_stderr", "exact_var"});
    for (const auto& r : var.rows)
        v.row({fmt(r.N), fmt(r.Y), fmt(r.var), fmt(r.boot_stderr), fmt(r.exact_var)});
    if (alpha > 0.5) {
        c.report.check("smallball_slope_error", std::fabs(sb.fit.slope + (alpha - 0.5)), "<=", tol);
        c.report.check("variance_slope_error", std::fabs(var.fit.slope - (2 * alpha - 1)), "<=", tol);
    } else if (alpha < 0.5 && var.rows.size() >= 2) {
        const auto& a = var.rows.front();
        const auto& b = var.rows.back();
        double se = std::hypot(a.boot_stderr, b.boot_stderr);
        c.report.check("variance_plateau_z", std::fabs(b.var - a.var) / se, "<", 3.0);
    }
}

void cmd_wllt(Ctx& c)
{
    const auto& g = c.cfg;
    const double alpha = g.real("alpha");
    const double tol = g.real("integral_tolerance");
    auto w = c.csv("wllt.csv", {"N", "Y", "A_N", "A_bound", "tau_N", "integral", "gaussian"});
    std::vector<WlltSchedule> rows;
    double worst = 0.0, margin = -1e300;
    for (int N : g.int_list("N_grid")) {
        ModelParams p{alpha, 1.0, g.real("J"), N, static_cast<int>(g.integer("Y"))};
        auto r = wllt_integral_check(p);
        rows.push_back(r.schedule);
        worst = std::max(worst, r.value);
        margin = std::max(margin, r.schedule.A_N - r.schedule.A_bound);
        w.row({fmt(N), fmt(p.Y), fmt(r.schedule.A_N), fmt(r.schedule.A_bound), fmt(r.schedule.tau_N),
               fmt(r.value), fmt(r.gaussian)});
    }
    c.report.check("integral_max", worst, "<=", 2 * M_PI * (1 + tol));
    c.report.check("A_N_minus_bound_max", margin, "<", 0.0);
    c.report.check("speed_condition_decreasing", speed_condition_decreasing(rows) ? 1 : 0, "==", 1);
}

void cmd_contours(Ctx& c)
{
    const auto& g = c.cfg;
    const int Nmax = static_cast<int>(g.integer("N"));
    if (Nmax > 10)
        throw ConfigError("contours-verify needs N <= 10");
    const double cc = g.real("c");
    auto w = c.csv("contours_verify.csv", {"N", "configs", "bijection_failures",
                                           "triangle_condition_failures", "contour_failures",
                                           "omega_plus", "omega_minus"});
    std::size_t bad_total = 0;
    for (int N = 1; N <= Nmax; ++N) {
        std::size_t total = std::size_t{1} << (2 * N + 1), bij = 0, tri = 0, con = 0, plus = 0;
        for (std::size_t code = 0; code < total; ++code) {
            SpinConfig s = SpinConfig::from_code(N, code);
            TriangleSet ts = triangles_from_config(s);
            if (!(config_from_triangles(N, ts.triangles, ts.ext_sign) == s))
                ++bij;
            const auto& T = ts.triangles;
            bool ok = true;
            for (std::size_t i = 0; i < T.size() && ok; ++i)
                for (std::size_t j = i + 1; j < T.size() && ok; ++j)
                    ok = triangle_distance(T[i], T[j]) >= std::min(T[i].mass(), T[j].mass());
            tri += !ok;
            con += !contours_valid(T, group_contours(T, cc));
            plus += ts.ext_sign == 1;
        }
        bad_total += bij + tri + con;
        w.row({fmt(N), fmt(total), fmt(bij), fmt(tri), fmt(con), fmt(plus), fmt(total - plus)});
        c.log << "N=" << N << " configs=" << total << " failures=" << bij + tri + con << "\n";
    }
    c.report.check("failures", static_cast<double>(bad_total), "==", 0.0);
}

void cmd_peierls(Ctx& c)
{
    const auto& g = c.cfg;
    const double alpha = g.real("alpha");
    const int N = static_cast<int>(g.integer("N"));
    const int M = static_cast<int>(g.integer("M_max"));
    ModelParams p{alpha, 1.0, g.real("J"), N, N + 1};
    auto r = peierls_check(alpha, M, p, g.real("c"));
    auto w = c.csv("peierls.csv", {"M", "min_ratio", "zeta_hat"});
    for (int m = 1; m <= M; ++m)
        w.row({fmt(m), fmt(r.min_ratio_by_cutoff[m]), fmt(2 * r.min_ratio_by_cutoff[m])});
    c.log << "contours=" << r.contours << " zeta_hat=" << r.zeta_hat
          << " zeta_hat_interior=" << r.zeta_hat_interior << "\n";
    c.report.check("min_ratio", r.min_ratio, ">", 0.0);
    if (M >= 2) {
        double a = r.min_ratio_by_cutoff[M - 1], b = r.min_ratio_by_cutoff[M];
        c.report.check("zeta_relative_change", std::fabs(a - b) / b, "<=", g.real("stability_tolerance"));
    }
}

void cmd_rho(Ctx& c)
{
    const auto& g = c.cfg;
    auto betas = g.real_list("betas");
    auto rows = rho_scan(betas, g.real("alpha"), g.real("a"), g.real("epsilon"),
                         static_cast<int>(g.integer("N")), static_cast<int>(g.integer("n")),
                         static_cast<int>(g.integer("M_max")), g.real("c"), g.real("J"),
                         g.boolean("minus_variant"));
    auto w = c.csv("rho.csv", {"beta", "rho", "K", "contours"});
    std::size_t increases = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        w.row({fmt(betas[i]), fmt(rows[i].rho), fmt(rows[i].K), fmt(rows[i].contours)});
        if (i > 0 && !(rows[i].rho < rows[i - 1].rho))
            ++increases;
    }
    c.report.check("non_decreasing_steps", static_cast<double>(increases), "==", 0.0);
    c.report.check("rho_last", rows.back().rho, "<", g.real("rho_max"));
}

BoundaryCondition config_boundary(const ExperimentConfig& g)
{
    const int N = static_cast<int>(g.integer("N"));
    int Y = static_cast<int>(g.integer("Y"));
    if (Y <= N)
        throw ConfigError("key 'Y' must exceed N");
    return make_boundary(bc_kind_from_string(g.text("bc")), N, Y, g.u64("seed"), g.u64("stream"));
}

void cmd_gibbs_exact(Ctx& c)
{
    const auto& g = c.cfg;
    ModelParams p{g.real("alpha"), g.real("beta"), g.real("J"), static_cast<int>(g.integer("N")),
                  static_cast<int>(g.integer("Y"))};
    auto X = g.int_list("X");
    auto eta = config_boundary(g);
    auto ens = exact_measure(p, eta);
    auto mu = ens.marginal(X), nup = ens.marginal(X, 1), num = ens.marginal(X, -1);
    double lam = mixture_weight(ens);
    auto w = c.csv("gibbs_exact_marginal.csv", {"pattern", "mu", "nu_plus", "nu_minus"});
    double decompo = 0.0;
    for (std::size_t i = 0; i < mu.probs.size(); ++i) {
        w.row({pattern_text(i, X.size()), fmt(mu.probs[i]), fmt(nup.probs[i]), fmt(num.probs[i])});
        decompo = std::max(decompo, std::fabs(mu.probs[i] - (lam * num.probs[i] + (1 - lam) * nup.probs[i])));
    }
    auto s = c.csv("gibbs_exact_summary.csv",
                   {"logZ", "logZ_plus", "logZ_minus", "lambda", "F", "W", "xi_part", "m0"});
    FreeEnergy f;
    if (p.beta > 0)
        f = free_energy_difference(ens);
    s.row({fmt(ens.logZ), fmt(ens.logZ_plus), fmt(ens.logZ_minus), fmt(lam), fmt(f.F), fmt(f.W),
           fmt(f.xi_part), fmt(ens.magnetization()[p.N])});
    c.report.check("logZ_consistency", std::fabs(logsumexp(ens.logZ_plus, ens.logZ_minus) - ens.logZ),
                   "<=", 1e-10);
    c.report.check("decomposition_max_error", decompo, "<=", 1e-10);
}

void cmd_gibbs_mc(Ctx& c)
{
    const auto& g = c.cfg;
    ModelParams p{g.real("alpha"), g.real("beta"), g.real("J"), static_cast<int>(g.integer("N")),
                  static_cast<int>(g.integer("Y"))};
    auto X = g.int_list("X");
    auto eta = config_boundary(g);
    auto r = mc_measure(p, eta, static_cast<std::size_t>(g.integer("sweeps")),
                        static_cast<std::size_t>(g.integer("burn_in")), g.u64("seed"), X);
    auto w = c.csv("gibbs_mc_marginal.csv", {"pattern", "prob", "stderr"});
    for (std::size_t i = 0; i < r.marginal.probs.size(); ++i)
        w.row({pattern_text(i, X.size()), fmt(r.marginal.probs[i]), fmt(r.marginal_std_error[i])});
    auto s = c.csv("gibbs_mc_summary.csv", {"m0", "stderr", "samples", "burn_in", "seed"});
    s.row({fmt(r.magnetization0.value), fmt(r.magnetization0.std_error), fmt(r.magnetization0.samples),
           fmt(r.magnetization0.burn_in), std::to_string(r.magnetization0.seed)});
    if (g.boolean("compare_exact") && p.N <= 8) {
        double exact = exact_measure(p, eta).magnetization()[p.N];
        double se = std::max(r.magnetization0.std_error, 1e-12);
        c.report.check("mc_vs_exact_z", std::fabs(r.magnetization0.value - exact) / se, "<=", 3.0);
    }
    if (p.beta > 1)
        c.log << "beta > 1: MC output is a diagnostic only\n";
}

void cmd_metastate(Ctx& c)
{
    const auto& g = c.cfg;
    const double alpha = g.real("alpha");
    std::vector<long> vols;
    for (int n : g.int_list("N_grid"))
        vols.push_back(n);
    auto sched = desk_schedule(alpha, g.real("epsilon"), vols);
    auto mode = g.text("mode") == "exact" ? MetastateMode::exact : MetastateMode::toy;
    auto h = empirical_metastate(alpha, g.real("beta"), sched, g.real("tau"), g.int_list("X"),
                                 static_cast<std::size_t>(g.integer("samples")), g.u64("seed"), mode,
                                 static_cast<int>(g.integer("Y_factor")));
    auto w = c.csv("metastate_balls.csv", {"N", "freq_plus", "freq_minus", "freq_neither"});
    for (const auto& r : h.rows)
        w.row({fmt(r.N), fmt(r.freq_plus), fmt(r.freq_minus), fmt(r.freq_neither)});
    auto l = c.csv("metastate_lambda.csv", {"bin_lo", "bin_hi", "mass"});
    const std::size_t B = h.lambda.mass.size();
    for (std::size_t i = 0; i < B; ++i)
        l.row({fmt(double(i) / B), fmt(double(i + 1) / B), fmt(h.lambda.mass[i])});
    double se = std::hypot(h.stderr_plus, h.stderr_minus);
    c.report.check("ball_symmetry_z", std::fabs(h.freq_plus - h.freq_minus) / std::max(se, 1e-12),
                   "<=", 3.0);
    const auto& last = h.rows.back();
    if (alpha > 0.5)
        c.report.check("pure_ball_frequency_last", last.freq_plus + last.freq_minus, ">=",
                       g.real("concentration_min"));
    else if (alpha < 0.5)
        c.report.check("neither_frequency_last", last.freq_neither, ">=", g.real("neither_min"));
}

void cmd_null(Ctx& c)
{
    const auto& g = c.cfg;
    auto r = null_recurrence_profile(g.real("alpha"), g.real("beta"), static_cast<int>(g.integer("N_max")),
                                     g.real("tau"), g.u64("seed"), g.u64("stream"),
                                     static_cast<int>(g.integer("Y_factor")), g.real("J"));
    auto w = c.csv("null_recurrence.csv", {"n", "W", "freq_plus", "freq_minus", "freq_mixed"});
    for (const auto& row : r.rows)
        w.row({fmt(row.n), fmt(row.W), fmt(row.freq_plus), fmt(row.freq_minus), fmt(row.freq_mixed)});
    const auto& e = r.endpoint;
    c.report.check("mixed_frequency", e.freq_mixed, "<=", g.real("mixed_max"));
    c.report.check("plus_frequency_low", e.freq_plus, ">=", g.real("pure_min"));
    c.report.check("plus_frequency_high", e.freq_plus, "<=", g.real("pure_max"));
    c.report.check("minus_frequency_low", e.freq_minus, ">=", g.real("pure_min"));
    c.report.check("minus_frequency_high", e.freq_minus, "<=", g.real("pure_max"));
}

void cmd_dichotomy(Ctx& c)
{
    const auto& g = c.cfg;
    DichotomyConfig d;
    d.N = static_cast<int>(g.integer("N"));
    d.samples = static_cast<std::size_t>(g.integer("samples"));
    d.var_grid = g.int_list("var_grid");
    d.var_samples = static_cast<std::size_t>(g.integer("var_samples"));
    d.seed = g.u64("seed");
    d.y_factor = static_cast<int>(g.integer("Y_factor"));
    d.J = g.real("J");
    auto rows = dichotomy_report(g.real_list("alpha_list"), g.real("beta"), d);
    auto w = c.csv("dichotomy.csv", {"alpha", "pure_mass", "mixed_mass", "mean_lambda",
                                     "stderr_lambda", "var_exponent", "var_exponent_stderr"});
    for (const auto& r : rows) {
        w.row({fmt(r.alpha), fmt(r.pure_mass), fmt(r.mixed_mass), fmt(r.mean_lambda),
               fmt(r.stderr_lambda), fmt(r.var_exponent), fmt(r.var_exponent_stderr)});
        std::string tag = "alpha_" + fmt(r.alpha);
        c.report.check(tag + "_mean_lambda_z",
                       std::fabs(r.mean_lambda - 0.5) / std::max(r.stderr_lambda, 1e-12), "<=", 3.0);
        if (r.alpha > 0.5)
            c.report.check(tag + "_var_exponent_error", std::fabs(r.var_exponent - (2 * r.alpha - 1)),
                           "<=", 0.05);
    }
}

json manifest_base(const std::string& command)
{
    json m;
    m["tool"] = "lrising";
    m["version"] = kToolVersion;
    m["command"] = command;
    return m;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

} // namespace

void write_error_manifest(const std::string& dir, const std::string& command, int code,
                          const std::string& type, const std::string& message)
{
    fs::create_directories(dir);
    json m = manifest_base(command);
    m["exit_code"] = code;
    m["error"] = {{"type", type}, {"message", message}};
    write_json(fs::path(dir) / "manifest.json", m);
}

int run(const ExperimentConfig& cfg, std::ostream& log)
{
    const auto start = std::chrono::steady_clock::now();
    fs::path dir = cfg.text("output_dir");
    fs::create_directories(dir);
    RunReport report;
    Ctx ctx{cfg, dir, report, log};
    json error = nullptr;
    int code = kExitPass;
    try {
        const std::string& k = cfg.command;
        if (k == "toy-scan")
            cmd_toy_scan(ctx);
        else if (k == "wllt-check")
            cmd_wllt(ctx);
        else if (k == "contours-verify")
            cmd_contours(ctx);
        else if (k == "peierls")
            cmd_peierls(ctx);
        else if (k == "rho-scan")
            cmd_rho(ctx);
        else if (k == "gibbs-exact")
            cmd_gibbs_exact(ctx);
        else if (k == "gibbs-mc")
            cmd_gibbs_mc(ctx);
        else if (k == "metastate")
            cmd_metastate(ctx);
        else if (k == "null-recurrence")
            cmd_null(ctx);
        else if (k == "dichotomy")
            cmd_dichotomy(ctx);
        else
            throw ConfigError("unknown command '" + k + "'");
        code = report.all_pass() ? kExitPass : kExitAssertion;
    } catch (const ConfigError& e) {
        code = kExitConfig;
        error = {{"type", "config"}, {"message", e.what()}};
    } catch (const std::exception& e) {
        code = kExitInternal;
        error = {{"type", "internal"}, {"message", e.what()}};
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m = manifest_base(cfg.command);
    m["seed"] = cfg.u64("seed");
    m["config"] = cfg.params;
    m["config_hash"] = config_hash(cfg);
    m["wall_time_s"] = wall;
    m["outputs"] = report.outputs;
    m["assertions"] = json::array();
    for (const auto& a : report.assertions) {
        m["assertions"].push_back({{"name", a.name},
                                   {"value", a.value},
                                   {"relation", a.relation},
                                   {"threshold", a.threshold},
                                   {"pass", a.pass}});
        log << (a.pass ? "PASS " : "FAIL ") << a.name << " = " << fmt(a.value) << " " << a.relation
            << " " << fmt(a.threshold) << "\n";
    }
    m["exit_code"] = code;
    m["error"] = error;
    write_json(dir / "manifest.json", m);
    if (!error.is_null())
        log << "error: " << error["message"].get<std::string>() << "\n";
    return code;
}

} // namespace lrising
