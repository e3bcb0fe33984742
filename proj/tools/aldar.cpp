// Command-line front end for the ALDAR library.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aldar/asymtest.hpp"
#include "aldar/diagnostics.hpp"
#include "aldar/error.hpp"
#include "aldar/experiments.hpp"
#include "aldar/forecast.hpp"
#include "aldar/selection.hpp"
#include "aldar/stationarity.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace aldar;

namespace {

constexpr const char* kSchemaVersion = "1";

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Parse: return 3;
        case ErrorKind::Numeric: return 4;
        case ErrorKind::Convergence: return 5;
    }
    return 1;
}

// ---------------------------------------------------------------- input

struct LoadedSeries {
    SeriesSample sample;
    std::vector<std::string> dates;  // empty when the file has no date column
};

bool parse_double(const std::string& s, double& out) {
    const char* b = s.c_str();
    char* e = nullptr;
    out = std::strtod(b, &e);
    if (e == b) return false;
    while (*e == ' ' || *e == '\t') ++e;
    return *e == '\0' && std::isfinite(out);
}

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

/// One numeric column, optionally preceded by a date column and a header row.
/// Lines starting with '#' are comments. Both LF and CRLF line ends work.
LoadedSeries read_series(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Parse, "cannot open input file '" + path + "'");
    LoadedSeries out;
    out.sample.name = fs::path(path).filename().string();
    std::string line;
    int lineno = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(t);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
        if (fields.size() > 2 || fields.empty()) {
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected one value or 'date,value', got " +
                                       std::to_string(fields.size()) + " fields");
        }
        double v = 0.0;
        if (!parse_double(fields.back(), v)) {
            if (!seen_data && out.sample.values.empty()) {
                seen_data = true;  // header row
                continue;
            }
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": cannot parse '" + fields.back() + "' as a number");
        }
        seen_data = true;
        if (fields.size() == 2) {
            if (!out.dates.empty() || out.sample.values.empty()) out.dates.push_back(fields[0]);
            else fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": date column appears mid-file");
        } else if (!out.dates.empty()) {
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": missing date column");
        }
        out.sample.values.push_back(v);
    }
    if (out.sample.values.empty()) fail(ErrorKind::Parse, "input file '" + path + "' has no data rows");
    return out;
}

/// r_t = 100 (ln p_t - ln p_{t-1}), centered by the full-sample mean.
LoadedSeries to_centered_log_returns(const LoadedSeries& prices) {
    const auto& p = prices.sample.values;
    if (p.size() < 3) fail(ErrorKind::Usage, "need at least three prices for log returns");
    LoadedSeries out;
    out.sample.name = prices.sample.name + " (centered log returns)";
    for (std::size_t t = 1; t < p.size(); ++t) {
        if (!(p[t] > 0.0 && p[t - 1] > 0.0)) fail(ErrorKind::Usage, "log returns need positive prices");
        out.sample.values.push_back(100.0 * (std::log(p[t]) - std::log(p[t - 1])));
    }
    double m = 0.0;
    for (double v : out.sample.values) m += v;
    m /= static_cast<double>(out.sample.values.size());
    for (double& v : out.sample.values) v -= m;
    if (!prices.dates.empty()) out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    return out;
}

void check_output_path(const std::string& path) {
    if (path.empty()) return;
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        fail(ErrorKind::Parse, "output directory '" + parent.string() + "' does not exist");
}

void check_input_path(const std::string& path) {
    if (path.empty()) fail(ErrorKind::Usage, "--input is required");
    if (!fs::is_regular_file(path)) fail(ErrorKind::Parse, "cannot open input file '" + path + "'");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Parse, "cannot write '" + path + "'");
    out << content;
    if (!out) fail(ErrorKind::Parse, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------- json

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_json(const Mat& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

json params_json(const Vec& theta) {
    const ModelParams m = ModelParams::unflatten(theta);
    return json{{"alpha", vec_json(m.alpha)},
                {"omega", m.omega},
                {"beta_plus", vec_json(m.beta_plus)},
                {"beta_minus", vec_json(m.beta_minus)}};
}

json fit_json(const FitResult& f) {
    json trace = json::array();
    for (const auto& s : f.trace)
        trace.push_back({{"iter", s.iter}, {"f", s.f}, {"pg_norm", s.pg_norm}, {"step", s.step}, {"active", s.active}});
    return json{{"p", f.order()},
                {"n", f.n},
                {"restricted", f.restricted},
                {"theta", params_json(f.theta_hat.flatten())},
                {"asd", params_json(f.asd)},
                {"loglik", f.loglik},
                {"converged", f.converged},
                {"iterations", f.iterations},
                {"pg_norm", f.pg_norm},
                {"best_start", f.best_start},
                {"trace", trace}};
}

/// Every option of the subcommand with its resolved value.
json resolved_config(const CLI::App* sub) {
    json c = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;
        std::vector<std::string> vals = opt->reduced_results();
        if (vals.empty()) {
            const std::string d = opt->get_default_str();
            if (d.empty()) continue;
            vals = {d};
        }
        std::string joined;
        for (std::size_t i = 0; i < vals.size(); ++i) joined += (i ? "," : "") + vals[i];
        c[name] = joined;
    }
    return c;
}

json report_header(const std::string& command, const CLI::App* sub, std::uint64_t seed) {
    return json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", resolved_config(sub)}, {"seed", seed}};
}

void emit_report(const json& report, const std::string& out) {
    if (!out.empty()) write_file(out, report.dump(2) + "\n");
}

// ---------------------------------------------------------------- tables

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

void print_fit(const FitResult& f, const std::string& title) {
    const int p = f.order();
    const Vec th = f.theta_hat.flatten();
    std::cout << title << " (p = " << p << ", n = " << f.n << ", loglik = " << fmt(f.loglik, 3)
              << (f.converged ? "" : ", NOT CONVERGED") << ")\n";
    std::cout << std::left << std::setw(14) << "parameter" << std::right << std::setw(12) << "estimate"
              << std::setw(12) << "asd" << "\n";
    for (int j = 0; j < th.size(); ++j) {
        std::string name;
        if (j < p) name = "alpha" + std::to_string(j + 1);
        else if (j == p) name = "omega";
        else if (j <= 2 * p) name = "beta+" + std::to_string(j - p);
        else name = "beta-" + std::to_string(j - 2 * p);
        std::cout << std::left << std::setw(14) << name << std::right << std::setw(12) << fmt(th(j)) << std::setw(12)
                  << fmt(f.asd(j)) << "\n";
    }
}

// ---------------------------------------------------------------- shared options

struct FitFlags {
    int n_starts = 5;
    double omega_lo = ParamBounds{}.omega_lo, omega_hi = ParamBounds{}.omega_hi;
    double beta_lo = ParamBounds{}.beta_lo, beta_hi = ParamBounds{}.beta_hi;
    double alpha_max = ParamBounds{}.alpha_abs_max;
    int max_iter = NewtonOptions{}.max_iter;

    void add(CLI::App* sub) {
        sub->add_option("--n-starts", n_starts, "Optimizer starts (data-driven plus jittered)")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->add_option("--omega-lo", omega_lo, "Lower bound for omega")->capture_default_str();
        sub->add_option("--omega-hi", omega_hi, "Upper bound for omega")->capture_default_str();
        sub->add_option("--beta-lo", beta_lo, "Lower bound for beta coefficients")->capture_default_str();
        sub->add_option("--beta-hi", beta_hi, "Upper bound for beta coefficients")->capture_default_str();
        sub->add_option("--alpha-max", alpha_max, "Bound on |alpha_i|")->capture_default_str();
        sub->add_option("--max-iter", max_iter, "Newton iteration cap per start")->capture_default_str();
    }
    ParamBounds bounds() const {
        ParamBounds b{omega_lo, omega_hi, beta_lo, beta_hi, alpha_max};
        b.validate();
        return b;
    }
    FitOptions options(std::uint64_t seed) const {
        FitOptions o;
        o.n_starts = n_starts;
        o.seed = seed;
        o.newton.max_iter = max_iter;
        return o;
    }
};

struct InputFlags {
    std::string input;
    bool log_returns = false;
    void add(CLI::App* sub) {
        sub->add_option("--input,-i", input, "CSV with one value column and an optional date column");
        sub->add_flag("--log-returns", log_returns, "Treat values as prices: 100 * diff(log), then center");
    }
    LoadedSeries load() const {
        check_input_path(input);
        LoadedSeries s = read_series(input);
        return log_returns ? to_centered_log_returns(s) : s;
    }
};

json data_json(const LoadedSeries& s) {
    json d{{"name", s.sample.name}, {"n", s.sample.size()}};
    if (!s.dates.empty()) {
        d["first_date"] = s.dates.front();
        d["last_date"] = s.dates.back();
    }
    return d;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) {
    if (opt->count() > 0) return value;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ModelParams dgp_from_flags(const std::string& preset, const std::vector<double>& alpha, double omega,
                           const std::vector<double>& bp, const std::vector<double>& bm, double k, double c1,
                           double c2) {
    if (preset == "table1") return table1_dgp();
    if (preset == "table2") return table2_dgp();
    if (preset == "table3") return table3_dgp(k);
    if (preset == "table4") return table4_dgp(c1, c2);
    if (!preset.empty() && preset != "custom") fail(ErrorKind::Usage, "unknown --dgp preset '" + preset + "'");
    if (alpha.empty()) fail(ErrorKind::Usage, "give --dgp or --alpha/--omega/--beta-plus/--beta-minus");
    auto v = [](const std::vector<double>& x) { return Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())); };
    return ModelParams(v(alpha), omega, v(bp), v(bm));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aldar: asymmetric linear double autoregression toolkit"};
    app.set_config("--config", "", "Key-value configuration file (flags on the command line take precedence)");
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a series from an ALDAR model");
    std::string sim_preset, sim_innov = "normal", sim_out;
    std::vector<double> sim_alpha, sim_bp, sim_bm;
    double sim_omega = 1.0, sim_k = 0.0, sim_c1 = 0.0, sim_c2 = 0.0;
    long long sim_n = 2000;
    int sim_burn = 500;
    std::uint64_t sim_seed = 0;
    sim->add_option("--dgp", sim_preset, "Preset: table1, table2, table3, table4 or custom");
    sim->add_option("--alpha", sim_alpha, "Comma-separated alpha")->delimiter(',');
    sim->add_option("--omega", sim_omega, "omega")->capture_default_str();
    sim->add_option("--beta-plus", sim_bp, "Comma-separated beta+")->delimiter(',');
    sim->add_option("--beta-minus", sim_bm, "Comma-separated beta-")->delimiter(',');
    sim->add_option("--k", sim_k, "Asymmetry shift for the table3 preset")->capture_default_str();
    sim->add_option("--c1", sim_c1, "c1 for the table4 preset")->capture_default_str();
    sim->add_option("--c2", sim_c2, "c2 for the table4 preset")->capture_default_str();
    sim->add_option("--n", sim_n, "Number of observations")->capture_default_str();
    sim->add_option("--burn-in", sim_burn, "Discarded warm-up steps (>= 200)")->capture_default_str();
    sim->add_option("--innovation", sim_innov, "normal, t5, st:5:-1.2 or laplace")->capture_default_str();
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Random seed (generated and recorded when absent)");
    sim->add_option("--out,-o", sim_out, "Output CSV; metadata goes to <out>.meta.json")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Quasi-maximum likelihood fit");
    InputFlags fit_in;
    FitFlags fit_flags;
    int fit_p = 1;
    bool fit_restr = false;
    std::uint64_t fit_seed = FitOptions{}.seed;
    std::string fit_out;
    fit_in.add(fit);
    fit_flags.add(fit);
    fit->add_option("--p", fit_p, "Model order")->capture_default_str()->check(CLI::PositiveNumber);
    fit->add_flag("--restricted", fit_restr, "Also fit under beta+ = beta-");
    fit->add_option("--seed", fit_seed, "Seed of the jittered starts")->capture_default_str();
    fit->add_option("--out,-o", fit_out, "JSON report path");

    // select
    auto* sel = app.add_subcommand("select", "Order selection by BIC1 and BIC2");
    InputFlags sel_in;
    FitFlags sel_flags;
    int sel_pmax = 5;
    std::uint64_t sel_seed = FitOptions{}.seed;
    std::string sel_out;
    sel_in.add(sel);
    sel_flags.add(sel);
    sel->add_option("--p-max", sel_pmax, "Largest order")->capture_default_str()->check(CLI::PositiveNumber);
    sel->add_option("--seed", sel_seed, "Seed of the jittered starts")->capture_default_str();
    sel->add_option("--out,-o", sel_out, "JSON report path");

    // test
    auto* tst = app.add_subcommand("test", "Wald, LM and QLR tests of beta+ = beta-");
    InputFlags tst_in;
    FitFlags tst_flags;
    int tst_p = 1;
    std::string tst_psi = "restricted", tst_out;
    std::uint64_t tst_seed = FitOptions{}.seed;
    tst_in.add(tst);
    tst_flags.add(tst);
    tst->add_option("--p", tst_p, "Model order")->capture_default_str()->check(CLI::PositiveNumber);
    tst->add_option("--psi-source", tst_psi, "Fit supplying the QLR weights: restricted or unrestricted")
        ->capture_default_str()
        ->check(CLI::IsMember({"restricted", "unrestricted"}));
    tst->add_option("--seed", tst_seed, "Seed of the jittered starts")->capture_default_str();
    tst->add_option("--out,-o", tst_out, "JSON report path");

    // diagnose
    auto* dia = app.add_subcommand("diagnose", "Residual ACFs and the mixed portmanteau test");
    InputFlags dia_in;
    FitFlags dia_flags;
    int dia_p = 1;
    std::vector<int> dia_m{6, 12, 18};
    std::uint64_t dia_seed = FitOptions{}.seed;
    std::string dia_out;
    dia_in.add(dia);
    dia_flags.add(dia);
    dia->add_option("--p", dia_p, "Model order")->capture_default_str()->check(CLI::PositiveNumber);
    dia->add_option("--M", dia_m, "Comma-separated lags M")->delimiter(',')->capture_default_str();
    dia->add_option("--seed", dia_seed, "Seed of the jittered starts")->capture_default_str();
    dia->add_option("--out,-o", dia_out, "JSON report path");

    // backtest
    auto* bt = app.add_subcommand("backtest", "Rolling one-step VaR forecasts with ECR, CC and DQ backtests");
    InputFlags bt_in;
    FitFlags bt_flags;
    int bt_p = 1, bt_window = 522, bt_refit = 1;
    std::vector<double> bt_taus{0.01, 0.05, 0.95, 0.99};
    bool bt_warm = false, bt_forecasts = false;
    std::uint64_t bt_seed = FitOptions{}.seed;
    std::string bt_out;
    bt_in.add(bt);
    bt_flags.add(bt);
    bt->add_option("--p", bt_p, "Model order")->capture_default_str()->check(CLI::PositiveNumber);
    bt->add_option("--window", bt_window, "Rolling window length")->capture_default_str();
    bt->add_option("--taus", bt_taus, "Comma-separated quantile levels")->delimiter(',')->capture_default_str();
    bt->add_option("--refit-every", bt_refit, "Refit every k origins")->capture_default_str();
    bt->add_flag("--warm-start", bt_warm, "Seed each refit with the previous estimate (sequential)");
    bt->add_flag("--forecasts", bt_forecasts, "Include every forecast in the report");
    bt->add_option("--seed", bt_seed, "Seed of the jittered starts")->capture_default_str();
    bt->add_option("--out,-o", bt_out, "JSON report path");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Monte Carlo designs and stationarity regions");
    std::string ex_name, ex_out, ex_ckpt;
    int ex_reps = 1000, ex_starts = 3, ex_burn = 500, ex_grid = 81;
    std::vector<int> ex_ns{500, 1000, 2000};
    std::vector<std::string> ex_laws{"normal", "t5", "st:5:-1.2"};
    std::uint64_t ex_seed = 0;
    ex->add_option("name", ex_name, "table1, table2, table3, table4, fig1 or fig2")
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "table3", "table4", "fig1", "fig2"}));
    ex->add_option("--reps", ex_reps, "Replications per cell")->capture_default_str()->check(CLI::PositiveNumber);
    ex->add_option("--n", ex_ns, "Comma-separated sample sizes")->delimiter(',')->capture_default_str();
    ex->add_option("--laws", ex_laws, "Comma-separated innovation laws")->delimiter(',')->capture_default_str();
    ex->add_option("--n-starts", ex_starts, "Optimizer starts per fit")->capture_default_str();
    ex->add_option("--burn-in", ex_burn, "Simulation burn-in")->capture_default_str();
    ex->add_option("--grid", ex_grid, "alpha grid points on [-2, 2] for fig1")->capture_default_str();
    ex->add_option("--checkpoint-dir", ex_ckpt, "Directory for resumable checkpoints");
    auto* ex_seed_opt = ex->add_option("--seed", ex_seed, "Master seed (generated and recorded when absent)");
    ex->add_option("--out,-o", ex_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        apply_thread_env();

        if (sim->parsed()) {
            if (sim_n <= 0) fail(ErrorKind::Usage, "--n must be positive");
            check_output_path(sim_out);
            const std::uint64_t seed = resolve_seed(sim_seed_opt, sim_seed);
            const ModelParams m = dgp_from_flags(sim_preset, sim_alpha, sim_omega, sim_bp, sim_bm, sim_k, sim_c1, sim_c2);
            const InnovationSpec innov = make_innovation(parse_innovation(sim_innov));
            const SeriesSample y = simulate(m, innov, static_cast<std::size_t>(sim_n), sim_burn, seed);
            std::ostringstream csv;
            csv << "y\n" << std::setprecision(17);
            for (double v : y.values) csv << v << '\n';
            write_file(sim_out, csv.str());
            json meta = report_header("simulate", sim, seed);
            meta["params"] = params_json(m.flatten());
            meta["innovation"] = innov.name();
            meta["n"] = sim_n;
            meta["burn_in"] = sim_burn;
            write_file(sim_out + ".meta.json", meta.dump(2) + "\n");
            std::cout << "wrote " << y.size() << " observations to " << sim_out << " (seed " << seed << ")\n";
        } else if (fit->parsed()) {
            check_output_path(fit_out);
            const LoadedSeries s = fit_in.load();
            const ParamBounds b = fit_flags.bounds();
            const FitOptions o = fit_flags.options(fit_seed);
            const Regressors reg = build_regressors(s.sample, fit_p);
            s.sample.validate(fit_p);
            const FitResult f = fit_qmle(reg, b, o);
            json rep = report_header("fit", fit, fit_seed);
            rep["data"] = data_json(s);
            rep["fit"] = fit_json(f);
            print_fit(f, "ALDAR fit");
            if (fit_restr) {
                const FitResult r = fit_restricted(reg, b, o);
                rep["restricted_fit"] = fit_json(r);
                std::cout << "\n";
                print_fit(r, "Restricted fit (beta+ = beta-)");
            }
            emit_report(rep, fit_out);
            if (!f.converged) fail(ErrorKind::Convergence, "fit did not converge (report written)");
        } else if (sel->parsed()) {
            check_output_path(sel_out);
            const LoadedSeries s = sel_in.load();
            const SelectionReport r = select_order(s.sample, sel_pmax, sel_flags.bounds(), sel_flags.options(sel_seed));
            json rep = report_header("select", sel, sel_seed);
            rep["data"] = data_json(s);
            json rows = json::array();
            std::cout << std::setw(4) << "p" << std::setw(14) << "loglik" << std::setw(14) << "BIC1" << std::setw(14)
                      << "BIC2" << "\n";
            for (const auto& row : r.table) {
                json j{{"p", row.p}, {"ok", row.ok}};
                if (row.ok) {
                    j["loglik"] = row.loglik;
                    j["bic1"] = row.bic1;
                    j["bic2"] = row.bic2;
                    j["logdet_sigma"] = row.logdet_sigma;
                    std::cout << std::setw(4) << row.p << std::setw(14) << fmt(row.loglik, 3) << std::setw(14)
                              << fmt(row.bic1, 3) << std::setw(14) << fmt(row.bic2, 3) << "\n";
                } else {
                    j["error"] = row.error;
                    std::cout << std::setw(4) << row.p << "  failed: " << row.error << "\n";
                }
                rows.push_back(j);
            }
            rep["table"] = rows;
            rep["p_hat_bic1"] = r.p_hat_bic1;
            rep["p_hat_bic2"] = r.p_hat_bic2;
            std::cout << "selected: BIC1 p = " << r.p_hat_bic1 << ", BIC2 p = " << r.p_hat_bic2 << "\n";
            emit_report(rep, sel_out);
        } else if (tst->parsed()) {
            check_output_path(tst_out);
            const LoadedSeries s = tst_in.load();
            s.sample.validate(tst_p);
            const Regressors reg = build_regressors(s.sample, tst_p);
            const AsymmetryFits fits = fit_both(reg, tst_flags.bounds(), tst_flags.options(tst_seed));
            const PsiSource src = tst_psi == "restricted" ? PsiSource::Restricted : PsiSource::Unrestricted;
            const AsymmetryTestReport t = asymmetry_tests(fits, reg, src);
            json rep = report_header("test", tst, tst_seed);
            rep["data"] = data_json(s);
            rep["unrestricted_fit"] = fit_json(fits.unrestricted);
            rep["restricted_fit"] = fit_json(fits.restricted);
            rep["wald"] = {{"statistic", t.wald.statistic}, {"p_value", t.wald.p_value}, {"df", t.p}};
            rep["lm"] = {{"statistic", t.lm.statistic}, {"p_value", t.lm.p_value}, {"df", t.p}};
            rep["qlr"] = {{"statistic", t.qlr.statistic},
                          {"p_value", t.qlr.p_value},
                          {"weights", vec_json(t.qlr.eigenvalues)}};
            rep["delta"] = mat_json(t.delta);
            rep["psi"] = mat_json(t.psi);
            std::cout << std::left << std::setw(8) << "test" << std::right << std::setw(14) << "statistic"
                      << std::setw(12) << "p-value" << "\n";
            std::cout << std::left << std::setw(8) << "Wald" << std::right << std::setw(14) << fmt(t.wald.statistic)
                      << std::setw(12) << fmt(t.wald.p_value) << "\n";
            std::cout << std::left << std::setw(8) << "LM" << std::right << std::setw(14) << fmt(t.lm.statistic)
                      << std::setw(12) << fmt(t.lm.p_value) << "\n";
            std::cout << std::left << std::setw(8) << "QLR" << std::right << std::setw(14) << fmt(t.qlr.statistic)
                      << std::setw(12) << fmt(t.qlr.p_value) << "\n";
            emit_report(rep, tst_out);
        } else if (dia->parsed()) {
            check_output_path(dia_out);
            const LoadedSeries s = dia_in.load();
            s.sample.validate(dia_p);
            const Regressors reg = build_regressors(s.sample, dia_p);
            const FitResult f = fit_qmle(reg, dia_flags.bounds(), dia_flags.options(dia_seed));
            json rep = report_header("diagnose", dia, dia_seed);
            rep["data"] = data_json(s);
            rep["fit"] = fit_json(f);
            json tests = json::array();
            std::cout << std::setw(6) << "M" << std::setw(12) << "Q(M)" << std::setw(6) << "df" << std::setw(12)
                      << "p-value" << "\n";
            for (int M : dia_m) {
                const AcfReport a = portmanteau(f, reg, M);
                tests.push_back({{"M", M},
                                 {"q_stat", a.q_stat},
                                 {"df", a.df},
                                 {"p_value", a.p_value},
                                 {"rho_hat", vec_json(a.rho_hat)},
                                 {"gamma_hat", vec_json(a.gamma_hat)},
                                 {"band_rho", vec_json(a.band_rho)},
                                 {"band_gamma", vec_json(a.band_gamma)}});
                std::cout << std::setw(6) << M << std::setw(12) << fmt(a.q_stat, 3) << std::setw(6) << a.df
                          << std::setw(12) << fmt(a.p_value) << "\n";
            }
            rep["portmanteau"] = tests;
            emit_report(rep, dia_out);
        } else if (bt->parsed()) {
            check_output_path(bt_out);
            const LoadedSeries s = bt_in.load();
            RollingOptions o;
            o.window = bt_window;
            o.p = bt_p;
            o.taus = bt_taus;
            o.refit_every = bt_refit;
            o.fit = bt_flags.options(bt_seed);
            o.bounds = bt_flags.bounds();
            o.warm_start = bt_warm;
            const RollingResult r = rolling_backtest(s.sample.values, o);
            json rep = report_header("backtest", bt, bt_seed);
            rep["data"] = data_json(s);
            rep["origins"] = r.origins;
            rep["gaps"] = r.gaps;
            rep["gap_messages"] = r.gap_messages;
            json rows = json::array();
            std::cout << std::setw(8) << "tau" << std::setw(10) << "ECR%" << std::setw(10) << "CC p" << std::setw(10)
                      << "DQ p" << std::setw(8) << "N" << "\n";
            auto pv = [](const CoverageTest& c) { return c.available ? fmt(c.p_value, 3) : std::string("n/a"); };
            for (const auto& series : r.series) {
                const BacktestReport b = backtest_report(series);
                json j{{"tau", b.tau}, {"forecasts", b.forecasts}, {"ecr", b.ecr}};
                for (const auto& [name, c] : {std::pair{"cc", b.cc}, std::pair{"dq", b.dq}}) {
                    json t{{"available", c.available}};
                    if (c.available) {
                        t["statistic"] = c.statistic;
                        t["p_value"] = c.p_value;
                    } else {
                        t["note"] = c.note;
                    }
                    j[name] = t;
                }
                if (bt_forecasts) {
                    json fc = json::array();
                    for (std::size_t i = 0; i < series.hits.size(); ++i) {
                        json e{{"t", series.times[i]},
                               {"q", series.q_forecast[i]},
                               {"y", series.realized[i]},
                               {"hit", series.hits[i] != 0}};
                        if (!s.dates.empty()) e["date"] = s.dates[static_cast<std::size_t>(series.times[i])];
                        fc.push_back(e);
                    }
                    j["forecasts"] = fc;
                }
                rows.push_back(j);
                std::cout << std::setw(8) << fmt(b.tau, 3) << std::setw(10) << fmt(100 * b.ecr, 2) << std::setw(10)
                          << pv(b.cc) << std::setw(10) << pv(b.dq) << std::setw(8) << b.forecasts << "\n";
            }
            rep["backtests"] = rows;
            emit_report(rep, bt_out);
        } else if (ex->parsed()) {
            check_output_path(ex_out);
            if (!ex_ckpt.empty() && !fs::is_directory(ex_ckpt))
                fail(ErrorKind::Parse, "checkpoint directory '" + ex_ckpt + "' does not exist");
            const std::uint64_t seed = resolve_seed(ex_seed_opt, ex_seed);
            ExperimentSettings st;
            st.ns = ex_ns;
            st.laws.clear();
            for (const auto& l : ex_laws) st.laws.push_back(parse_innovation(l));
            st.reps = ex_reps;
            st.seed = seed;
            st.n_starts = ex_starts;
            st.burn_in = ex_burn;
            st.checkpoint_dir = ex_ckpt;
            Table table;
            if (ex_name == "table1") table = to_table(run_table1(st));
            else if (ex_name == "table2") table = to_table(run_table2(st));
            else if (ex_name == "table3") table = to_table(run_table3(st));
            else if (ex_name == "table4") table = to_table(run_table4(st));
            else if (ex_name == "fig2") table = to_table(run_fig2(st));
            else table = to_table(run_fig1(linspace(-2.0, 2.0, ex_grid)));
            const json header = report_header("experiment", ex, seed);
            write_file(ex_out, "# " + header.dump() + "\n" + table.to_csv());
            std::cout << table.to_csv();
        }
    } catch (const Error& e) {
        std::cerr << "aldar: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "aldar: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
