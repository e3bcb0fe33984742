#include "aldar/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <json.hpp>
#include <omp.h>

#include "aldar/asymtest.hpp"
#include "aldar/diagnostics.hpp"
#include "aldar/error.hpp"
#include "aldar/selection.hpp"
#include "aldar/stationarity.hpp"
#include "aldar/stats.hpp"

namespace aldar {

namespace {

constexpr int kBlock = 100;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    return out;
}

std::string checkpoint_path(const ExperimentSettings& s, const std::string& label) {
    if (s.checkpoint_dir.empty()) return {};
    return (std::filesystem::path(s.checkpoint_dir) / (sanitize(label) + ".json")).string();
}

std::vector<std::vector<double>> complete_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) {
        bool ok = true;
        for (double v : r) ok = ok && std::isfinite(v);
        if (ok) out.push_back(r);
    }
    return out;
}

double column_mean(const std::vector<std::vector<double>>& rows, std::size_t j) {
    if (rows.empty()) return kNaN;
    double s = 0.0;
    for (const auto& r : rows) s += r[j];
    return s / static_cast<double>(rows.size());
}

double column_sd(const std::vector<std::vector<double>>& rows, std::size_t j) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[j]);
    return col.size() > 1 ? stddev(col) : kNaN;
}

std::string key_of(const std::string& label, const ExperimentSettings& s) {
    std::ostringstream os;
    os << label << "|reps=" << s.reps << "|seed=" << s.seed << "|starts=" << s.n_starts << "|burn=" << s.burn_in;
    return os.str();
}

FitOptions fit_options(const ExperimentSettings& s, std::uint64_t seed) {
    FitOptions fo;
    fo.n_starts = s.n_starts;
    fo.seed = seed;
    return fo;
}

}  // namespace

std::string Table::to_csv() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return stream_seed(master, h);
}

std::vector<std::vector<double>> run_replications(const std::string& key, int reps, std::size_t width,
                                                  const std::function<std::vector<double>(int)>& fn,
                                                  const std::string& checkpoint) {
    require(reps >= 1, "replication count must be at least 1");
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(reps), std::vector<double>(width, kNaN));
    int done = 0;
    if (!checkpoint.empty() && std::filesystem::exists(checkpoint)) {
        std::ifstream in(checkpoint);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Parse, "unreadable checkpoint " + checkpoint + ": " + e.what());
        }
        if (j.value("key", std::string{}) != key || j.value("width", std::size_t{0}) != width)
            fail(ErrorKind::Usage, "resume-file mismatch: " + checkpoint + " was written for a different configuration");
        done = std::min(reps, j.at("done").get<int>());
        for (int r = 0; r < done; ++r)
            for (std::size_t c = 0; c < width; ++c) {
                const auto& v = j.at("rows").at(r).at(c);
                rows[r][c] = v.is_null() ? kNaN : v.get<double>();
            }
    }
    for (int start = done; start < reps; start += kBlock) {
        const int stop = std::min(reps, start + kBlock);
#pragma omp parallel for schedule(dynamic)
        for (int r = start; r < stop; ++r) {
            try {
                std::vector<double> v = fn(r);
                if (v.size() == width) rows[r] = std::move(v);
            } catch (const std::exception&) {
                // left as NaN; excluded from the summaries
            }
        }
        if (!checkpoint.empty()) {
            nlohmann::json j;
            j["key"] = key;
            j["width"] = width;
            j["done"] = stop;
            j["rows"] = nlohmann::json::array();
            for (int r = 0; r < stop; ++r) j["rows"].push_back(rows[r]);
            const std::string tmp = checkpoint + ".tmp";
            std::ofstream(tmp) << j.dump();
            std::filesystem::rename(tmp, checkpoint);
        }
    }
    return rows;
}

ModelParams table1_dgp() {
    return ModelParams(Vec::Constant(1, 0.5), 0.4, Vec::Constant(1, 0.4), Vec::Constant(1, 0.6));
}

ModelParams table2_dgp() {
    Vec a(2), bp(2), bm(2);
    a << 0.3, -0.2;
    bp << 0.2, 0.2;
    bm << 0.2, 0.1;
    return ModelParams(a, 0.4, bp, bm);
}

ModelParams table3_dgp(double k) {
    return ModelParams(Vec::Constant(1, 0.4), 0.4, Vec::Constant(1, 0.5), Vec::Constant(1, 0.5 + k));
}

ModelParams table4_dgp(double c1, double c2) {
    Vec a(2), bp(2), bm(2);
    a << 0.3, c1;
    bp << 0.3, c2;
    bm << 0.4, c2;
    return ModelParams(a, 0.4, bp, bm);
}

std::vector<EstimationCell> run_table1(const ExperimentSettings& s) {
    const ModelParams truth = table1_dgp();
    const Vec th = truth.flatten();
    const std::size_t d = static_cast<std::size_t>(th.size());
    std::vector<EstimationCell> out;
    for (const auto& kind : s.laws) {
        const InnovationSpec innov = make_innovation(kind);
        for (int n : s.ns) {
            const std::string label = "table1/" + innov.name() + "/" + std::to_string(n);
            const std::uint64_t cs = cell_seed(s.seed, label);
            auto rep = [&](int r) {
                const std::uint64_t seed = stream_seed(cs, r);
                const SeriesSample y = simulate(truth, innov, n, s.burn_in, seed);
                const FitResult fit = fit_qmle(y, 1, {}, fit_options(s, seed));
                if (!fit.converged) fail(ErrorKind::Convergence, "replication fit did not converge");
                std::vector<double> v(2 * d);
                for (std::size_t j = 0; j < d; ++j) {
                    v[j] = fit.theta_hat.flatten()(j);
                    v[d + j] = fit.asd(j);
                }
                return v;
            };
            const auto rows = complete_rows(run_replications(key_of(label, s), s.reps, 2 * d, rep, checkpoint_path(s, label)));
            EstimationCell c{innov.name(), n, static_cast<int>(rows.size()), th, Vec(d), Vec(d), Vec(d)};
            for (std::size_t j = 0; j < d; ++j) {
                c.bias(j) = column_mean(rows, j) - th(j);
                c.esd(j) = column_sd(rows, j);
                c.asd(j) = column_mean(rows, d + j);
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

Table to_table(const std::vector<EstimationCell>& cells) {
    Table t;
    t.header = {"law", "n", "reps_ok", "parameter", "truth", "bias", "bias_mcse", "esd", "asd"};
    for (const auto& c : cells) {
        const int p = (static_cast<int>(c.truth.size()) - 1) / 3;
        for (Eigen::Index j = 0; j < c.truth.size(); ++j) {
            std::string name;
            if (j < p) name = "alpha" + std::to_string(j + 1);
            else if (j == p) name = "omega";
            else if (j <= 2 * p) name = "beta_plus" + std::to_string(j - p);
            else name = "beta_minus" + std::to_string(j - 2 * p);
            t.rows.push_back({c.law, std::to_string(c.n), std::to_string(c.ok), name, num(c.truth(j)), num(c.bias(j)),
                              num(c.esd(j) / std::sqrt(std::max(1, c.ok))), num(c.esd(j)), num(c.asd(j))});
        }
    }
    return t;
}

std::vector<SelectionCell> run_table2(const ExperimentSettings& s, int p_max) {
    const ModelParams truth = table2_dgp();
    const int p0 = truth.order();
    std::vector<SelectionCell> out;
    for (const auto& kind : s.laws) {
        const InnovationSpec innov = make_innovation(kind);
        for (int n : s.ns) {
            const std::string label = "table2/" + innov.name() + "/" + std::to_string(n) + "/pmax" + std::to_string(p_max);
            const std::uint64_t cs = cell_seed(s.seed, label);
            auto rep = [&](int r) {
                const std::uint64_t seed = stream_seed(cs, r);
                const SeriesSample y = simulate(truth, innov, n, s.burn_in, seed);
                const SelectionReport sel = select_order(y, p_max, {}, fit_options(s, seed));
                return std::vector<double>{static_cast<double>(sel.p_hat_bic1), static_cast<double>(sel.p_hat_bic2)};
            };
            const auto rows = complete_rows(run_replications(key_of(label, s), s.reps, 2, rep, checkpoint_path(s, label)));
            SelectionCell c;
            c.law = innov.name();
            c.n = n;
            c.ok = static_cast<int>(rows.size());
            c.freq1.assign(p_max, 0.0);
            c.freq2.assign(p_max, 0.0);
            const double w = rows.empty() ? kNaN : 1.0 / static_cast<double>(rows.size());
            for (const auto& r : rows) {
                c.freq1[static_cast<std::size_t>(r[0]) - 1] += w;
                c.freq2[static_cast<std::size_t>(r[1]) - 1] += w;
                (r[0] < p0 ? c.under1 : r[0] == p0 ? c.correct1 : c.over1) += w;
                (r[1] < p0 ? c.under2 : r[1] == p0 ? c.correct2 : c.over2) += w;
            }
            out.push_back(c);
        }
    }
    return out;
}

Table to_table(const std::vector<SelectionCell>& cells) {
    Table t;
    t.header = {"law", "n", "reps_ok", "criterion", "under", "correct", "over", "correct_mcse"};
    const std::size_t p_max = cells.empty() ? 0 : cells.front().freq1.size();
    for (std::size_t q = 1; q <= p_max; ++q) t.header.push_back("p" + std::to_string(q));
    for (const auto& c : cells) {
        require(c.freq1.size() == p_max, "selection cells disagree on p_max");
        const double k = std::max(1, c.ok);
        auto row = [&](const char* name, double under, double correct, double over, const std::vector<double>& freq) {
            std::vector<std::string> r{c.law, std::to_string(c.n), std::to_string(c.ok), name, num(under), num(correct),
                                       num(over), num(std::sqrt(correct * (1 - correct) / k))};
            for (double f : freq) r.push_back(num(f));
            t.rows.push_back(std::move(r));
        };
        row("bic1", c.under1, c.correct1, c.over1, c.freq1);
        row("bic2", c.under2, c.correct2, c.over2, c.freq2);
    }
    return t;
}

double predicted_wald_power(const InnovationSpec& innov, int n, double h, double level, std::uint64_t seed) {
    constexpr int kLong = 200000;
    const SeriesSample y = simulate(table3_dgp(0.0), innov, kLong, 1000, seed);
    const FitResult fit = fit_qmle(y, 1, {}, {});
    const Mat r = restriction_matrix(1);
    const double v = (r * fit.xi_hat * r.transpose())(0, 0);
    const double crit = chi2_critical(level, 1.0);
    const double lambda = h * h / v;
    (void)n;  // the local alternative scales with sqrt(n), so the limit is free of n
    if (lambda <= 0.0) return level;
    boost::math::non_central_chi_squared dist(1.0, lambda);
    return boost::math::cdf(boost::math::complement(dist, crit));
}

std::vector<RejectionCell> run_asymmetry(const ExperimentSettings& s, const std::vector<double>& hs, double level,
                                         bool predict) {
    std::vector<RejectionCell> out;
    for (const auto& kind : s.laws) {
        const InnovationSpec innov = make_innovation(kind);
        for (int n : s.ns) {
            // Shared by every h so the power curve uses common random numbers.
            const std::string base = "asym/" + innov.name() + "/" + std::to_string(n);
            const std::uint64_t cs = cell_seed(s.seed, base);
            for (double h : hs) {
                const std::string label = base + "/h" + num(h);
                const ModelParams truth = table3_dgp(h / std::sqrt(static_cast<double>(n)));
                auto rep = [&](int r) {
                    const std::uint64_t seed = stream_seed(cs, r);
                    const SeriesSample y = simulate(truth, innov, n, s.burn_in, seed);
                    const Regressors reg = build_regressors(y, 1);
                    const AsymmetryFits fits = fit_both(reg, {}, fit_options(s, seed));
                    if (!fits.restricted.converged || !fits.unrestricted.converged)
                        fail(ErrorKind::Convergence, "replication fit did not converge");
                    const AsymmetryTestReport t = asymmetry_tests(fits, reg);
                    return std::vector<double>{t.wald.p_value < level ? 1.0 : 0.0, t.lm.p_value < level ? 1.0 : 0.0,
                                               t.qlr.p_value < level ? 1.0 : 0.0};
                };
                const auto rows =
                    complete_rows(run_replications(key_of(label, s), s.reps, 3, rep, checkpoint_path(s, label)));
                RejectionCell c;
                c.law = innov.name();
                c.n = n;
                c.h = h;
                c.ok = static_cast<int>(rows.size());
                c.wald = column_mean(rows, 0);
                c.lm = column_mean(rows, 1);
                c.qlr = column_mean(rows, 2);
                if (predict) c.predicted_wald = predicted_wald_power(innov, n, h, level, cell_seed(s.seed, base + "/xi"));
                out.push_back(c);
            }
        }
    }
    return out;
}

std::vector<RejectionCell> run_fig2(const ExperimentSettings& s) {
    std::vector<double> hs;
    for (int h = -10; h <= 10; ++h) hs.push_back(h);
    return run_asymmetry(s, hs, 0.05, true);
}

Table to_table(const std::vector<RejectionCell>& cells) {
    Table t;
    t.header = {"law", "n", "h", "reps_ok", "wald", "lm", "qlr", "mcse", "predicted_wald"};
    for (const auto& c : cells) {
        const double p = std::max({c.wald, c.lm, c.qlr});
        t.rows.push_back({c.law, std::to_string(c.n), num(c.h), std::to_string(c.ok), num(c.wald), num(c.lm),
                          num(c.qlr), num(std::sqrt(p * (1 - p) / std::max(1, c.ok))),
                          c.predicted_wald < 0 ? "" : num(c.predicted_wald)});
    }
    return t;
}

std::vector<PortmanteauCell> run_table4(const ExperimentSettings& s,
                                        const std::vector<std::pair<double, double>>& designs, int M, double level) {
    std::vector<PortmanteauCell> out;
    for (const auto& kind : s.laws) {
        const InnovationSpec innov = make_innovation(kind);
        for (int n : s.ns) {
            for (const auto& [c1, c2] : designs) {
                const std::string label = "table4/" + innov.name() + "/" + std::to_string(n) + "/c" + num(c1) + "_" +
                                          num(c2) + "/M" + std::to_string(M);
                const std::uint64_t cs = cell_seed(s.seed, label);
                const ModelParams truth = table4_dgp(c1, c2);
                auto rep = [&](int r) {
                    const std::uint64_t seed = stream_seed(cs, r);
                    const SeriesSample y = simulate(truth, innov, n, s.burn_in, seed);
                    const Regressors reg = build_regressors(y, 1);
                    const FitResult fit = fit_qmle(reg, {}, fit_options(s, seed));
                    const AcfReport a = portmanteau(fit, reg, M);
                    return std::vector<double>{a.p_value < level ? 1.0 : 0.0};
                };
                const auto rows =
                    complete_rows(run_replications(key_of(label, s), s.reps, 1, rep, checkpoint_path(s, label)));
                out.push_back({innov.name(), n, c1, c2, static_cast<int>(rows.size()), column_mean(rows, 0)});
            }
        }
    }
    return out;
}

Table to_table(const std::vector<PortmanteauCell>& cells) {
    Table t;
    t.header = {"law", "n", "c1", "c2", "reps_ok", "rejection", "mcse"};
    for (const auto& c : cells)
        t.rows.push_back({c.law, std::to_string(c.n), num(c.c1), num(c.c2), std::to_string(c.ok), num(c.rejection),
                          num(std::sqrt(c.rejection * (1 - c.rejection) / std::max(1, c.ok)))});
    return t;
}

int apply_thread_env() {
    if (const char* env = std::getenv("ALDAR_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) fail(ErrorKind::Usage, std::string("ALDAR_THREADS must be a positive integer, got ") + env);
        omp_set_num_threads(static_cast<int>(v));
    }
    return omp_get_max_threads();
}

std::vector<double> linspace(double lo, double hi, int count) {
    require(count >= 2, "grid needs at least two points");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
    return g;
}

std::vector<BoundaryCurve> run_fig1(const std::vector<double>& alpha_grid) {
    std::vector<BoundaryCurve> out;
    auto add = [&](const std::string& panel, const InnovationKind& kind, double kappa, double d) {
        const InnovationSpec innov = make_innovation(kind);
        BoundaryCurve c{panel, innov.name(), kappa, d, alpha_grid, stationarity_boundary(innov, kappa, d, alpha_grid)};
        out.push_back(std::move(c));
    };
    for (const InnovationKind& k : {InnovationKind{Normal{}}, InnovationKind{StandardizedT{5.0}}, InnovationKind{Laplace{}}})
        add("a", k, 0.1, 1.0);
    for (double kappa : {0.1, 0.6, 1.0, 2.0, 4.0}) add("b", Normal{}, kappa, 1.0);
    for (double d : {0.5, 0.8, 1.0}) add("c", Normal{}, 0.1, d);
    return out;
}

Table to_table(const std::vector<BoundaryCurve>& curves) {
    Table t;
    t.header = {"panel", "law", "kappa", "d", "alpha", "beta_minus", "beta_plus"};
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.alpha.size(); ++i)
            t.rows.push_back({c.panel, c.label, num(c.kappa), num(c.d), num(c.alpha[i]), num(c.beta_minus[i]),
                              num(c.d * c.beta_minus[i])});
    return t;
}

}  // namespace aldar
