#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aldar/estimation.hpp"

namespace aldar {

/// Settings shared by the Monte Carlo designs.
struct ExperimentSettings {
    std::vector<int> ns{500, 1000, 2000};
    std::vector<InnovationKind> laws{Normal{}, StandardizedT{5.0}, StandardizedSkewedT{5.0, -1.2}};
    int reps = 1000;
    std::uint64_t seed = 20210901;
    int n_starts = 3;
    int burn_in = 500;
    /// Directory for resumable checkpoints; empty disables checkpointing.
    std::string checkpoint_dir;
};

/// Plot- and diff-friendly table of strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    [[nodiscard]] std::string to_csv() const;
};

/// Runs fn(r) for r = 0..reps-1 in parallel blocks of 100 and returns one row
/// per replication; a replication that throws yields a row of NaN. With a
/// non-empty `checkpoint` path the finished rows are saved after every block
/// and an existing file with the same `key` is resumed. A file written for a
/// different key is rejected with a Usage error.
std::vector<std::vector<double>> run_replications(const std::string& key, int reps, std::size_t width,
                                                  const std::function<std::vector<double>(int)>& fn,
                                                  const std::string& checkpoint = {});

/// Deterministic seed for a named cell of an experiment.
std::uint64_t cell_seed(std::uint64_t master, const std::string& label);

// Data generating processes of the simulation designs.
ModelParams table1_dgp();
ModelParams table2_dgp();
ModelParams table3_dgp(double k);
ModelParams table4_dgp(double c1, double c2);

struct EstimationCell {
    std::string law;
    int n = 0;
    int ok = 0;
    Vec truth, bias, esd, asd;
};
std::vector<EstimationCell> run_table1(const ExperimentSettings& s);
Table to_table(const std::vector<EstimationCell>& cells);

struct SelectionCell {
    std::string law;
    int n = 0;
    int ok = 0;
    double under1 = 0, correct1 = 0, over1 = 0;
    double under2 = 0, correct2 = 0, over2 = 0;
    std::vector<double> freq1, freq2;  // share of reps with p_hat = 1..p_max
};
std::vector<SelectionCell> run_table2(const ExperimentSettings& s, int p_max = 5);
Table to_table(const std::vector<SelectionCell>& cells);

struct RejectionCell {
    std::string law;
    int n = 0;
    double h = 0.0;
    int ok = 0;
    double wald = 0, lm = 0, qlr = 0;
    double predicted_wald = -1.0;  // negative when not computed
};
/// Asymmetry tests under k = h / sqrt(n). For a fixed law and n the same
/// innovation draws are used at every h.
std::vector<RejectionCell> run_asymmetry(const ExperimentSettings& s, const std::vector<double>& hs,
                                         double level = 0.05, bool predict = false);
inline std::vector<RejectionCell> run_table3(const ExperimentSettings& s) { return run_asymmetry(s, {0.0}); }
std::vector<RejectionCell> run_fig2(const ExperimentSettings& s);
Table to_table(const std::vector<RejectionCell>& cells);

/// Wald local power from the noncentral chi2_1 with Xi estimated on one long
/// simulated path under the null.
double predicted_wald_power(const InnovationSpec& innov, int n, double h, double level, std::uint64_t seed);

struct PortmanteauCell {
    std::string law;
    int n = 0;
    double c1 = 0, c2 = 0;
    int ok = 0;
    double rejection = 0;
};
std::vector<PortmanteauCell> run_table4(const ExperimentSettings& s,
                                        const std::vector<std::pair<double, double>>& designs = {
                                            {0.0, 0.0}, {0.1, 0.0}, {0.3, 0.0}, {0.0, 0.1}, {0.0, 0.3}},
                                        int M = 6, double level = 0.05);
Table to_table(const std::vector<PortmanteauCell>& cells);

struct BoundaryCurve {
    std::string panel;
    std::string label;
    double kappa = 0, d = 0;
    std::vector<double> alpha;
    std::vector<double> beta_minus;  // boundary value of beta-; beta+ = d beta-
};
std::vector<BoundaryCurve> run_fig1(const std::vector<double>& alpha_grid);
Table to_table(const std::vector<BoundaryCurve>& curves);

/// Applies ALDAR_THREADS (a positive integer) to the OpenMP runtime and
/// returns the number of threads in effect.
int apply_thread_env();

/// Evenly spaced grid of `count` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace aldar
