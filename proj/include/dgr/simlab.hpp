#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgr/triangle.hpp"

namespace dgr {

enum class Dgp { dirichlet_gamma, nonstationary, tweedie, count_hierarchy };

std::string to_string(Dgp d);
Dgp parse_dgp(const std::string& name);

/// One simulation configuration. The text form is one `key = value` pair per
/// line with `#` comments; keys are the field names below and `pi` is a
/// comma-separated list.
struct SimConfig {
    int I = 10;
    int J = 5;
    Eigen::VectorXd pi = default_pattern(5);
    double c = 50.0;
    int M = 500;
    int B = 1000;
    std::uint64_t seed = 2026;
    std::uint64_t table = 0; ///< keys the replication streams, so studies do not share draws by accident

    Dgp dgp = Dgp::dirichlet_gamma;
    double sigma_delta = 0.0; ///< nonstationary: sd growth per accident year
    double tweedie_p = 1.5;
    double tweedie_phi = 39.96;
    double tweedie_mean_per_exposure = 2000.0;
    double kappa = 5.0;  ///< count frailty
    double mu = 100.0;   ///< expected ultimate count

    double exposure_shape = 10.0;
    double exposure_rate = 0.01;
    double ultimate_shape_per_exposure = 2.0;
    double ultimate_rate = 0.001;

    double inclusion_threshold = 0.0;
    int threads = 1;

    /// (0.45, 0.25, 0.15, 0.10, 0.05) for J = 5 and a decaying ten-lag pattern
    /// for J = 10; other J get a geometric pattern with ratio 0.7.
    static Eigen::VectorXd default_pattern(int J);

    void validate() const;
};

SimConfig parse_sim_config(std::istream& in, SimConfig base = {});
SimConfig load_sim_config(const std::filesystem::path& path, SimConfig base = {});
std::string format_sim_config(const SimConfig& cfg);

struct GeneratedTriangle {
    Triangle triangle;
    Eigen::MatrixXd full; ///< every cell, including the future
    double true_reserve;  ///< realised sum of the future cells
};

GeneratedTriangle generate_triangle(const SimConfig& cfg, std::int64_t replication);

enum class BootstrapMethod { multinomial, odp };
std::string to_string(BootstrapMethod m);

struct SimulationRow {
    std::string label;
    std::string method;
    int I = 0;
    int J = 0;
    double c = 0.0;
    bool absent = false; ///< configuration cannot be estimated at all
    int replications = 0;
    int failures = 0;
    double coverage95 = 0.0;
    double coverage95_se = 0.0;
    double coverage75 = 0.0;
    double coverage75_se = 0.0;
    double rel_bias = 0.0;
    double rel_bias_se = 0.0;
    double rel_width = 0.0;
    double rel_width_se = 0.0;
    double mean_c_hat = 0.0;
    double mean_c_hat_se = 0.0;
    std::int64_t odp_rejections = 0;
    double runtime_seconds = 0.0;
};

struct SimulationReport {
    std::string study;
    std::vector<SimulationRow> rows;
};

/// Per replication: simulate, fit the CL pattern and c, bootstrap, and score
/// the realised reserve against the 95% and 75% equal-tailed intervals.
/// Failed replications are counted in SimulationRow::failures.
SimulationRow run_coverage_study(const SimConfig& cfg, BootstrapMethod method, const std::string& label = {});

struct SigmaCRow {
    double c;
    double formula;         ///< per-cell sigma_c^2 at pi = 0.45
    double empirical;       ///< I * Var(c_hat) over the replications
    double ratio;           ///< empirical / formula
    double mean_c_hat;
    int failures;
};

std::vector<SigmaCRow> verify_sigma_c(const std::vector<double>& c_values, int I, int M, std::uint64_t seed,
                                      int threads = 1, int J = 5);

struct ConservatismRow {
    double F;
    double c_implied; ///< nu/phi - 1
    double true_sd;
    double bootstrap_sd;
    double ratio;
    double target; ///< 1/sqrt(F)
};

/// Single rows of compound Poisson-Gamma increments with total mean nu and
/// variance phi*nu, split at F into an observed and a future part. The
/// bootstrap runs at c = nu/phi - 1, the limit of the moment estimator.
std::vector<ConservatismRow> verify_conservatism(const std::vector<double>& F_values, double nu, double phi, int M,
                                                 int B, std::uint64_t seed, int threads = 1,
                                                 double severity_shape = 1.0);

SimulationReport sensitivity_grid(const std::vector<double>& c_list, const std::vector<int>& I_list,
                                  const std::vector<int>& J_list, int M, int B, std::uint64_t seed, int threads = 1);

/// Built-in study presets; calibrated Tweedie dispersions live here and in
/// the shipped configs/ files.
namespace presets {
SimConfig correct();
SimConfig nonstationary(double sigma_delta);
SimConfig tweedie(double p);
SimConfig compare_odp(Dgp dgp, double parameter = 0.0);
double tweedie_phi(double p);
} // namespace presets

void write_csv(std::ostream& out, const SimulationReport& report);
void write_csv(std::ostream& out, const std::vector<SigmaCRow>& rows);
void write_csv(std::ostream& out, const std::vector<ConservatismRow>& rows);

} // namespace dgr
