#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fcc/metric_objects.hpp"
#include "fcc/rng.hpp"

namespace fcc {

/// Simulation scenarios: five structured benchmark settings plus four
/// noise-scale models (two Wasserstein, two SPD log-Euclidean).
enum class Setting {
    s1,            // sparse euclidean vector signal
    s2,            // sphere, folded phase dependence
    s3,            // wasserstein, periodic location signal
    s4,            // spd log-cholesky, folded coordinate signal
    s5,            // wishart scale coupling, FCC-null for delta = 0 and dependent otherwise
    wass_noise_1,  // location family with exponential scale
    wass_noise_2,  // transport-map family, fixed scale
    spd_noise_1,   // 2x2 log-euclidean, tanh correlation target
    spd_noise_2    // 3x3 log-euclidean, tanh/sine correlation targets
};

const char* to_string(Setting setting);
Setting setting_from_string(const std::string& name);

/// Parameters of one generator invocation. Fields irrelevant to a setting
/// are ignored; defaults_for() pins the defaults used in the experiments.
struct SimConfig {
    Setting setting = Setting::s1;
    int n = 100;
    double delta = 0.5;      // signal strength in [0, 1]
    double sigma = 0.5;      // noise scale of the noise models
    double sigma_x = 0.2;
    double sigma_y = 0.2;
    double tau_nuis = 0.1;   // nuisance noise on non-signal coordinates (s4)
    int dim_p = 3;           // vector dimension (s1) or matrix order (s4, s5)
    int grid_size = 99;      // quantile grid length (s3, noise models)
    int freq_k = 2;          // frequency of the folded/periodic signal (s2, s3)
    double eta = 0.5;        // scale-heterogeneity rate (s3)
    double wishart_dof = 16.0;
    std::uint64_t seed = 0;

    static SimConfig defaults_for(Setting setting);
    void validate() const;
};

/// Partition parameters used in the reported experiments: H = 30 with
/// minimum cell size 4 for the euclidean vector setting, H = 15 with
/// minimum size 5 everywhere else.
struct PartitionDefaults {
    int h = 15;
    int min_cell = 5;
};
PartitionDefaults default_partition_params(Setting setting);

/// Applies `key = value` pairs (e.g. from a config file) onto a SimConfig.
/// Unknown keys raise invalid_input_error.
void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value);
SimConfig sim_config_from_entries(const std::map<std::string, std::string>& entries);

/// A paired predictor/response sample with its geometries.
struct PairedSample {
    std::vector<MetricObject> x;
    std::vector<MetricObject> y;
    SpaceDescriptor space_x;
    SpaceDescriptor space_y;
};

/// Dispatches on config.setting.
PairedSample generate(const SimConfig& config);

/// X ~ N(0, I_p); Y1 = delta*log(4 X1^2) + 0.8 eps, remaining response
/// coordinates standard normal. Per observation the stream draws the p
/// predictor coordinates, then eps, then the p-1 noise coordinates.
PairedSample gen_setting1(int n, int p, double delta, std::uint64_t seed);

/// theta ~ Unif(-pi, pi); X around the equatorial direction
/// (cos theta, sin theta, 0), Y around (cos(delta*phi), 0, sin(delta*phi))
/// with phi = pi*|sin(k theta)|; ambient Gaussian noise then normalization.
/// A zero-norm perturbation (probability ~0) is redrawn once, then raises
/// geometry_error.
PairedSample gen_setting2(int n, double delta, double sigma_x, double sigma_y, int k,
                          std::uint64_t seed);

/// Quantile responses on the grid: Q_X = U + sigma_x*Q0,
/// Q_Y = delta*sin(2 pi k U) + sigma_y*exp(eta Z)*Q0 with Q0 the standard
/// normal quantiles.
PairedSample gen_setting3(int n, const Eigen::VectorXd& grid, double delta, double sigma_x,
                          double sigma_y, double eta, int k, std::uint64_t seed);

/// Log-Cholesky coordinate construction (p >= 3): X carries U in its first
/// log-diagonal slot and 0.6 U in the L21 slot; Y carries delta*h(U) in the
/// second log-diagonal slot and 0.6*delta*h(U) in the L31 slot, with
/// h(u) = |u| - sqrt(2/pi). Gaussian perturbations sigma_x/sigma_y on all
/// coordinates, nuisance tau on the non-signal response coordinates.
PairedSample gen_setting4(int n, int p, double delta, double sigma_x, double sigma_y,
                          double tau_nuis, std::uint64_t seed);

/// Wishart pairs with coupled scales exp(0.5 U) Sigma0 and
/// exp(0.5 delta U) Sigma0, Sigma0 Toeplitz 0.3^|j-k|.
PairedSample gen_setting5(int n, int p, double nu, double delta, std::uint64_t seed);

/// The four noise-scale models. The predictor law is Unif(0.5, 3.5) for the
/// Wasserstein models (keeps the exponential rate positive) and N(0, 1) for
/// the SPD models; both are conventions recorded with the defaults.
PairedSample gen_noise_model(Setting tag, int n, double sigma, const Eigen::VectorXd& grid,
                             std::uint64_t seed);

/// Toeplitz baseline scale with entries 0.3^|j-k|.
Eigen::MatrixXd toeplitz_scale(int p, double base = 0.3);

/// Bartlett-decomposition Wishart draw W_p(nu, sigma): lower-triangular A
/// with chi-distributed diagonal (df nu - i for 0-based row i, drawn first
/// in each row) and standard normal subdiagonal, returning L A A^T L^T.
MetricObject sample_wishart(int p, double nu, const Eigen::MatrixXd& sigma, Rng& rng);
MetricObject sample_wishart(int p, double nu, const Eigen::MatrixXd& sigma, std::uint64_t seed);

/// Conditional target matrix D(x) of the SPD noise models, exposed for
/// direct verification (D(0) = I for the 2x2 model).
Eigen::MatrixXd spd_noise_target(Setting tag, double x);

/// Signal transform of the SPD coordinate setting: h(u) = |u| - sqrt(2/pi),
/// mean zero under u ~ N(0,1).
double folded_signal(double u);

/// First-coordinate slice of a paired sample as scalar euclidean data.
PairedSample scalar_slice(const PairedSample& sample);

}  // namespace fcc
