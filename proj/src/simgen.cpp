#include "fcc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "fcc/errors.hpp"

namespace fcc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

int parse_int(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    int parsed = 0;
    try {
        parsed = std::stoi(value, &pos);
    } catch (const std::exception&) {
        throw invalid_input_error("config key '" + key + "': cannot parse integer from '" + value + "'");
    }
    if (pos != value.size()) {
        throw invalid_input_error("config key '" + key + "': trailing characters in '" + value + "'");
    }
    return parsed;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw invalid_input_error("config key '" + key + "': cannot parse number from '" + value + "'");
    }
    if (pos != value.size()) {
        throw invalid_input_error("config key '" + key + "': trailing characters in '" + value + "'");
    }
    return parsed;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long parsed = 0;
    try {
        parsed = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw invalid_input_error("config key '" + key + "': cannot parse seed from '" + value + "'");
    }
    if (pos != value.size()) {
        throw invalid_input_error("config key '" + key + "': trailing characters in '" + value + "'");
    }
    return static_cast<std::uint64_t>(parsed);
}

Eigen::Vector3d noisy_unit(const Eigen::Vector3d& center, double sigma, Rng& rng, int index) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        Eigen::Vector3d noise;
        noise << rng.normal(), rng.normal(), rng.normal();
        const Eigen::Vector3d raw = center + sigma * noise;
        const double norm = raw.norm();
        if (norm > 1e-12) return raw / norm;
    }
    throw geometry_error("sphere generator produced a zero-norm vector twice at observation " +
                         std::to_string(index));
}

Eigen::MatrixXd symmetric_gaussian(int p, Rng& rng) {
    // Diagonal entries N(0,1) drawn first, then upper off-diagonal entries
    // N(0, 1/2) in row-major order; this matches a GOE-type scaling where
    // off-diagonal variances are half the diagonal ones.
    Eigen::MatrixXd z(p, p);
    for (int i = 0; i < p; ++i) z(i, i) = rng.normal();
    const double off_sd = std::sqrt(0.5);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double value = off_sd * rng.normal();
            z(i, j) = value;
            z(j, i) = value;
        }
    }
    return z;
}

}  // namespace

const char* to_string(Setting setting) {
    switch (setting) {
        case Setting::s1: return "s1";
        case Setting::s2: return "s2";
        case Setting::s3: return "s3";
        case Setting::s4: return "s4";
        case Setting::s5: return "s5";
        case Setting::wass_noise_1: return "wass_noise_1";
        case Setting::wass_noise_2: return "wass_noise_2";
        case Setting::spd_noise_1: return "spd_noise_1";
        case Setting::spd_noise_2: return "spd_noise_2";
    }
    throw std::logic_error("unreachable setting tag");
}

Setting setting_from_string(const std::string& name) {
    if (name == "s1" || name == "setting1") return Setting::s1;
    if (name == "s2" || name == "setting2") return Setting::s2;
    if (name == "s3" || name == "setting3") return Setting::s3;
    if (name == "s4" || name == "setting4") return Setting::s4;
    if (name == "s5" || name == "setting5") return Setting::s5;
    if (name == "wass_noise_1") return Setting::wass_noise_1;
    if (name == "wass_noise_2") return Setting::wass_noise_2;
    if (name == "spd_noise_1" || name == "spd_logE_1") return Setting::spd_noise_1;
    if (name == "spd_noise_2" || name == "spd_logE_2") return Setting::spd_noise_2;
    throw invalid_input_error("unknown setting '" + name +
                              "' (expected s1..s5, wass_noise_1, wass_noise_2, spd_noise_1, spd_noise_2)");
}

SimConfig SimConfig::defaults_for(Setting setting) {
    SimConfig config;
    config.setting = setting;
    switch (setting) {
        case Setting::s1:
            config.dim_p = 3;
            break;
        case Setting::s2:
            config.sigma_x = 0.2;
            config.sigma_y = 0.2;
            config.freq_k = 2;
            break;
        case Setting::s3:
            config.sigma_x = 1.0;
            config.sigma_y = 0.4;
            config.eta = 0.5;
            config.freq_k = 2;
            config.grid_size = 99;
            break;
        case Setting::s4:
            config.dim_p = 4;
            config.sigma_x = 0.2;
            config.sigma_y = 0.2;
            config.tau_nuis = 0.1;
            break;
        case Setting::s5:
            config.dim_p = 4;
            config.wishart_dof = 16.0;
            break;
        case Setting::wass_noise_1:
        case Setting::wass_noise_2:
            config.grid_size = 99;
            config.sigma = 0.5;
            break;
        case Setting::spd_noise_1:
        case Setting::spd_noise_2:
            config.sigma = 0.5;
            break;
    }
    return config;
}

void SimConfig::validate() const {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw invalid_input_error("signal strength delta must lie in [0, 1]");
    }
    if (sigma < 0.0 || sigma_x < 0.0 || sigma_y < 0.0 || tau_nuis < 0.0) {
        throw invalid_input_error("noise scales must be nonnegative");
    }
    switch (setting) {
        case Setting::s1:
            if (dim_p < 1) throw invalid_input_error("vector dimension must be at least 1");
            break;
        case Setting::s2:
            if (freq_k < 1) throw invalid_input_error("frequency k must be at least 1");
            break;
        case Setting::s3:
            if (grid_size < 1) throw invalid_input_error("quantile grid needs at least one point");
            if (freq_k < 1) throw invalid_input_error("frequency k must be at least 1");
            break;
        case Setting::s4:
            if (dim_p < 3) {
                throw invalid_input_error("the coordinate construction needs matrix order >= 3");
            }
            break;
        case Setting::s5:
            if (dim_p < 1) throw invalid_input_error("matrix order must be at least 1");
            if (!(wishart_dof > dim_p - 1)) {
                throw invalid_input_error("Wishart degrees of freedom must exceed order - 1");
            }
            break;
        case Setting::wass_noise_1:
        case Setting::wass_noise_2:
            if (grid_size < 1) throw invalid_input_error("quantile grid needs at least one point");
            break;
        case Setting::spd_noise_1:
        case Setting::spd_noise_2:
            break;
    }
}

PartitionDefaults default_partition_params(Setting setting) {
    if (setting == Setting::s1) return PartitionDefaults{30, 4};
    return PartitionDefaults{15, 5};
}

void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value) {
    if (key == "setting") {
        config.setting = setting_from_string(value);
    } else if (key == "n") {
        config.n = parse_int(key, value);
    } else if (key == "delta") {
        config.delta = parse_double(key, value);
    } else if (key == "sigma") {
        config.sigma = parse_double(key, value);
    } else if (key == "sigma_x") {
        config.sigma_x = parse_double(key, value);
    } else if (key == "sigma_y") {
        config.sigma_y = parse_double(key, value);
    } else if (key == "tau_nuis") {
        config.tau_nuis = parse_double(key, value);
    } else if (key == "p" || key == "dim_p") {
        config.dim_p = parse_int(key, value);
    } else if (key == "grid_size") {
        config.grid_size = parse_int(key, value);
    } else if (key == "k" || key == "freq_k") {
        config.freq_k = parse_int(key, value);
    } else if (key == "eta") {
        config.eta = parse_double(key, value);
    } else if (key == "nu" || key == "wishart_dof") {
        config.wishart_dof = parse_double(key, value);
    } else if (key == "seed") {
        config.seed = parse_u64(key, value);
    } else {
        throw invalid_input_error("unknown config key '" + key + "'");
    }
}

SimConfig sim_config_from_entries(const std::map<std::string, std::string>& entries) {
    SimConfig config;
    // Apply the setting first so defaults_for() can seed the remaining fields
    // before explicit overrides land on top.
    auto it = entries.find("setting");
    if (it != entries.end()) {
        config = SimConfig::defaults_for(setting_from_string(it->second));
    }
    for (const auto& [key, value] : entries) {
        if (key == "setting") continue;
        apply_config_entry(config, key, value);
    }
    return config;
}

PairedSample generate(const SimConfig& config) {
    config.validate();
    switch (config.setting) {
        case Setting::s1:
            return gen_setting1(config.n, config.dim_p, config.delta, config.seed);
        case Setting::s2:
            return gen_setting2(config.n, config.delta, config.sigma_x, config.sigma_y,
                                config.freq_k, config.seed);
        case Setting::s3:
            return gen_setting3(config.n, uniform_grid(config.grid_size), config.delta,
                                config.sigma_x, config.sigma_y, config.eta, config.freq_k,
                                config.seed);
        case Setting::s4:
            return gen_setting4(config.n, config.dim_p, config.delta, config.sigma_x,
                                config.sigma_y, config.tau_nuis, config.seed);
        case Setting::s5:
            return gen_setting5(config.n, config.dim_p, config.wishart_dof, config.delta,
                                config.seed);
        case Setting::wass_noise_1:
        case Setting::wass_noise_2:
        case Setting::spd_noise_1:
        case Setting::spd_noise_2:
            return gen_noise_model(config.setting, config.n, config.sigma,
                                   uniform_grid(config.grid_size), config.seed);
    }
    throw std::logic_error("unreachable setting tag");
}

PairedSample gen_setting1(int n, int p, double delta, std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    if (p < 1) throw invalid_input_error("vector dimension must be at least 1");
    Rng rng(seed);
    PairedSample sample;
    sample.space_x = SpaceDescriptor::euclidean(p);
    sample.space_y = SpaceDescriptor::euclidean(p);
    sample.x.reserve(n);
    sample.y.reserve(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(p);
        for (int j = 0; j < p; ++j) x[j] = rng.normal();
        Eigen::VectorXd y(p);
        // log(4 x1^2) has heavy lower tail; x1 = 0 has probability zero, but
        // the guard keeps a pathological draw finite instead of -inf.
        const double x1sq = std::max(x[0] * x[0], 1e-300);
        y[0] = delta * std::log(4.0 * x1sq) + 0.8 * rng.normal();
        for (int j = 1; j < p; ++j) y[j] = rng.normal();
        sample.x.push_back(MetricObject::euclidean(x));
        sample.y.push_back(MetricObject::euclidean(y));
    }
    return sample;
}

PairedSample gen_setting2(int n, double delta, double sigma_x, double sigma_y, int k,
                          std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    Rng rng(seed);
    PairedSample sample;
    sample.space_x = SpaceDescriptor::sphere(3, MetricVariant::geodesic);
    sample.space_y = SpaceDescriptor::sphere(3, MetricVariant::geodesic);
    sample.x.reserve(n);
    sample.y.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double theta = rng.uniform(-kPi, kPi);
        Eigen::Vector3d center_x(std::cos(theta), std::sin(theta), 0.0);
        const double phi = kPi * std::abs(std::sin(k * theta));
        Eigen::Vector3d center_y(std::cos(delta * phi), 0.0, std::sin(delta * phi));
        // Draw order per observation: theta, then the three predictor noise
        // coordinates, then the three response noise coordinates.
        const Eigen::Vector3d x = noisy_unit(center_x, sigma_x, rng, i);
        const Eigen::Vector3d y = noisy_unit(center_y, sigma_y, rng, i);
        sample.x.push_back(MetricObject::sphere(x));
        sample.y.push_back(MetricObject::sphere(y));
    }
    return sample;
}

PairedSample gen_setting3(int n, const Eigen::VectorXd& grid, double delta, double sigma_x,
                          double sigma_y, double eta, int k, std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    if (grid.size() < 1) throw invalid_input_error("quantile grid needs at least one point");
    Rng rng(seed);
    const int m = static_cast<int>(grid.size());
    Eigen::VectorXd base_quantiles(m);
    for (int j = 0; j < m; ++j) base_quantiles[j] = inv_normal_cdf(grid[j]);
    PairedSample sample;
    sample.space_x = SpaceDescriptor::wasserstein(grid);
    sample.space_y = SpaceDescriptor::wasserstein(grid);
    sample.x.reserve(n);
    sample.y.reserve(n);
    for (int i = 0; i < n; ++i) {
        // Draw order per observation: U, then Z.
        const double u = rng.uniform01();
        const double z = rng.normal();
        const Eigen::VectorXd qx = Eigen::VectorXd::Constant(m, u) + sigma_x * base_quantiles;
        const double location = delta * std::sin(2.0 * kPi * k * u);
        const double scale = sigma_y * std::exp(eta * z);
        const Eigen::VectorXd qy =
            Eigen::VectorXd::Constant(m, location) + scale * base_quantiles;
        sample.x.push_back(MetricObject::quantile(qx));
        sample.y.push_back(MetricObject::quantile(qy));
    }
    return sample;
}

double folded_signal(double u) { return std::abs(u) - std::sqrt(2.0 / kPi); }

PairedSample gen_setting4(int n, int p, double delta, double sigma_x, double sigma_y,
                          double tau_nuis, std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    if (p < 3) throw invalid_input_error("the coordinate construction needs matrix order >= 3");
    Rng rng(seed);
    const int d = log_cholesky_dim(p);
    const int off_count = p * (p - 1) / 2;
    // Coordinate layout: strict lower triangle of the Cholesky factor in
    // row-major order, then the log-diagonal. Row-major puts L21 at slot 0
    // and L31 at slot 1 for p >= 3.
    const int diag0 = off_count;      // first log-diagonal entry
    const int diag1 = off_count + 1;  // second log-diagonal entry
    const int off_l21 = 0;
    const int off_l31 = 1;
    PairedSample sample;
    sample.space_x = SpaceDescriptor::spd(p, MetricVariant::log_cholesky);
    sample.space_y = SpaceDescriptor::spd(p, MetricVariant::log_cholesky);
    sample.x.reserve(n);
    sample.y.reserve(n);
    for (int i = 0; i < n; ++i) {
        // Draw order per observation: U, d predictor perturbations, d response
        // perturbations, then the d-2 nuisance terms.
        const double u = rng.normal();
        Eigen::VectorXd vx = Eigen::VectorXd::Zero(d);
        vx[diag0] = u;
        vx[off_l21] = 0.6 * u;
        for (int j = 0; j < d; ++j) vx[j] += sigma_x * rng.normal();
        const double signal = delta * folded_signal(u);
        Eigen::VectorXd vy = Eigen::VectorXd::Zero(d);
        vy[diag1] = signal;
        vy[off_l31] = 0.6 * signal;
        for (int j = 0; j < d; ++j) vy[j] += sigma_y * rng.normal();
        for (int j = 0; j < d; ++j) {
            if (j == diag1 || j == off_l31) continue;
            vy[j] += tau_nuis * rng.normal();
        }
        sample.x.push_back(MetricObject::spd(spd_from_log_cholesky_coords(vx, p)));
        sample.y.push_back(MetricObject::spd(spd_from_log_cholesky_coords(vy, p)));
    }
    return sample;
}

Eigen::MatrixXd toeplitz_scale(int p, double base) {
    Eigen::MatrixXd sigma(p, p);
    for (int j = 0; j < p; ++j) {
        for (int l = 0; l < p; ++l) sigma(j, l) = std::pow(base, std::abs(j - l));
    }
    return sigma;
}

MetricObject sample_wishart(int p, double nu, const Eigen::MatrixXd& sigma, Rng& rng) {
    if (p < 1) throw invalid_input_error("matrix order must be at least 1");
    if (!(nu > p - 1)) {
        throw invalid_input_error("Wishart degrees of freedom must exceed order - 1");
    }
    if (sigma.rows() != p || sigma.cols() != p) {
        throw invalid_input_error("Wishart scale matrix has the wrong shape");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw geometry_error("Wishart scale matrix is not positive definite");
    }
    const Eigen::MatrixXd scale_root = llt.matrixL();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        a(i, i) = std::sqrt(rng.chi_square(nu - i));
        for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
    }
    const Eigen::MatrixXd half = scale_root * a;
    Eigen::MatrixXd w = half * half.transpose();
    w = 0.5 * (w + w.transpose()).eval();
    return MetricObject::spd(w);
}

MetricObject sample_wishart(int p, double nu, const Eigen::MatrixXd& sigma, std::uint64_t seed) {
    Rng rng(seed);
    return sample_wishart(p, nu, sigma, rng);
}

PairedSample gen_setting5(int n, int p, double nu, double delta, std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    Rng rng(seed);
    const Eigen::MatrixXd sigma0 = toeplitz_scale(p);
    PairedSample sample;
    sample.space_x = SpaceDescriptor::spd(p, MetricVariant::log_cholesky);
    sample.space_y = SpaceDescriptor::spd(p, MetricVariant::log_cholesky);
    sample.x.reserve(n);
    sample.y.reserve(n);
    for (int i = 0; i < n; ++i) {
        // Draw order per observation: U, then the predictor Wishart
        // (per row: chi-square diagonal, then subdiagonal normals), then the
        // response Wishart.
        const double u = rng.normal();
        const Eigen::MatrixXd scale_x = std::exp(0.5 * u) * sigma0;
        const Eigen::MatrixXd scale_y = std::exp(0.5 * delta * u) * sigma0;
        sample.x.push_back(sample_wishart(p, nu, scale_x, rng));
        sample.y.push_back(sample_wishart(p, nu, scale_y, rng));
    }
    return sample;
}

Eigen::MatrixXd spd_noise_target(Setting tag, double x) {
    if (tag == Setting::spd_noise_1) {
        const double rho = std::tanh(x / 2.0);
        Eigen::MatrixXd d(2, 2);
        d << 1.0, rho, rho, 1.0;
        return d;
    }
    if (tag == Setting::spd_noise_2) {
        const double rho1 = 0.4 * std::tanh(x / 2.0);
        const double rho2 = 0.4 * std::sin(x);
        Eigen::MatrixXd d(3, 3);
        d << 1.0, rho1, rho2,
             rho1, 1.0, rho1,
             rho2, rho1, 1.0;
        return d;
    }
    throw invalid_input_error("spd_noise_target expects an SPD noise-model tag");
}

PairedSample gen_noise_model(Setting tag, int n, double sigma, const Eigen::VectorXd& grid,
                             std::uint64_t seed) {
    if (n < 1) throw invalid_input_error("sample size must be positive");
    if (sigma < 0.0) throw invalid_input_error("noise scale must be nonnegative");
    Rng rng(seed);
    PairedSample sample;
    sample.space_x = SpaceDescriptor::euclidean(1);
    sample.x.reserve(n);
    sample.y.reserve(n);

    if (tag == Setting::wass_noise_1 || tag == Setting::wass_noise_2) {
        if (grid.size() < 1) throw invalid_input_error("quantile grid needs at least one point");
        const int m = static_cast<int>(grid.size());
        Eigen::VectorXd base_quantiles(m);
        for (int j = 0; j < m; ++j) base_quantiles[j] = inv_normal_cdf(grid[j]);
        sample.space_y = SpaceDescriptor::wasserstein(grid);
        for (int i = 0; i < n; ++i) {
            const double x = rng.uniform(0.5, 3.5);
            Eigen::VectorXd scalar(1);
            scalar[0] = x;
            sample.x.push_back(MetricObject::euclidean(scalar));
            if (tag == Setting::wass_noise_1) {
                // Draw order per observation: X, location noise, scale draw.
                const double mu = x + sigma * rng.normal();
                const double rate = x / (1.0 + std::exp(x));
                const double t = rng.exponential(rate);
                sample.y.push_back(MetricObject::quantile(
                    Eigen::VectorXd::Constant(m, mu) + t * base_quantiles));
            } else {
                // Draw order per observation: X, location noise, map index.
                const double mu = x + sigma * rng.normal();
                static const int kMaps[6] = {-3, -2, -1, 1, 2, 3};
                const int k = kMaps[rng.uniform_index(6)];
                Eigen::VectorXd q(m);
                for (int j = 0; j < m; ++j) {
                    const double a = mu + 0.1 * base_quantiles[j];
                    // The transport map a - sin(k a)/|a| is undefined at the
                    // origin; the ratio term is dropped there.
                    q[j] = (std::abs(a) < 1e-12) ? a : a - std::sin(k * a) / std::abs(a);
                }
                // The map is not monotone for |k| > 1, so the transported
                // values are re-sorted into a valid quantile function.
                std::sort(q.data(), q.data() + m);
                sample.y.push_back(MetricObject::quantile(q));
            }
        }
        return sample;
    }

    if (tag == Setting::spd_noise_1 || tag == Setting::spd_noise_2) {
        const int p = (tag == Setting::spd_noise_1) ? 2 : 3;
        sample.space_y = SpaceDescriptor::spd(p, MetricVariant::log_euclidean);
        for (int i = 0; i < n; ++i) {
            // Draw order per observation: X, p diagonal perturbations, then
            // the upper off-diagonal perturbations row by row.
            const double x = rng.normal();
            Eigen::VectorXd scalar(1);
            scalar[0] = x;
            sample.x.push_back(MetricObject::euclidean(scalar));
            const Eigen::MatrixXd z = symmetric_gaussian(p, rng);
            const Eigen::MatrixXd log_target = spd_matrix_log(spd_noise_target(tag, x));
            sample.y.push_back(MetricObject::spd(spd_matrix_exp(sigma * z + log_target)));
        }
        return sample;
    }

    throw invalid_input_error("gen_noise_model expects one of the four noise-model tags");
}

PairedSample scalar_slice(const PairedSample& sample) {
    PairedSample slice;
    slice.space_x = SpaceDescriptor::euclidean(1);
    slice.space_y = SpaceDescriptor::euclidean(1);
    slice.x.reserve(sample.x.size());
    slice.y.reserve(sample.y.size());
    auto first_coordinate = [](const MetricObject& object) {
        Eigen::VectorXd value(1);
        if (object.kind() == SpaceKind::spd) {
            value[0] = object.matrix()(0, 0);
        } else {
            value[0] = object.vector()[0];
        }
        return MetricObject::euclidean(value);
    };
    for (const auto& object : sample.x) slice.x.push_back(first_coordinate(object));
    for (const auto& object : sample.y) slice.y.push_back(first_coordinate(object));
    return slice;
}

}  // namespace fcc
