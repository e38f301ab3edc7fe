#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fcc/embedding.hpp"
#include "fcc/estimator.hpp"
#include "fcc/partition.hpp"
#include "fcc/rng.hpp"

namespace fcc {

/// Multiplier laws for the wild bootstrap; all have mean 0 and variance 1.
enum class MultiplierKind { rademacher, gaussian, mammen_two_point };

const char* to_string(MultiplierKind kind);
MultiplierKind multiplier_from_string(const std::string& name);

/// One multiplier draw. Rademacher consumes one uniform, Gaussian one,
/// Mammen's two-point law one.
double draw_multiplier(MultiplierKind kind, Rng& rng);

enum class NormalizationKind { identity, plugin_hessian };

const char* to_string(NormalizationKind kind);
NormalizationKind normalization_from_string(const std::string& name);

/// Cell and global normalization matrices for the between-cell quadratic
/// form. The identity kind stores no matrices; plugin_hessian carries one
/// SPD matrix per cell plus a global one, all in embedding coordinates.
struct NormalizationSpec {
    NormalizationKind kind = NormalizationKind::identity;
    std::vector<Eigen::MatrixXd> h_m;
    Eigen::MatrixXd h;

    static NormalizationSpec identity() { return NormalizationSpec{}; }
};

/// Plug-in Hessian normalization, H_m = 2 * inverse(cell Hessian) and
/// H = 2 * inverse(pooled Hessian), with Hessians of the cell and pooled
/// Frechet objectives taken at the global Frechet mean. In flat embedding
/// coordinates (euclidean, wasserstein, spd) those Hessians are exactly 2I,
/// so the matrices are identities; on the sphere they are estimated by
/// averaged central second differences (step `step`) of the objective in an
/// orthonormal tangent chart at the mean, then lifted back to ambient
/// coordinates (the normal direction gets a unit eigenvalue, harmless since
/// tangent means have no normal component).
NormalizationSpec make_plugin_normalization(const std::vector<MetricObject>& y,
                                            const SpaceDescriptor& space_y,
                                            const Partition& partition,
                                            double step = 1e-4);

/// Inverse square roots of the normalization matrices, factored once so the
/// bootstrap loop can reuse them. Throws invalid_input_error if any matrix
/// is not symmetric positive definite or has the wrong shape.
class PreparedNormalization {
public:
    static PreparedNormalization prepare(const NormalizationSpec& spec, int dim, int num_cells);

    bool is_identity() const { return cell_roots_.empty(); }
    const Eigen::MatrixXd& cell_root(int m) const { return cell_roots_[static_cast<std::size_t>(m)]; }
    const Eigen::MatrixXd& global_root() const { return global_root_; }

private:
    std::vector<Eigen::MatrixXd> cell_roots_;  // H_m^{-1/2}
    Eigen::MatrixXd global_root_;              // H^{-1/2}
};

/// The between-cell quadratic form
///   B_n = sum_m n_m ||H_m^{-1/2} Zbar_m||^2 - n ||H^{-1/2} Zbar||^2
/// over the given coordinate rows. For identity normalization on centered
/// rows this is the classical between-group sum of squares.
double between_cell_statistic(const Eigen::MatrixXd& rows, const Partition& partition,
                              const PreparedNormalization& norm);
double between_cell_statistic(const EmbeddedSample& sample, const Partition& partition,
                              const NormalizationSpec& norm);

/// Outcome of a resampling test. p_value = (1 + #{T*_b >= T_obs}) / (B + 1).
struct TestResult {
    double statistic_obs = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
    int num_replicates = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::string normalization = "none";
    std::string multiplier = "none";
    // Filled by wild_bootstrap_test for reporting alongside the statistic.
    double rho_hat = std::numeric_limits<double>::quiet_NaN();
    double v_f_hat = std::numeric_limits<double>::quiet_NaN();
};

/// Fixed-partition wild bootstrap test of independence. Embeds and centers
/// the response, computes T_obs = B_n / v_f_hat, then B replicates scale the
/// centered rows by i.i.d. multipliers (replicate b draws from the stream
/// seeded with mix64(seed, b), multipliers in observation order) and
/// recompute B_n with the same partition, normalization and v_f_hat. The
/// denominator is always the metric-space sample Frechet variance, not the
/// embedded variance. `threads` only changes the schedule, never the result.
TestResult wild_bootstrap_test(const std::vector<MetricObject>& x,
                               const std::vector<MetricObject>& y,
                               const SpaceDescriptor& space_y, const Partition& partition,
                               int num_replicates, MultiplierKind law,
                               const NormalizationSpec& norm, std::uint64_t seed,
                               int threads = 1);

/// Shared p-value assembly for resampling tests.
double resampling_p_value(double statistic_obs, const std::vector<double>& replicates);

/// Generic permutation test: permutes the y sample B times (Fisher-Yates,
/// replicate b driven by mix64(seed, b)) and recomputes the statistic.
/// YSample must be an indexable, size()-bearing container with swappable
/// elements (std::vector, Eigen::VectorXd).
template <class XSample, class YSample, class Statistic>
TestResult permutation_test(Statistic&& statistic, const XSample& x, const YSample& y,
                            int num_replicates, std::uint64_t seed) {
    if (num_replicates < 1) {
        throw invalid_input_error("permutation_test: B must be at least 1");
    }
    const auto n = static_cast<std::uint64_t>(y.size());
    if (n < 2) throw invalid_input_error("permutation_test: need at least two observations");

    TestResult out;
    out.method = "permutation";
    out.num_replicates = num_replicates;
    out.seed = seed;
    out.statistic_obs = statistic(x, y);
    out.replicates.resize(static_cast<std::size_t>(num_replicates));
    for (int b = 0; b < num_replicates; ++b) {
        Rng rng(mix64(seed, static_cast<std::uint64_t>(b)));
        YSample permuted = y;
        for (std::uint64_t i = n - 1; i > 0; --i) {
            const std::uint64_t j = rng.uniform_index(i + 1);
            std::swap(permuted[static_cast<Eigen::Index>(i)],
                      permuted[static_cast<Eigen::Index>(j)]);
        }
        out.replicates[static_cast<std::size_t>(b)] = statistic(x, permuted);
    }
    out.p_value = resampling_p_value(out.statistic_obs, out.replicates);
    return out;
}

}  // namespace fcc
