#include "fcc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fcc/rng.hpp"

namespace fcc {

ScalarPairSample ScalarPairSample::make(Eigen::VectorXd x, Eigen::VectorXd y) {
    if (x.size() != y.size()) {
        throw invalid_input_error("ScalarPairSample: coordinate lengths differ");
    }
    if (x.size() < 2) throw invalid_input_error("ScalarPairSample: need at least two pairs");
    if (!x.allFinite() || !y.allFinite()) {
        throw invalid_input_error("ScalarPairSample: non-finite values");
    }
    return ScalarPairSample{std::move(x), std::move(y)};
}

double pearson_r(const ScalarPairSample& s) {
    const Eigen::Index n = s.n();
    const Eigen::ArrayXd xc = s.x.array() - s.x.mean();
    const Eigen::ArrayXd yc = s.y.array() - s.y.mean();
    const double sx = std::sqrt(xc.square().sum());
    const double sy = std::sqrt(yc.square().sum());
    if (sx <= 0.0 || sy <= 0.0) {
        throw degenerate_error("pearson_r: a coordinate has zero variance");
    }
    const double r = (xc * yc).sum() / (sx * sy);
    (void)n;
    return std::clamp(r, -1.0, 1.0);
}

double chatterjee_xi(const ScalarPairSample& s, std::uint64_t jitter_seed) {
    const Eigen::Index n = s.n();

    // Order by x; tied x values are ordered by a seeded uniform jitter so the
    // result is deterministic yet unbiased in the tie group.
    Rng rng(jitter_seed);
    std::vector<double> jitter(static_cast<std::size_t>(n));
    for (auto& u : jitter) u = rng.uniform01();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (s.x[a] != s.x[b]) return s.x[a] < s.x[b];
        if (jitter[static_cast<std::size_t>(a)] != jitter[static_cast<std::size_t>(b)]) {
            return jitter[static_cast<std::size_t>(a)] < jitter[static_cast<std::size_t>(b)];
        }
        return a < b;
    });

    std::vector<double> sorted_y(s.y.data(), s.y.data() + n);
    std::sort(sorted_y.begin(), sorted_y.end());
    const auto max_rank = [&](double v) {
        // r_i = #{j : y_j <= v}
        return static_cast<double>(std::upper_bound(sorted_y.begin(), sorted_y.end(), v) -
                                   sorted_y.begin());
    };
    const auto geq_count = [&](double v) {
        // l_i = #{j : y_j >= v}
        return static_cast<double>(n) -
               static_cast<double>(std::lower_bound(sorted_y.begin(), sorted_y.end(), v) -
                                   sorted_y.begin());
    };

    double rank_steps = 0.0;
    double prev_rank = max_rank(s.y[order[0]]);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double rank = max_rank(s.y[order[static_cast<std::size_t>(i)]]);
        rank_steps += std::abs(rank - prev_rank);
        prev_rank = rank;
    }
    double denom = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double l = geq_count(s.y[i]);
        denom += l * (static_cast<double>(n) - l);
    }
    if (denom <= 0.0) return 0.0;  // constant y carries no rank signal
    return 1.0 - static_cast<double>(n) * rank_steps / (2.0 * denom);
}

namespace {

Eigen::MatrixXd pairwise_distances(const SpaceDescriptor& space,
                                   const std::vector<MetricObject>& sample) {
    const SampleCoords coords = distance_coords(space, sample);
    const Eigen::Index n = coords.rows.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = coords(i, j);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

void double_center(Eigen::MatrixXd& m) {
    const Eigen::VectorXd row_means = m.rowwise().mean();
    const double grand = row_means.mean();
    m.colwise() -= row_means;
    m.rowwise() -= row_means.transpose();
    m.array() += grand;
}

}  // namespace

double energy_dcov_stat(const std::vector<MetricObject>& x, const std::vector<MetricObject>& y,
                        const SpaceDescriptor& space_x, const SpaceDescriptor& space_y) {
    if (x.size() != y.size()) throw invalid_input_error("energy_dcov_stat: lengths differ");
    if (x.size() < 4) throw invalid_input_error("energy_dcov_stat: need at least 4 pairs");
    Eigen::MatrixXd a = pairwise_distances(space_x, x);
    Eigen::MatrixXd b = pairwise_distances(space_y, y);
    double_center(a);
    double_center(b);
    const double v2 = a.cwiseProduct(b).mean();
    return std::max(v2, 0.0);
}

TestResult energy_dcov_permutation_test(const std::vector<MetricObject>& x,
                                        const std::vector<MetricObject>& y,
                                        const SpaceDescriptor& space_x,
                                        const SpaceDescriptor& space_y, int num_replicates,
                                        std::uint64_t seed) {
    if (num_replicates < 1) {
        throw invalid_input_error("energy_dcov_permutation_test: B must be at least 1");
    }
    if (x.size() != y.size()) {
        throw invalid_input_error("energy_dcov_permutation_test: lengths differ");
    }
    if (x.size() < 4) {
        throw invalid_input_error("energy_dcov_permutation_test: need at least 4 pairs");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd a = pairwise_distances(space_x, x);
    Eigen::MatrixXd b = pairwise_distances(space_y, y);
    double_center(a);
    double_center(b);

    TestResult out;
    out.method = "permutation";
    out.num_replicates = num_replicates;
    out.seed = seed;
    out.statistic_obs = std::max(a.cwiseProduct(b).mean(), 0.0);
    out.replicates.resize(static_cast<std::size_t>(num_replicates));

    std::vector<Eigen::Index> identity(static_cast<std::size_t>(n));
    std::iota(identity.begin(), identity.end(), 0);
    for (int rep = 0; rep < num_replicates; ++rep) {
        Rng rng(mix64(seed, static_cast<std::uint64_t>(rep)));
        std::vector<Eigen::Index> perm = identity;
        for (Eigen::Index i = n - 1; i > 0; --i) {
            const auto j = static_cast<Eigen::Index>(
                rng.uniform_index(static_cast<std::uint64_t>(i + 1)));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        // Double-centering commutes with relabeling, so permuting the rows
        // and columns of the centered matrix equals re-centering a permuted
        // distance matrix.
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index pi = perm[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j) {
                total += a(i, j) * b(pi, perm[static_cast<std::size_t>(j)]);
            }
        }
        out.replicates[static_cast<std::size_t>(rep)] =
            std::max(total / static_cast<double>(n * n), 0.0);
    }
    out.p_value = resampling_p_value(out.statistic_obs, out.replicates);
    return out;
}

}  // namespace fcc
