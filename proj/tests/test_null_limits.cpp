#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fcc/embedding.hpp>
#include <fcc/estimator.hpp>
#include <fcc/null_limits.hpp>
#include <fcc/partition.hpp>
#include <fcc/rng.hpp>

#include "helpers.hpp"

#include <cmath>
#include <vector>

using namespace fcc;
using namespace fcc::testing;

namespace {

std::vector<MetricObject> scalar_objects(const std::vector<double>& values) {
    std::vector<MetricObject> out;
    out.reserve(values.size());
    for (const double v : values) {
        out.push_back(MetricObject::euclidean(Eigen::VectorXd::Constant(1, v)));
    }
    return out;
}

// Balanced labels 0..m-1 repeating.
std::vector<int> balanced_labels(int n, int m) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % m;
    return labels;
}

}  // namespace

TEST_CASE("chi-square upper tail closed forms") {
    CHECK(chi2_upper_tail(0.0, 3) == 1.0);
    // k = 2 is exponential: P(X >= x) = exp(-x/2).
    CHECK(chi2_upper_tail(2.0 * std::log(2.0), 2) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(chi2_upper_tail(4.0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    // Tabulated 5% critical value for k = 4.
    CHECK(chi2_upper_tail(9.487729036781154, 4) == doctest::Approx(0.05).epsilon(1e-4));
    // k = 1 reduces to the normal tail.
    for (const double x : {0.1, 0.5, 1.0, 2.5, 7.0}) {
        const double via_normal = 2.0 * (1.0 - normal_cdf(std::sqrt(x)));
        CHECK(chi2_upper_tail(x, 1) == doctest::Approx(via_normal).epsilon(1e-9));
    }
    // Monotone decreasing in x, increasing in k.
    double prev = 1.0;
    for (double x = 0.5; x < 20.0; x += 0.5) {
        const double tail = chi2_upper_tail(x, 5);
        CHECK(tail < prev);
        prev = tail;
    }
    CHECK(chi2_upper_tail(5.0, 7) > chi2_upper_tail(5.0, 3));
    CHECK_THROWS_AS(chi2_upper_tail(1.0, 0), invalid_input_error);
    CHECK_THROWS_AS(chi2_upper_tail(-1.0, 2), invalid_input_error);
}

TEST_CASE("weighted chi-square tail agrees with the plain chi-square") {
    // A single unit weight is chi-square with one degree of freedom.
    Eigen::VectorXd one(1);
    one << 1.0;
    for (const double x : {0.5, 1.0, 3.0}) {
        const WeightedChi2Tail tail = weighted_chi2_tail(x, one, 400000, 77);
        const double exact = chi2_upper_tail(x, 1);
        CHECK(std::abs(tail.value - exact) < 3.0 * tail.std_err + 1e-12);
        CHECK(tail.std_err > 0.0);
        CHECK(tail.std_err < 0.002);
    }
    // Equal weights g rescale the threshold: P(g * sum Z^2 >= x) with 4 terms.
    Eigen::VectorXd equal = Eigen::VectorXd::Constant(4, 2.5);
    for (const double x : {5.0, 10.0, 20.0}) {
        const WeightedChi2Tail tail = weighted_chi2_tail(x, equal, 400000, 78);
        const double exact = chi2_upper_tail(x / 2.5, 4);
        CHECK(std::abs(tail.value - exact) < 3.0 * tail.std_err + 1e-12);
    }
}

TEST_CASE("weighted chi-square tail matches a brute-force oracle") {
    // Mixed weights {2, 1} at x = 3, independent stream and larger draw count.
    Eigen::VectorXd gammas(2);
    gammas << 2.0, 1.0;
    Rng rng(0xBEEFCAFEull);
    const int draws = 2000000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        if (2.0 * z1 * z1 + z2 * z2 >= 3.0) ++hits;
    }
    const double brute = static_cast<double>(hits) / draws;
    const double brute_se = std::sqrt(brute * (1.0 - brute) / draws);
    const WeightedChi2Tail tail = weighted_chi2_tail(3.0, gammas);
    CHECK(std::abs(tail.value - brute) < 3.0 * std::sqrt(tail.std_err * tail.std_err +
                                                          brute_se * brute_se));
}

TEST_CASE("weighted chi-square tail is monotone and deterministic") {
    Eigen::VectorXd gammas(3);
    gammas << 1.5, 1.0, 0.25;
    double prev = 1.1;
    for (double x = 0.0; x <= 12.0; x += 1.5) {
        const WeightedChi2Tail tail = weighted_chi2_tail(x, gammas, 200000);
        CHECK(tail.value <= prev);
        prev = tail.value;
    }
    const WeightedChi2Tail a = weighted_chi2_tail(4.0, gammas, 200000, 5);
    const WeightedChi2Tail b = weighted_chi2_tail(4.0, gammas, 200000, 5);
    CHECK(a.value == b.value);
    // All weights zero: the statistic is identically zero.
    const WeightedChi2Tail zero = weighted_chi2_tail(1.0, Eigen::VectorXd::Zero(3), 1000, 5);
    CHECK(zero.value == 0.0);
    const WeightedChi2Tail at_zero = weighted_chi2_tail(0.0, Eigen::VectorXd::Zero(3), 1000, 5);
    CHECK(at_zero.value == 1.0);
}

TEST_CASE("a single cell has an all-zero spectrum") {
    Rng rng(0xAB12ull);
    const SpaceDescriptor space = SpaceDescriptor::euclidean(2);
    const auto y = random_sample(space, 15, rng);
    const Partition part = partition_from_assignments(std::vector<int>(15, 0));
    const EmbeddedSample emb = embed_responses(space, y);
    const FccEstimate est = fcc_estimate(y, space, part);
    const SpectrumResult spec = fixed_m_spectrum(emb, part, est.v_f_hat);
    CHECK(spec.eigenvalues.size() == 2);
    CHECK(spec.eigenvalues.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-cell scalar spectrum matches a hand eigen-oracle") {
    Rng rng(0xCD34ull);
    const int n = 40;
    std::vector<double> values(n);
    for (auto& v : values) v = rng.normal() * (1.0 + 0.5 * rng.uniform01());
    const auto y = scalar_objects(values);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < 25 ? 0 : 1;
    const Partition part = partition_from_assignments(labels);
    const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
    const EmbeddedSample emb = embed_responses(space, y);
    const FccEstimate est = fcc_estimate(y, space, part);
    const SpectrumResult spec = fixed_m_spectrum(emb, part, est.v_f_hat, SpectrumForm::manifold);

    // Hand-built 2x2 matrix: B_rc = 2 (delta_rc - sqrt(p_r p_c)) s_r s_c with
    // s_m the within-cell standard deviation.
    const double p0 = 25.0 / 40.0, p1 = 15.0 / 40.0;
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < 25; ++i) m0 += values[static_cast<std::size_t>(i)];
    for (int i = 25; i < n; ++i) m1 += values[static_cast<std::size_t>(i)];
    m0 /= 25.0;
    m1 /= 15.0;
    double v0 = 0.0, v1 = 0.0;
    for (int i = 0; i < 25; ++i) {
        v0 += (values[static_cast<std::size_t>(i)] - m0) * (values[static_cast<std::size_t>(i)] - m0);
    }
    for (int i = 25; i < n; ++i) {
        v1 += (values[static_cast<std::size_t>(i)] - m1) * (values[static_cast<std::size_t>(i)] - m1);
    }
    v0 /= 25.0;
    v1 /= 15.0;
    const double s0 = std::sqrt(v0), s1 = std::sqrt(v1);
    Eigen::Matrix2d b;
    b(0, 0) = 2.0 * (1.0 - p0) * s0 * s0;
    b(1, 1) = 2.0 * (1.0 - p1) * s1 * s1;
    b(0, 1) = b(1, 0) = 2.0 * (-std::sqrt(p0 * p1)) * s0 * s1;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(b);
    REQUIRE(spec.eigenvalues.size() == 2);
    CHECK(spec.eigenvalues[0] == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-10));
    CHECK(spec.eigenvalues[1] == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-10));
    CHECK(spec.scale == doctest::Approx(1.0 / (2.0 * est.v_f_hat)).epsilon(1e-14));
}

TEST_CASE("spectrum trace identity and form equivalence") {
    Rng rng(0xEF56ull);
    const SpaceDescriptor space = SpaceDescriptor::wasserstein(uniform_grid(7));
    const int n = 60;
    const auto y = random_sample(space, n, rng);
    const Partition part = partition_from_assignments(balanced_labels(n, 4));
    const EmbeddedSample emb = embed_responses(space, y);
    const FccEstimate est = fcc_estimate(y, space, part);

    const SpectrumResult manifold = fixed_m_spectrum(emb, part, est.v_f_hat,
                                                     SpectrumForm::manifold);
    const SpectrumResult wasserstein = fixed_m_spectrum(emb, part, est.v_f_hat,
                                                        SpectrumForm::wasserstein);
    // The wasserstein form halves every eigenvalue and doubles the scale, so
    // the implied law is identical.
    REQUIRE(manifold.eigenvalues.size() == wasserstein.eigenvalues.size());
    for (Eigen::Index l = 0; l < manifold.eigenvalues.size(); ++l) {
        CHECK(manifold.eigenvalues[l] ==
              doctest::Approx(2.0 * wasserstein.eigenvalues[l]).epsilon(1e-9));
    }
    CHECK(manifold.scale * 2.0 == doctest::Approx(wasserstein.scale).epsilon(1e-14));
    CHECK(wasserstein.scale == doctest::Approx(1.0 / est.v_f_hat).epsilon(1e-14));

    // Trace identity: sum of eigenvalues = sum_m factor (1 - p_m) tr(S_m).
    double expected_trace = 0.0;
    for (int m = 0; m < part.num_cells(); ++m) {
        const auto members = part.cell_members(m);
        Eigen::MatrixXd block(members.size(), emb.dim());
        for (std::size_t r = 0; r < members.size(); ++r) {
            block.row(static_cast<Eigen::Index>(r)) = emb.rows.row(members[r]);
        }
        const Eigen::RowVectorXd mean = block.colwise().mean();
        block.rowwise() -= mean;
        const double tr = (block.transpose() * block / static_cast<double>(members.size())).trace();
        expected_trace +=
            2.0 * (1.0 - part.cell_fractions[static_cast<std::size_t>(m)]) * tr;
    }
    CHECK(manifold.eigenvalues.sum() == doctest::Approx(expected_trace).epsilon(1e-8));
}

TEST_CASE("equal-variance balanced cells give M-1 equal eigenvalues") {
    // With identical within-cell covariance sigma^2 and equal cell fractions,
    // the limit matrix has eigenvalue 2 sigma^2 with multiplicity M-1 and 0
    // with multiplicity 1 (per coordinate).
    const int n = 40, m = 4;
    std::vector<double> values(n);
    // Same four values in every cell: within-cell variance identical.
    const double pattern[10] = {-1.5, -0.5, 0.5, 1.5, -1.0, 1.0, -2.0, 2.0, 0.25, -0.25};
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = pattern[i / m];
    const auto y = scalar_objects(values);
    const Partition part = partition_from_assignments(balanced_labels(n, m));
    const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
    const EmbeddedSample emb = embed_responses(space, y);
    const FccEstimate est = fcc_estimate(y, space, part);
    const SpectrumResult spec = fixed_m_spectrum(emb, part, est.v_f_hat);
    REQUIRE(spec.eigenvalues.size() == m);

    // Within-cell variance (same in each cell by construction).
    double cell_var = 0.0;
    {
        const auto members = part.cell_members(0);
        double mean = 0.0;
        for (const int i : members) mean += values[static_cast<std::size_t>(i)];
        mean /= static_cast<double>(members.size());
        for (const int i : members) {
            const double dev = values[static_cast<std::size_t>(i)] - mean;
            cell_var += dev * dev;
        }
        cell_var /= static_cast<double>(members.size());
    }
    for (int l = 0; l < m - 1; ++l) {
        CHECK(spec.eigenvalues[l] == doctest::Approx(2.0 * cell_var).epsilon(1e-10));
    }
    CHECK(std::abs(spec.eigenvalues[m - 1]) < 1e-10);

    // In the scalar i.i.d. equal-cell case the implied law is chi-square with
    // M - 1 degrees of freedom when the response is standardized: check the
    // tail matches at a few points through spectrum_tail.
    for (const double t : {1.0, 3.0, 6.0}) {
        const double x = t;  // statistic on the n * rho_hat scale
        const WeightedChi2Tail tail = spectrum_tail(spec, x, 400000, 3141);
        const double chi2 = chi2_upper_tail(x * 2.0 * est.v_f_hat / (2.0 * cell_var), m - 1);
        CHECK(std::abs(tail.value - chi2) < 3.0 * tail.std_err + 1e-12);
    }
}

TEST_CASE("spectrum input validation") {
    Rng rng(0x1212ull);
    const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
    const auto y = random_sample(space, 10, rng);
    const EmbeddedSample emb = embed_responses(space, y);
    const Partition part = partition_from_assignments(balanced_labels(10, 2));
    CHECK_THROWS_AS(fixed_m_spectrum(emb, part, 0.0), invalid_input_error);
    // A singleton cell cannot feed a covariance plug-in.
    std::vector<int> labels = balanced_labels(10, 2);
    labels[0] = 2;
    CHECK_THROWS_AS(fixed_m_spectrum(emb, partition_from_assignments(labels), 1.0),
                    invalid_input_error);
    // Sphere lifts are not flat.
    std::vector<MetricObject> sphere_sample;
    Rng srng(0x3434ull);
    for (int i = 0; i < 10; ++i) {
        Eigen::Vector3d v(2.0 + 0.2 * srng.normal(), 0.2 * srng.normal(), 0.2 * srng.normal());
        sphere_sample.push_back(MetricObject::sphere(v.normalized()));
    }
    const SpaceDescriptor sphere_space = SpaceDescriptor::sphere(3, MetricVariant::geodesic);
    const EmbeddedSample sphere_emb = embed_responses(sphere_space, sphere_sample);
    CHECK_THROWS_AS(fixed_m_spectrum(sphere_emb, part, 1.0), invalid_input_error);
}

TEST_CASE("studentized diagnostic internal identities") {
    Rng rng(0x5656ull);
    const SpaceDescriptor space = SpaceDescriptor::wasserstein(uniform_grid(11));
    const int n = 80;
    const auto y = random_sample(space, n, rng);
    const Partition part = partition_from_assignments(balanced_labels(n, 5));
    const EmbeddedSample emb = embed_responses(space, y);
    const FccEstimate est = fcc_estimate(y, space, part);
    const StudentizedDiagnostic diag =
        studentized_diagnostic(emb, part, est.rho_hat, est.v_f_hat);

    // The two conventions agree exactly (checked to 1e-10 internally too).
    CHECK(diag.z_manifold == doctest::Approx(diag.z_wasserstein).epsilon(1e-10));
    CHECK(diag.z_score == diag.z_manifold);

    REQUIRE(diag.sigma_traces.size() == 5);
    REQUIRE(diag.c_traces.size() == 5);
    double trace_sum = 0.0, sq_sum = 0.0;
    for (std::size_t m = 0; m < 5; ++m) {
        CHECK(diag.c_traces[m] == doctest::Approx(4.0 * diag.sigma_traces[m]).epsilon(1e-12));
        trace_sum += diag.sigma_traces[m];
        sq_sum += diag.sigma_sq_traces[m];
    }
    // mu_hat = sum tr(C_m)/2 = 2 sum tr(S_m); sigma_hat^2 = 8 sum tr(S_m^2).
    CHECK(diag.mu_hat == doctest::Approx(2.0 * trace_sum).epsilon(1e-12));
    CHECK(diag.sigma_hat == doctest::Approx(std::sqrt(8.0 * sq_sum)).epsilon(1e-12));

    // Reconstruct z from the stored pieces.
    const double z = (n * est.rho_hat - diag.mu_hat / (2.0 * est.v_f_hat)) /
                     (diag.sigma_hat / (2.0 * est.v_f_hat));
    CHECK(diag.z_score == doctest::Approx(z).epsilon(1e-10));
}

TEST_CASE("studentized diagnostic rejects bad inputs") {
    Rng rng(0x7878ull);
    const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
    const auto y = random_sample(space, 12, rng);
    const EmbeddedSample emb = embed_responses(space, y);
    // Singleton cell.
    std::vector<int> labels = balanced_labels(12, 3);
    labels[0] = 3;
    CHECK_THROWS_AS(
        studentized_diagnostic(emb, partition_from_assignments(labels), 0.1, 1.0),
        invalid_input_error);
    // Sphere lift is not flat.
    std::vector<MetricObject> sphere_sample;
    for (int i = 0; i < 12; ++i) {
        Eigen::Vector3d v(2.0 + 0.2 * rng.normal(), 0.2 * rng.normal(), 0.2 * rng.normal());
        sphere_sample.push_back(MetricObject::sphere(v.normalized()));
    }
    const SpaceDescriptor sphere_space = SpaceDescriptor::sphere(3, MetricVariant::geodesic);
    const EmbeddedSample sphere_emb = embed_responses(sphere_space, sphere_sample);
    CHECK_THROWS_AS(
        studentized_diagnostic(sphere_emb, partition_from_assignments(balanced_labels(12, 3)),
                               0.1, 1.0),
        invalid_input_error);
    // Rows constant within every cell: sigma_hat = 0 is degenerate.
    std::vector<MetricObject> constant;
    for (int i = 0; i < 12; ++i) {
        constant.push_back(
            MetricObject::euclidean(Eigen::VectorXd::Constant(1, static_cast<double>(i % 3))));
    }
    // Cells aligned with the constants.
    std::vector<int> aligned(12);
    for (int i = 0; i < 12; ++i) aligned[static_cast<std::size_t>(i)] = i % 3;
    const EmbeddedSample const_emb = embed_responses(space, constant);
    CHECK_THROWS_AS(studentized_diagnostic(const_emb, partition_from_assignments(aligned),
                                           1.0, 0.5),
                    degenerate_error);
}

TEST_CASE("studentized z is near standard normal for a scalar null") {
    // Moderate check (the acceptance suite runs the large one): M = 10 cells,
    // n = 500, 120 simulations; the mean of z should sit within 0.35 of zero
    // and the spread near one.
    Rng rng(0x9A9Aull);
    const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
    std::vector<double> zs;
    for (int sim = 0; sim < 120; ++sim) {
        const int n = 500;
        std::vector<double> values(n);
        for (auto& v : values) v = rng.normal();
        const auto y = scalar_objects(values);
        const Partition part = partition_from_assignments(balanced_labels(n, 10));
        const EmbeddedSample emb = embed_responses(space, y);
        const FccEstimate est = fcc_estimate(y, space, part);
        const StudentizedDiagnostic diag =
            studentized_diagnostic(emb, part, est.rho_hat, est.v_f_hat);
        zs.push_back(diag.z_score);
    }
    double mean = 0.0;
    for (const double z : zs) mean += z;
    mean /= static_cast<double>(zs.size());
    double var = 0.0;
    for (const double z : zs) var += (z - mean) * (z - mean);
    var /= static_cast<double>(zs.size() - 1);
    CHECK(std::abs(mean) < 0.35);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 0.35);
}
