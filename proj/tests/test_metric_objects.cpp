#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fcc/errors.hpp"
#include "fcc/metric_objects.hpp"
#include "fcc/rng.hpp"
#include "helpers.hpp"

using namespace fcc;
using fcc::testing::random_object;
using fcc::testing::random_quantile;
using fcc::testing::random_sample;
using fcc::testing::random_sphere_point;
using fcc::testing::random_spd_matrix;
using fcc::testing::random_vector;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

std::vector<SpaceDescriptor> all_geometries() {
    return {SpaceDescriptor::euclidean(3),
            SpaceDescriptor::sphere(3, MetricVariant::chordal),
            SpaceDescriptor::sphere(3, MetricVariant::geodesic),
            SpaceDescriptor::spd(3, MetricVariant::log_cholesky),
            SpaceDescriptor::spd(3, MetricVariant::log_euclidean),
            SpaceDescriptor::wasserstein(uniform_grid(25))};
}

}  // namespace

TEST_CASE("distance closed forms") {
    CHECK(distance(SpaceDescriptor::euclidean(2), MetricObject::euclidean(vec2(0, 0)),
                   MetricObject::euclidean(vec2(3, 4))) == doctest::Approx(5.0).epsilon(1e-14));

    const MetricObject e1 = MetricObject::sphere(vec3(1, 0, 0));
    const MetricObject minus_e1 = MetricObject::sphere(vec3(-1, 0, 0));
    const MetricObject e2 = MetricObject::sphere(vec3(0, 1, 0));
    CHECK(distance(SpaceDescriptor::sphere(3, MetricVariant::chordal), e1, minus_e1) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(distance(SpaceDescriptor::sphere(3, MetricVariant::geodesic), e1, e2) ==
          doctest::Approx(M_PI / 2).epsilon(1e-13));
    CHECK(distance(SpaceDescriptor::sphere(3, MetricVariant::geodesic), e1, minus_e1) ==
          doctest::Approx(M_PI).epsilon(1e-13));

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(2, 2);
    CHECK(distance(SpaceDescriptor::spd(2, MetricVariant::log_euclidean),
                   MetricObject::spd(identity), MetricObject::spd(identity)) == 0.0);
    Eigen::MatrixXd diag_e = identity;
    diag_e(0, 0) = std::exp(1.0);
    CHECK(distance(SpaceDescriptor::spd(2, MetricVariant::log_euclidean),
                   MetricObject::spd(identity),
                   MetricObject::spd(diag_e)) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd diag_e2 = identity;
    diag_e2(0, 0) = std::exp(2.0);
    CHECK(distance(SpaceDescriptor::spd(2, MetricVariant::log_cholesky),
                   MetricObject::spd(identity),
                   MetricObject::spd(diag_e2)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wasserstein distance between equal-variance Gaussians is the mean gap") {
    const SpaceDescriptor space = SpaceDescriptor::wasserstein(uniform_grid(999));
    const int m = static_cast<int>(space.grid.size());
    Eigen::VectorXd q0(m), q1(m);
    for (int j = 0; j < m; ++j) {
        q0[j] = inv_normal_cdf(space.grid[j]);
        q1[j] = 1.0 + q0[j];
    }
    CHECK(std::abs(distance(space, MetricObject::quantile(q0), MetricObject::quantile(q1)) -
                   1.0) < 1e-3);
}

TEST_CASE("quadrature weights are positive and sum to one") {
    for (int m : {1, 2, 5, 99, 999}) {
        const Eigen::VectorXd grid = uniform_grid(m);
        const Eigen::VectorXd w = midpoint_weights(grid);
        REQUIRE(w.size() == m);
        CHECK(w.minCoeff() > 0.0);
        CHECK(std::abs(w.sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("object validation enforces the space invariants") {
    CHECK_THROWS_AS(MetricObject::sphere(vec3(1, 1, 0)), invalid_input_error);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(MetricObject::spd(asym), invalid_input_error);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(MetricObject::spd(indefinite), geometry_error);
    CHECK_THROWS_AS(MetricObject::quantile(vec2(1.0, 0.0)), invalid_input_error);
    CHECK_NOTHROW(MetricObject::quantile(vec2(1.0, 1.0)));
}

TEST_CASE("distance rejects mismatched kinds and dimensions") {
    const SpaceDescriptor space = SpaceDescriptor::euclidean(2);
    CHECK_THROWS_AS(distance(space, MetricObject::euclidean(vec2(0, 0)),
                             MetricObject::euclidean(vec3(0, 0, 0))),
                    invalid_input_error);
    CHECK_THROWS_AS(
        distance(space, MetricObject::euclidean(vec2(0, 0)), MetricObject::sphere(vec3(1, 0, 0))),
        invalid_input_error);
}

TEST_CASE("distance symmetry and triangle inequality on sampled triples") {
    for (const auto& space : all_geometries()) {
        Rng rng(0xABCD + static_cast<int>(space.kind) * 17 + static_cast<int>(space.variant));
        for (int t = 0; t < 1000; ++t) {
            const MetricObject a = random_object(space, rng);
            const MetricObject b = random_object(space, rng);
            const MetricObject c = random_object(space, rng);
            const double ab = distance(space, a, b);
            const double ba = distance(space, b, a);
            REQUIRE(std::abs(ab - ba) < 1e-12);
            REQUIRE(ab + distance(space, b, c) + 1e-10 >= distance(space, a, c));
            REQUIRE(distance(space, a, a) < 1e-9);
        }
    }
}

TEST_CASE("frechet mean closed forms") {
    SUBCASE("euclidean average") {
        const SpaceDescriptor space = SpaceDescriptor::euclidean(2);
        const std::vector<MetricObject> pts = {MetricObject::euclidean(vec2(0, 0)),
                                               MetricObject::euclidean(vec2(2, 0))};
        const FrechetSummary summary = frechet_mean(space, pts);
        CHECK((summary.mean.vector() - vec2(1, 0)).norm() < 1e-14);
        CHECK(summary.variance == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(summary.iterations == 0);
    }
    SUBCASE("weighted euclidean average") {
        const SpaceDescriptor space = SpaceDescriptor::euclidean(1);
        Eigen::VectorXd w(2);
        w << 3.0, 1.0;
        std::vector<MetricObject> pts;
        pts.push_back(MetricObject::euclidean(Eigen::VectorXd::Zero(1)));
        pts.push_back(MetricObject::euclidean(Eigen::VectorXd::Ones(1) * 4.0));
        const FrechetSummary summary = frechet_mean(space, pts, w);
        CHECK(summary.mean.vector()[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("sphere chordal mean is the normalized midpoint") {
        const SpaceDescriptor space = SpaceDescriptor::sphere(3, MetricVariant::chordal);
        const std::vector<MetricObject> pts = {MetricObject::sphere(vec3(1, 0, 0)),
                                               MetricObject::sphere(vec3(0, 1, 0))};
        const FrechetSummary summary = frechet_mean(space, pts);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        CHECK((summary.mean.vector() - vec3(inv_sqrt2, inv_sqrt2, 0)).norm() < 1e-12);
    }
    SUBCASE("sphere chordal mean degenerates for antipodal pairs") {
        const SpaceDescriptor space = SpaceDescriptor::sphere(3, MetricVariant::chordal);
        const std::vector<MetricObject> pts = {MetricObject::sphere(vec3(1, 0, 0)),
                                               MetricObject::sphere(vec3(-1, 0, 0))};
        CHECK_THROWS_AS(frechet_mean(space, pts), degenerate_error);
    }
    SUBCASE("log-euclidean mean of commuting matrices is the geometric mean") {
        const SpaceDescriptor space = SpaceDescriptor::spd(2, MetricVariant::log_euclidean);
        const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(2, 2);
        const double e2 = std::exp(2.0);
        const std::vector<MetricObject> pts = {MetricObject::spd(identity),
                                               MetricObject::spd(e2 * identity)};
        const FrechetSummary summary = frechet_mean(space, pts);
        CHECK((summary.mean.matrix() - std::exp(1.0) * identity).norm() < 1e-10);
    }
    SUBCASE("wasserstein mean is the pointwise quantile average and stays monotone") {
        const SpaceDescriptor space = SpaceDescriptor::wasserstein(uniform_grid(33));
        Rng rng(5);
        std::vector<MetricObject> pts;
        for (int i = 0; i < 7; ++i) pts.push_back(random_quantile(space.grid, rng));
        const FrechetSummary summary = frechet_mean(space, pts);
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(space.grid.size());
        for (const auto& p : pts) expected += p.vector();
        expected /= 7.0;
        CHECK((summary.mean.vector() - expected).norm() < 1e-12);
        for (int j = 1; j < expected.size(); ++j) {
            CHECK(summary.mean.vector()[j] >= summary.mean.vector()[j - 1]);
        }
    }
}

TEST_CASE("sphere geodesic Karcher mean recovers symmetric centers") {
    const SpaceDescriptor space = SpaceDescriptor::sphere(3, MetricVariant::geodesic);
    const double angle = 0.6;
    const std::vector<MetricObject> pts = {
        MetricObject::sphere(vec3(std::cos(angle), std::sin(angle), 0)),
        MetricObject::sphere(vec3(std::cos(angle), -std::sin(angle), 0))};
    const FrechetSummary summary = frechet_mean(space, pts);
    CHECK((summary.mean.vector() - vec3(1, 0, 0)).norm() < 1e-9);
    CHECK(summary.mean.vector().norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(summary.variance == doctest::Approx(angle * angle).epsilon(1e-8));
    CHECK(summary.gradient_norm <= 1e-10);
    CHECK(summary.iterations >= 1);
}

TEST_CASE("frechet mean is optimal against sampled candidates") {
    for (const auto& space : all_geometries()) {
        Rng rng(0x5EED + static_cast<int>(space.kind) + 7 * static_cast<int>(space.variant));
        for (int round = 0; round < 25; ++round) {
            const std::vector<MetricObject> pts = random_sample(space, 12, rng);
            const FrechetSummary summary = frechet_mean(space, pts);
            for (const auto& candidate : pts) {
                double objective = 0.0;
                for (const auto& p : pts) {
                    const double d = distance(space, candidate, p);
                    objective += d * d;
                }
                objective /= static_cast<double>(pts.size());
                REQUIRE(summary.variance <= objective + 1e-9);
            }
        }
    }
}

TEST_CASE("reported variance equals the mean squared distance to the mean") {
    for (const auto& space : all_geometries()) {
        Rng rng(0xFACE + static_cast<int>(space.kind) + 3 * static_cast<int>(space.variant));
        const std::vector<MetricObject> pts = random_sample(space, 9, rng);
        const FrechetSummary summary = frechet_mean(space, pts);
        double objective = 0.0;
        for (const auto& p : pts) {
            const double d = distance(space, summary.mean, p);
            objective += d * d;
        }
        objective /= static_cast<double>(pts.size());
        CHECK(std::abs(summary.variance - objective) < 1e-10);
    }
}

TEST_CASE("sphere log and exp") {
    const Eigen::VectorXd e1 = vec3(1, 0, 0);
    const Eigen::VectorXd e2 = vec3(0, 1, 0);

    CHECK(sphere_log(e1, e1).norm() == 0.0);

    const Eigen::VectorXd quarter = sphere_log(e1, e2);
    CHECK(quarter.norm() == doctest::Approx(M_PI / 2).epsilon(1e-13));
    CHECK((quarter - (M_PI / 2) * e2).norm() < 1e-12);

    CHECK_THROWS_AS(sphere_log(e1, vec3(-1, 0, 0)), geometry_error);

    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        const Eigen::VectorXd base = random_sphere_point(3, rng).vector();
        const Eigen::VectorXd y = random_sphere_point(3, rng).vector();
        if (base.dot(y) < -1.0 + 1e-6) continue;
        const Eigen::VectorXd tangent = sphere_log(base, y);
        CHECK(std::abs(tangent.dot(base)) < 1e-10);
        CHECK((sphere_exp(base, tangent) - y).norm() < 1e-10);
        const double arc = std::acos(std::clamp(base.dot(y), -1.0, 1.0));
        CHECK(std::abs(tangent.norm() - arc) < 1e-10);
    }
}

TEST_CASE("log-cholesky coordinates") {
    SUBCASE("identity maps to zero") {
        CHECK(spd_log_cholesky_coords(Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    }
    SUBCASE("diagonal example splits into log-diagonal and zero off-diagonal") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2, 2);
        d(0, 0) = std::exp(2.0);
        const Eigen::VectorXd coords = spd_log_cholesky_coords(d);
        REQUIRE(coords.size() == log_cholesky_dim(2));
        CHECK(coords[0] == doctest::Approx(0.0));                    // L21
        CHECK(coords[1] == doctest::Approx(1.0).epsilon(1e-12));     // log l11
        CHECK(coords[2] == doctest::Approx(0.0).epsilon(1e-12));     // log l22
    }
    SUBCASE("round trip on random SPD matrices") {
        Rng rng(33);
        for (int t = 0; t < 200; ++t) {
            const int p = 2 + static_cast<int>(rng.uniform_index(4));
            const Eigen::MatrixXd y = random_spd_matrix(p, rng).matrix();
            const Eigen::VectorXd coords = spd_log_cholesky_coords(y);
            REQUIRE(coords.size() == log_cholesky_dim(p));
            CHECK((spd_from_log_cholesky_coords(coords, p) - y).norm() < 1e-10);
        }
    }
    SUBCASE("coordinate distance equals the metric") {
        Rng rng(34);
        const SpaceDescriptor space = SpaceDescriptor::spd(3, MetricVariant::log_cholesky);
        for (int t = 0; t < 100; ++t) {
            const MetricObject a = random_spd_matrix(3, rng);
            const MetricObject b = random_spd_matrix(3, rng);
            const double coord_dist =
                (spd_log_cholesky_coords(a) - spd_log_cholesky_coords(b)).norm();
            CHECK(std::abs(coord_dist - distance(space, a, b)) < 1e-12);
        }
    }
}

TEST_CASE("matrix log and exp") {
    CHECK(spd_matrix_log(Eigen::MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = std::exp(1.0);
    d(1, 1) = std::exp(3.0);
    const Eigen::MatrixXd logd = spd_matrix_log(d);
    CHECK(logd(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(logd(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(logd(0, 1)) < 1e-14);

    Rng rng(44);
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXd y = random_spd_matrix(4, rng).matrix();
        CHECK((spd_matrix_exp(spd_matrix_log(y)) - y).norm() < 1e-9 * std::max(1.0, y.norm()));
    }
}

TEST_CASE("sample coordinate table agrees with pairwise distances") {
    for (const auto& space : all_geometries()) {
        Rng rng(0xC0DE + static_cast<int>(space.kind) + 11 * static_cast<int>(space.variant));
        const std::vector<MetricObject> sample = random_sample(space, 15, rng);
        const SampleCoords coords = distance_coords(space, sample);
        for (int i = 0; i < 15; ++i) {
            for (int j = 0; j < 15; ++j) {
                REQUIRE(std::abs(coords(i, j) - distance(space, sample[i], sample[j])) < 1e-10);
            }
        }
    }
}

TEST_CASE("validate_sample names the offending index") {
    const SpaceDescriptor space = SpaceDescriptor::euclidean(2);
    std::vector<MetricObject> sample = {MetricObject::euclidean(vec2(0, 1)),
                                        MetricObject::euclidean(vec3(0, 1, 2))};
    try {
        validate_sample(space, sample, "predictor");
        FAIL("expected invalid_input_error");
    } catch (const invalid_input_error& e) {
        const std::string message = e.what();
        CHECK(message.find("predictor") != std::string::npos);
        CHECK(message.find("1") != std::string::npos);
    }
}

TEST_CASE("descriptor validation") {
    CHECK_THROWS_AS(SpaceDescriptor::euclidean(0), invalid_input_error);
    CHECK_THROWS_AS(SpaceDescriptor::wasserstein(vec2(0.9, 0.1)), invalid_input_error);
    Eigen::VectorXd grid = vec2(0.25, 0.75);
    Eigen::VectorXd bad_weights = vec2(0.5, -0.1);
    CHECK_THROWS_AS(SpaceDescriptor::wasserstein(grid, bad_weights), invalid_input_error);
    CHECK_NOTHROW(SpaceDescriptor::wasserstein(grid));
}
