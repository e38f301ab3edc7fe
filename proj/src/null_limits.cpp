#include "fcc/null_limits.hpp"

#include <cmath>
#include <string>

#include "fcc/rng.hpp"

namespace fcc {

const char* to_string(SpectrumForm form) {
    switch (form) {
        case SpectrumForm::manifold: return "fixed_M_manifold";
        case SpectrumForm::wasserstein: return "fixed_M_wasserstein";
    }
    return "?";
}

namespace {

void require_flat_cells(const EmbeddedSample& embedded, const Partition& partition,
                        const char* where) {
    partition.validate();
    if (!embedded.flat()) {
        throw invalid_input_error(std::string(where) +
                                  ": requires a flat embedding (euclidean, wasserstein or "
                                  "log-Cholesky coordinates), not a sphere tangent lift");
    }
    if (embedded.n() != partition.n()) {
        throw invalid_input_error(std::string(where) + ": sample size does not match partition");
    }
    for (int size : partition.cell_sizes) {
        if (size < 2) {
            throw invalid_input_error(std::string(where) +
                                      ": every cell needs at least 2 members for a covariance "
                                      "plug-in");
        }
    }
}

/// Within-cell covariance matrices of the embedding rows (1/n_m normalized).
std::vector<Eigen::MatrixXd> cell_covariances(const EmbeddedSample& embedded,
                                              const Partition& partition) {
    const Eigen::Index d = embedded.dim();
    const int m = partition.num_cells();
    std::vector<Eigen::MatrixXd> sigma;
    sigma.reserve(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const std::vector<int> members = partition.cell_members(c);
        Eigen::MatrixXd block(members.size(), d);
        for (std::size_t r = 0; r < members.size(); ++r) {
            block.row(static_cast<Eigen::Index>(r)) = embedded.rows.row(members[r]);
        }
        const Eigen::RowVectorXd mean = block.colwise().mean();
        block.rowwise() -= mean;
        sigma.push_back(block.transpose() * block / static_cast<double>(members.size()));
    }
    return sigma;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw convergence_error("psd_sqrt: eigen-solver did not converge", 0, 0.0);
    }
    const Eigen::ArrayXd clamped = es.eigenvalues().array().max(0.0);
    return es.eigenvectors() * clamped.sqrt().matrix().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SpectrumResult fixed_m_spectrum(const EmbeddedSample& embedded, const Partition& partition,
                                double v_f_hat, SpectrumForm form) {
    require_flat_cells(embedded, partition, "fixed_m_spectrum");
    if (!(v_f_hat > 0.0)) {
        throw invalid_input_error("fixed_m_spectrum: v_f_hat must be positive");
    }

    const Eigen::Index d = embedded.dim();
    const int m = partition.num_cells();

    // Per-cell plug-ins. The influence-function covariance is C_m = 4 S_m
    // with S_m the coordinate covariance; its square root is 2 sqrt(S_m).
    // Together with the Hessian blocks (I/2 in the manifold convention, I in
    // the wasserstein one) every block of the limit matrix reduces to
    //   factor * (delta_{mk} - sqrt(p_m p_k)) * sqrt(S_m) sqrt(S_k),
    // with factor 2 (manifold) or 1 (wasserstein).
    const std::vector<Eigen::MatrixXd> sigma = cell_covariances(embedded, partition);
    std::vector<Eigen::MatrixXd> roots;
    roots.reserve(sigma.size());
    for (const auto& s : sigma) roots.push_back(psd_sqrt(s));

    const double factor = (form == SpectrumForm::manifold) ? 2.0 : 1.0;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m * d, m * d);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const double coupling =
                (r == c ? 1.0 : 0.0) -
                std::sqrt(partition.cell_fractions[static_cast<std::size_t>(r)] *
                          partition.cell_fractions[static_cast<std::size_t>(c)]);
            b.block(r * d, c * d, d, d) =
                factor * coupling * roots[static_cast<std::size_t>(r)] *
                roots[static_cast<std::size_t>(c)];
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) {
        throw convergence_error("fixed_m_spectrum: eigen-solver did not converge", 0, 0.0);
    }
    SpectrumResult out;
    out.eigenvalues = es.eigenvalues().reverse();  // descending
    out.scale = (form == SpectrumForm::manifold) ? 1.0 / (2.0 * v_f_hat) : 1.0 / v_f_hat;
    out.source = form;
    return out;
}

double chi2_upper_tail(double x, int k) {
    if (k < 1) throw invalid_input_error("chi2_upper_tail: degrees of freedom must be positive");
    if (x < 0.0) throw invalid_input_error("chi2_upper_tail: x must be non-negative");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(k);
    const double half_x = 0.5 * x;
    const double log_prefactor = -half_x + a * std::log(half_x) - std::lgamma(a);

    if (half_x < a + 1.0) {
        // Lower series converges fast here; return its complement.
        double term = 1.0 / a;
        double sum = term;
        for (int i = 1; i < 1000; ++i) {
            term *= half_x / (a + static_cast<double>(i));
            sum += term;
            if (term < sum * 1e-16) break;
        }
        return std::min(1.0, std::max(0.0, 1.0 - sum * std::exp(log_prefactor)));
    }
    // Upper continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double b = half_x + 1.0 - a;
    double c = 1.0 / tiny;
    double den = 1.0 / b;
    double h = den;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        den = an * den + b;
        if (std::abs(den) < tiny) den = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        den = 1.0 / den;
        const double delta = den * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, std::exp(log_prefactor) * h));
}

WeightedChi2Tail weighted_chi2_tail(double x, const Eigen::VectorXd& gammas, int draws,
                                    std::uint64_t seed) {
    if (!gammas.allFinite()) {
        throw invalid_input_error("weighted_chi2_tail: gammas must be finite");
    }
    if (draws < 1) throw invalid_input_error("weighted_chi2_tail: draws must be positive");
    if (gammas.size() == 0) {
        // Point mass at zero.
        return WeightedChi2Tail{x <= 0.0 ? 1.0 : 0.0, 0.0};
    }
    Rng rng(seed);
    const Eigen::Index l = gammas.size();
    long hits = 0;
    for (int rep = 0; rep < draws; ++rep) {
        double value = 0.0;
        for (Eigen::Index j = 0; j < l; ++j) {
            const double z = rng.normal();
            value += gammas[j] * z * z;
        }
        if (value >= x) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(draws);
    const double se = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(draws));
    return WeightedChi2Tail{p, se};
}

WeightedChi2Tail spectrum_tail(const SpectrumResult& spectrum, double statistic, int draws,
                               std::uint64_t seed) {
    if (!(spectrum.scale > 0.0)) {
        throw invalid_input_error("spectrum_tail: spectrum scale must be positive");
    }
    return weighted_chi2_tail(statistic / spectrum.scale, spectrum.eigenvalues, draws, seed);
}

StudentizedDiagnostic studentized_diagnostic(const EmbeddedSample& embedded,
                                             const Partition& partition, double rho_hat,
                                             double v_f_hat) {
    require_flat_cells(embedded, partition, "studentized_diagnostic");
    if (!(v_f_hat > 0.0)) {
        throw invalid_input_error("studentized_diagnostic: v_f_hat must be positive");
    }

    const std::vector<Eigen::MatrixXd> sigma = cell_covariances(embedded, partition);
    StudentizedDiagnostic out;
    double trace_sum = 0.0;
    double trace_sq_sum = 0.0;
    for (const auto& s : sigma) {
        const double tr = s.trace();
        const double tr_sq = (s * s).trace();
        out.sigma_traces.push_back(tr);
        out.sigma_sq_traces.push_back(tr_sq);
        out.c_traces.push_back(4.0 * tr);
        trace_sum += tr;
        trace_sq_sum += tr_sq;
    }

    // Manifold convention: C_m = 4 S_m, Hessian 2I, so tr(H^-1 C_m) = 2 tr(S_m).
    out.mu_hat = 2.0 * trace_sum;
    out.sigma_hat = std::sqrt(8.0 * trace_sq_sum);
    if (out.sigma_hat <= 0.0) {
        throw degenerate_error(
            "studentized_diagnostic: plug-in variance is zero (responses constant within "
            "every cell), the z-score is undefined");
    }

    const double n = static_cast<double>(partition.n());
    const double n_rho = n * rho_hat;
    out.z_manifold = (n_rho - out.mu_hat / (2.0 * v_f_hat)) / (out.sigma_hat / (2.0 * v_f_hat));
    const double sigma_w = std::sqrt(2.0 * trace_sq_sum);
    out.z_wasserstein = (n_rho - trace_sum / v_f_hat) / (sigma_w / v_f_hat);
    if (std::abs(out.z_manifold - out.z_wasserstein) > 1e-10) {
        throw std::logic_error(
            "studentized_diagnostic: the two z-score conventions disagree beyond tolerance");
    }
    out.z_score = out.z_manifold;
    return out;
}

}  // namespace fcc
