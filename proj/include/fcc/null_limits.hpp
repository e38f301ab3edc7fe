#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fcc/embedding.hpp"
#include "fcc/partition.hpp"

namespace fcc {

/// Which plug-in convention the spectrum uses. Both describe the same null
/// law of n * rho_hat: the manifold form pairs eigenvalues of the
/// influence-function matrix (covariances of 2(Z - Zbar), Hessian blocks
/// I/2) with the scale 1/(2 v_f); the wasserstein form works directly with
/// the coordinate covariances and the scale 1/v_f, halving every eigenvalue.
enum class SpectrumForm { manifold, wasserstein };

const char* to_string(SpectrumForm form);

/// Eigenvalues of the between-cell limit operator, with the scale that turns
/// them into the null law of n * rho_hat:
///   n * rho_hat  =>  scale * sum_l gamma_l * Z_l^2,  Z_l i.i.d. N(0,1).
struct SpectrumResult {
    Eigen::VectorXd eigenvalues;  // descending, length M * d
    double scale = 0.0;           // 1/(2 v_f) manifold, 1/v_f wasserstein
    SpectrumForm source = SpectrumForm::manifold;
};

/// Plug-in fixed-M spectrum from a flat embedding: per-cell covariances on
/// the diagonal, the cell-fraction rank-one coupling subtracted, assembled
/// into the (M d) x (M d) symmetric matrix and eigen-decomposed. Requires a
/// flat embedding and every cell size at least 2.
SpectrumResult fixed_m_spectrum(const EmbeddedSample& embedded, const Partition& partition,
                                double v_f_hat, SpectrumForm form = SpectrumForm::manifold);

/// Upper tail of the chi-square law with k degrees of freedom, via the
/// regularized incomplete gamma function (series / continued-fraction
/// split), absolute error below 1e-10.
double chi2_upper_tail(double x, int k);

/// Monte Carlo tail estimate with its binomial standard error.
struct WeightedChi2Tail {
    double value = 0.0;
    double std_err = 0.0;
};

/// P(sum_l gamma_l Z_l^2 >= x) by seeded Monte Carlo. Deterministic for a
/// fixed (gammas, draws, seed), hence monotone non-increasing in x.
WeightedChi2Tail weighted_chi2_tail(double x, const Eigen::VectorXd& gammas,
                                    int draws = 1000000,
                                    std::uint64_t seed = 0x9D1337ull);

/// Tail probability of the implied null law of n * rho_hat at `statistic`.
WeightedChi2Tail spectrum_tail(const SpectrumResult& spectrum, double statistic,
                               int draws = 1000000, std::uint64_t seed = 0x9D1337ull);

/// Normal-approximation diagnostic for growing partitions: centers and
/// scales n * rho_hat by the plug-in cumulative cell variances. Stored
/// values follow the manifold convention,
///   mu_hat = sum_m tr(C_m)/2,  sigma_hat^2 = 2 sum_m tr((C_m/2)^2),
///   z = (n rho_hat - mu_hat/(2 v_f)) / (sigma_hat/(2 v_f)),
/// and the coordinate-covariance (wasserstein) convention
///   z = (n rho_hat - sum tr(S_m)/v_f) / (sqrt(2 sum tr(S_m^2))/v_f)
/// is computed alongside; the two agree algebraically (C_m = 4 S_m) and the
/// implementation checks the match to 1e-10.
struct StudentizedDiagnostic {
    double mu_hat = 0.0;
    double sigma_hat = 0.0;
    double z_score = 0.0;        // the manifold-form z (equal to z_wasserstein)
    double z_manifold = 0.0;
    double z_wasserstein = 0.0;
    std::vector<double> sigma_traces;     // tr(S_m) per cell
    std::vector<double> sigma_sq_traces;  // tr(S_m^2) per cell
    std::vector<double> c_traces;         // tr(C_m) = 4 tr(S_m) per cell
};

/// Requires a flat embedding, every cell size at least 2, and positive
/// pooled Frechet variance; throws degenerate_error when the plug-in
/// variance sigma_hat vanishes (all rows constant within every cell).
StudentizedDiagnostic studentized_diagnostic(const EmbeddedSample& embedded,
                                             const Partition& partition, double rho_hat,
                                             double v_f_hat);

}  // namespace fcc
