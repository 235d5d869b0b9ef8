#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "freezing/markov_core.hpp"
#include "freezing/random.hpp"

namespace freezing {

enum class SigmaSource { GeneralFormula, CompleteGraphClosedForm };

/// Limit covariance Sigma^{(p, Upsilon)} with the parameters it was built from.
struct SigmaSpec {
  Matrix sigma;
  double p = 0.0;
  double upsilon = 0.0;
  SigmaSource source = SigmaSource::GeneralFormula;
};

/// Sigma_{k,l} = (1+Upsilon)^{-1} sum_i nu_i [ sum_j q(i,j) (h_{l,j}-h_{l,i})(h_{k,j}-h_{k,i})
///                                            - p (nu_k - 1{i=k})(nu_l - 1{i=l}) ].
/// Depends on h only through differences, so any gauge gives the same matrix.
SigmaSpec sigma_matrix(const GeneratorMatrix& q, const StationaryLaw& nu, const PoissonSolution& h, double p,
                       double upsilon);

/// Same, solving for nu and h internally.
SigmaSpec sigma_matrix(const GeneratorMatrix& q, double p, double upsilon);

/// Covariance that y_n = sqrt(n p_n)(x_n - nu) actually settles to under a
/// Standard schedule. With p_{n+1}/p_n = 1 + Upsilon/n the drift of y_n in the
/// time scale log n is -(1 - Upsilon)/2, so this is sigma_matrix(q, p, -Upsilon).
SigmaSpec fluctuation_covariance(const GeneratorMatrix& q, double p, double upsilon);

/// Complete graph: Sigma = (2/|theta| - p)/(1+Upsilon) (diag(nu) - nu nu^T).
SigmaSpec complete_graph_sigma(std::span<const double> theta, double p, double upsilon);

/// Centred Gaussian with a symmetric PSD square root of its covariance.
struct GaussianSpec {
  Vector mean;
  Matrix covariance;
  Matrix factor;
};

/// Symmetric eigendecomposition with eigenvalues in [-clip_tol, 0) set to 0.
/// Throws NotPSD below -clip_tol.
GaussianSpec psd_sqrt(const Matrix& sigma, double clip_tol = 1e-10);
inline GaussianSpec psd_sqrt(const SigmaSpec& spec, double clip_tol = 1e-10) {
  return psd_sqrt(spec.sigma, clip_tol);
}

/// One draw of N(mean, covariance).
Vector gaussian_draw(const GaussianSpec& g, Rng& rng);

/// Exact transition of dY = -Y dt + sqrt(2) Sigma^{1/2} dW over dt:
/// y e^{-dt} + N(0, Sigma (1 - e^{-2dt})).
Vector ou_exact_step(const Vector& y, double dt, const GaussianSpec& g, Rng& rng);

/// Rows are y_0, y_dt, ..., y_{steps dt}.
Matrix ou_path(const Vector& y0, double dt, std::size_t steps, const GaussianSpec& g, Rng& rng);

/// M x D matrix of stationary draws N(0, Sigma); one stream seeded by `seed`.
Matrix stationary_sample(const GaussianSpec& g, std::size_t M, std::uint64_t seed);

struct ContractionCheck {
  double t = 0.0;
  /// Mean |Y_t - Y~_t| over synchronously coupled pairs, Y_0 = c, Y~_0 ~ N(0, s^2).
  double measured = 0.0;
  /// W(delta_c, N(0, s^2)) e^{-t} = E|c - s Z| e^{-t}.
  double predicted = 0.0;
  double ratio = 0.0;
  /// W1 between the simulated Y_t and N(0, s^2); bounded above by the coupling cost.
  double empirical_w1 = 0.0;
};

/// One-dimensional contraction check with stationary variance `variance`.
ContractionCheck ou_contraction_check(double variance, double c, double t, std::size_t M, std::uint64_t seed);

}  // namespace freezing
