#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "freezing/markov_core.hpp"
#include "freezing/pdmp_sim.hpp"
#include "freezing/random.hpp"

namespace freezing {

/// log of the Dirichlet(alpha) density at an interior simplex point.
double log_dirichlet_density(const Vector& alpha, const Vector& x);
double dirichlet_density(const Vector& alpha, const Vector& x);
/// Gradient of the density viewed as a function of all D ambient coordinates.
Vector dirichlet_density_gradient(const Vector& alpha, const Vector& x);
/// Normalised independent Gamma(alpha_k) draws.
Vector dirichlet_sample(const Vector& alpha, Rng& rng);
Vector dirichlet_mean(const Vector& alpha);
/// (diag(m) - m m^T) / (|alpha| + 1) with m the mean.
Matrix dirichlet_covariance(const Vector& alpha);

double beta_cdf(double alpha, double beta, double x);
double beta_quantile(double alpha, double beta, double u);
double beta_density(double alpha, double beta, double x);

/// sum_i nu_i D(a theta + e_i) (x) delta_i, nu = theta / |theta|.
struct DirichletMixtureSpec {
  Vector theta;
  double a = 1.0;
  Vector weights;
  std::vector<Vector> components;

  int dim() const { return static_cast<int>(theta.size()); }
  /// a theta, the parameter of the x-marginal.
  Vector marginal_parameters() const { return a * theta; }
  double component_density(const Vector& x, int i) const;
  double marginal_density(const Vector& x) const;
  Vector marginal_mean() const;
  Matrix marginal_covariance() const;
  /// (X, I) drawn from the mixture, with t = 0.
  EZZState sample(Rng& rng) const;
};

DirichletMixtureSpec dirichlet_mixture(std::span<const double> theta, double a);

/// D = 2 reduction in the coordinate x = x_1:
/// w_1 beta(a theta_1 + 1, a theta_2) (x) delta_1 + w_2 beta(a theta_1, a theta_2 + 1) (x) delta_2.
struct BetaMixtureSpec {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double a = 1.0;
  double w1 = 0.5;
  double w2 = 0.5;

  double component_density(double x, int i) const;
  double marginal_density(double x) const;
  double marginal_cdf(double x) const;
};

BetaMixtureSpec beta_mixture_d2(double theta1, double theta2, double a);

/// Candidate density phi(x, i) of the invariant law, with optional analytic
/// gradient in the ambient coordinates.
struct PhiCandidate {
  int dim = 0;
  std::function<double(const Vector&, int)> value;
  std::function<Vector(const Vector&, int)> gradient;
};

/// phi(x, i) = density of D(a theta + e_i) at x.
PhiCandidate phi_complete_graph(std::span<const double> theta, double a);

/// Left-hand side of the stationary transport system at (x, i):
///   (D-1) phi + sum_k x_k d_k phi - d_i phi + sum_j (nu_j/nu_i) a q(j,i) phi(x, j).
/// Throws BoundaryTooClose when some x_k < delta. Uses central differences with
/// step fd_step when the candidate has no gradient.
double pde_residual(const PhiCandidate& phi, const GeneratorMatrix& q, double a, const Vector& nu, const Vector& x,
                    int i, double delta = 1e-3, double fd_step = 1e-6);

/// Deterministic low-discrepancy points of the open simplex with every
/// coordinate >= delta (Kronecker sequence mapped through sorted spacings).
std::vector<Vector> interior_points(int dim, std::size_t count, double delta = 1e-3);

/// Two-state limit objects of the turnover algorithm.
struct TurnoverSpec {
  double theta1 = 1.0;
  double theta2 = 1.0;
  double nu1 = 0.5;
  /// Gaussian variance of the fluctuation of x = x_1 (standard regime).
  std::optional<double> variance;
  /// Same for the [-1, 1] coordinate x* = 2x - 1, i.e. 4 variance.
  std::optional<double> variance_pm1;
  /// Limit law in the non-standard regime.
  std::optional<BetaMixtureSpec> mixture;
};

/// Standard regime: variance (2/|theta| - p) nu_1 (1 - nu_1) / (1 + Upsilon).
TurnoverSpec turnover_standard(double theta1, double theta2, double p, double upsilon);
/// Non-standard regime with p_n ~ a/n.
TurnoverSpec turnover_nonstandard(double theta1, double theta2, double a);

/// phi(x, i) and the marginal density on the lattice {k/grid} of the open
/// simplex. Columns: x_1..x_D, phi_1..phi_D, marginal.
Matrix density_table(const DirichletMixtureSpec& spec, int grid);

}  // namespace freezing
