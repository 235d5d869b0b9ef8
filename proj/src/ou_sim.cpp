#include "freezing/ou_sim.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "freezing/error.hpp"
#include "freezing/stats.hpp"

namespace freezing {

namespace {

void require_upsilon(double upsilon) {
  if (!(1.0 + upsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "Sigma needs 1 + Upsilon > 0");
}

}  // namespace

SigmaSpec sigma_matrix(const GeneratorMatrix& q, const StationaryLaw& nu, const PoissonSolution& h, double p,
                       double upsilon) {
  require_upsilon(upsilon);
  if (!q.irreducible()) throw Error(ErrorCode::NotIrreducible, "Sigma requires an irreducible generator");
  const int d = q.dim();
  Matrix sigma = Matrix::Zero(d, d);
  Vector diff(d);
  for (int i = 0; i < d; ++i) {
    Matrix jump = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      if (j == i || q(i, j) == 0.0) continue;
      diff = h.h.col(j) - h.h.col(i);
      jump.noalias() += q(i, j) * diff * diff.transpose();
    }
    Vector centred = nu.nu;
    centred(i) -= 1.0;
    sigma += nu.nu(i) * (jump - p * centred * centred.transpose());
  }
  sigma /= 1.0 + upsilon;
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return {std::move(sigma), p, upsilon, SigmaSource::GeneralFormula};
}

SigmaSpec sigma_matrix(const GeneratorMatrix& q, double p, double upsilon) {
  const auto nu = stationary_distribution(q);
  return sigma_matrix(q, nu, poisson_solution(q, nu), p, upsilon);
}

SigmaSpec fluctuation_covariance(const GeneratorMatrix& q, double p, double upsilon) {
  auto spec = sigma_matrix(q, p, -upsilon);
  spec.upsilon = upsilon;
  return spec;
}

SigmaSpec complete_graph_sigma(std::span<const double> theta, double p, double upsilon) {
  require_upsilon(upsilon);
  const auto nu = complete_graph_stationary(theta).nu;
  const double total = std::accumulate(theta.begin(), theta.end(), 0.0);
  Matrix base = Matrix(nu.asDiagonal()) - nu * nu.transpose();
  return {(2.0 / total - p) / (1.0 + upsilon) * base, p, upsilon, SigmaSource::CompleteGraphClosedForm};
}

GaussianSpec psd_sqrt(const Matrix& sigma, double clip_tol) {
  if (sigma.rows() != sigma.cols()) throw Error(ErrorCode::InvalidArgument, "covariance must be square");
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  Vector ev = solver.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -clip_tol) {
      throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(ev(k)) + " below -" + std::to_string(clip_tol));
    }
    ev(k) = std::sqrt(std::max(ev(k), 0.0));
  }
  const Matrix& v = solver.eigenvectors();
  GaussianSpec g;
  g.mean = Vector::Zero(sigma.rows());
  g.covariance = sym;
  g.factor = v * ev.asDiagonal() * v.transpose();
  return g;
}

Vector gaussian_draw(const GaussianSpec& g, Rng& rng) {
  Vector z(g.factor.cols());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = standard_normal(rng);
  return g.mean + g.factor * z;
}

Vector ou_exact_step(const Vector& y, double dt, const GaussianSpec& g, Rng& rng) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (y.size() != g.factor.rows()) throw Error(ErrorCode::InvalidArgument, "state has wrong dimension");
  Vector z(g.factor.cols());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = standard_normal(rng);
  return y * std::exp(-dt) + std::sqrt(-std::expm1(-2.0 * dt)) * (g.factor * z);
}

Matrix ou_path(const Vector& y0, double dt, std::size_t steps, const GaussianSpec& g, Rng& rng) {
  Matrix out(static_cast<Eigen::Index>(steps + 1), y0.size());
  Vector y = y0;
  out.row(0) = y.transpose();
  for (std::size_t s = 1; s <= steps; ++s) {
    y = ou_exact_step(y, dt, g, rng);
    out.row(static_cast<Eigen::Index>(s)) = y.transpose();
  }
  return out;
}

Matrix stationary_sample(const GaussianSpec& g, std::size_t M, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  Matrix out(static_cast<Eigen::Index>(M), g.factor.rows());
  for (std::size_t m = 0; m < M; ++m) out.row(static_cast<Eigen::Index>(m)) = gaussian_draw(g, rng).transpose();
  return out;
}

ContractionCheck ou_contraction_check(double variance, double c, double t, std::size_t M, std::uint64_t seed) {
  if (!(variance > 0.0) || t < 0.0 || M == 0) throw Error(ErrorCode::InvalidArgument, "bad contraction check input");
  const double s = std::sqrt(variance);
  Rng rng(derive_seed(seed, 0));
  const double decay = std::exp(-t);
  const double noise = std::sqrt(-std::expm1(-2.0 * t));
  std::vector<double> yt(M);
  double total = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const double y_stat = s * standard_normal(rng);
    const double common = t > 0.0 ? s * noise * standard_normal(rng) : 0.0;
    const double y = c * decay + common;
    const double y_tilde = y_stat * decay + common;
    yt[m] = y;
    total += std::abs(y - y_tilde);
  }
  // E|c - sZ| for Z ~ N(0, 1).
  const boost::math::normal_distribution<double> std_normal;
  const double u = c / s;
  const double start = s * (2.0 * boost::math::pdf(std_normal, u) + u * (2.0 * boost::math::cdf(std_normal, u) - 1.0));
  ContractionCheck out;
  out.t = t;
  out.measured = total / static_cast<double>(M);
  out.predicted = start * decay;
  out.ratio = out.predicted > 0.0 ? out.measured / out.predicted : 0.0;
  out.empirical_w1 = wasserstein1_1d(yt, [s](double p) {
    return s * boost::math::quantile(boost::math::normal_distribution<double>(), p);
  });
  return out;
}

}  // namespace freezing
