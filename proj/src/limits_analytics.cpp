#include "freezing/limits_analytics.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <memory>
#include <random>

#include "freezing/error.hpp"

namespace freezing {

namespace {

void require_positive(const Vector& alpha) {
  if (alpha.size() < 2 || !(alpha.minCoeff() > 0.0) || !alpha.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "Dirichlet parameters must be positive with D >= 2");
  }
}

Vector to_vector(std::span<const double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = v[k];
  return out;
}

}  // namespace

double log_dirichlet_density(const Vector& alpha, const Vector& x) {
  require_positive(alpha);
  if (x.size() != alpha.size()) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  double out = boost::math::lgamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    out += (alpha(k) - 1.0) * std::log(x(k)) - boost::math::lgamma(alpha(k));
  }
  return out;
}

double dirichlet_density(const Vector& alpha, const Vector& x) { return std::exp(log_dirichlet_density(alpha, x)); }

Vector dirichlet_density_gradient(const Vector& alpha, const Vector& x) {
  const double f = dirichlet_density(alpha, x);
  return f * (alpha.array() - 1.0).cwiseQuotient(x.array()).matrix();
}

Vector dirichlet_sample(const Vector& alpha, Rng& rng) {
  require_positive(alpha);
  Vector g(alpha.size());
  do {
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
      std::gamma_distribution<double> gamma(alpha(k), 1.0);
      g(k) = gamma(rng);
    }
  } while (!(g.sum() > 0.0));
  return g / g.sum();
}

Vector dirichlet_mean(const Vector& alpha) {
  require_positive(alpha);
  return alpha / alpha.sum();
}

Matrix dirichlet_covariance(const Vector& alpha) {
  const Vector m = dirichlet_mean(alpha);
  return (Matrix(m.asDiagonal()) - m * m.transpose()) / (alpha.sum() + 1.0);
}

double beta_cdf(double alpha, double beta, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(alpha, beta, x);
}

double beta_quantile(double alpha, double beta, double u) { return boost::math::ibeta_inv(alpha, beta, u); }

double beta_density(double alpha, double beta, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) -
                  (boost::math::lgamma(alpha) + boost::math::lgamma(beta) - boost::math::lgamma(alpha + beta)));
}

double DirichletMixtureSpec::component_density(const Vector& x, int i) const {
  return dirichlet_density(components.at(static_cast<std::size_t>(i)), x);
}

double DirichletMixtureSpec::marginal_density(const Vector& x) const {
  return dirichlet_density(marginal_parameters(), x);
}

Vector DirichletMixtureSpec::marginal_mean() const { return dirichlet_mean(marginal_parameters()); }

Matrix DirichletMixtureSpec::marginal_covariance() const { return dirichlet_covariance(marginal_parameters()); }

EZZState DirichletMixtureSpec::sample(Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  int i = dim() - 1;
  for (int k = 0; k < dim(); ++k) {
    acc += weights(k);
    if (u < acc) {
      i = k;
      break;
    }
  }
  return {dirichlet_sample(components[static_cast<std::size_t>(i)], rng), i, 0.0};
}

DirichletMixtureSpec dirichlet_mixture(std::span<const double> theta, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "a must be positive");
  DirichletMixtureSpec spec;
  spec.theta = to_vector(theta);
  require_positive(spec.theta);
  spec.a = a;
  spec.weights = spec.theta / spec.theta.sum();
  for (int i = 0; i < spec.dim(); ++i) {
    Vector c = a * spec.theta;
    c(i) += 1.0;
    spec.components.push_back(std::move(c));
  }
  return spec;
}

double BetaMixtureSpec::component_density(double x, int i) const {
  return i == 0 ? beta_density(a * theta1 + 1.0, a * theta2, x) : beta_density(a * theta1, a * theta2 + 1.0, x);
}

double BetaMixtureSpec::marginal_density(double x) const {
  return w1 * component_density(x, 0) + w2 * component_density(x, 1);
}

double BetaMixtureSpec::marginal_cdf(double x) const {
  return w1 * beta_cdf(a * theta1 + 1.0, a * theta2, x) + w2 * beta_cdf(a * theta1, a * theta2 + 1.0, x);
}

BetaMixtureSpec beta_mixture_d2(double theta1, double theta2, double a) {
  if (!(theta1 > 0.0 && theta2 > 0.0 && a > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta and a must be positive");
  }
  const double total = theta1 + theta2;
  return {theta1, theta2, a, theta1 / total, theta2 / total};
}

PhiCandidate phi_complete_graph(std::span<const double> theta, double a) {
  auto spec = std::make_shared<DirichletMixtureSpec>(dirichlet_mixture(theta, a));
  PhiCandidate phi;
  phi.dim = spec->dim();
  phi.value = [spec](const Vector& x, int i) { return spec->component_density(x, i); };
  phi.gradient = [spec](const Vector& x, int i) {
    return dirichlet_density_gradient(spec->components[static_cast<std::size_t>(i)], x);
  };
  return phi;
}

double pde_residual(const PhiCandidate& phi, const GeneratorMatrix& q, double a, const Vector& nu, const Vector& x,
                    int i, double delta, double fd_step) {
  const int d = q.dim();
  if (phi.dim != d || x.size() != d || nu.size() != d) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  if (i < 0 || i >= d) throw Error(ErrorCode::InvalidArgument, "state out of range");
  if (x.minCoeff() < delta) throw Error(ErrorCode::BoundaryTooClose, "point closer than delta to the boundary");
  Vector grad(d);
  if (phi.gradient) {
    grad = phi.gradient(x, i);
  } else {
    for (int k = 0; k < d; ++k) {
      Vector up = x, down = x;
      up(k) += fd_step;
      down(k) -= fd_step;
      grad(k) = (phi.value(up, i) - phi.value(down, i)) / (2.0 * fd_step);
    }
  }
  double out = (d - 1) * phi.value(x, i) + x.dot(grad) - grad(i);
  for (int j = 0; j < d; ++j) out += nu(j) / nu(i) * a * q(j, i) * phi.value(x, j);
  return out;
}

std::vector<Vector> interior_points(int dim, std::size_t count, double delta) {
  if (dim < 2 || !(delta >= 0.0) || dim * delta >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "need dim >= 2 and dim * delta < 1");
  }
  const int s = dim - 1;
  // Generalised golden ratio: positive root of x^{s+1} = x + 1.
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (s + 1));
  std::vector<double> alpha(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) alpha[static_cast<std::size_t>(k)] = std::fmod(std::pow(1.0 / g, k + 1), 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  std::vector<double> u(static_cast<std::size_t>(s));
  for (std::size_t n = 1; n <= count; ++n) {
    for (int k = 0; k < s; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      u[ku] = std::fmod(0.5 + static_cast<double>(n) * alpha[ku], 1.0);
    }
    std::sort(u.begin(), u.end());
    Vector x(dim);
    double prev = 0.0;
    for (int k = 0; k < s; ++k) {
      x(k) = u[static_cast<std::size_t>(k)] - prev;
      prev = u[static_cast<std::size_t>(k)];
    }
    x(s) = 1.0 - prev;
    out.push_back(Vector::Constant(dim, delta) + (1.0 - dim * delta) * x);
  }
  return out;
}

TurnoverSpec turnover_standard(double theta1, double theta2, double p, double upsilon) {
  if (!(theta1 > 0.0 && theta2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  if (!(1.0 + upsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "need 1 + Upsilon > 0");
  TurnoverSpec t;
  t.theta1 = theta1;
  t.theta2 = theta2;
  t.nu1 = theta1 / (theta1 + theta2);
  t.variance = (2.0 / (theta1 + theta2) - p) / (1.0 + upsilon) * t.nu1 * (1.0 - t.nu1);
  t.variance_pm1 = 4.0 * *t.variance;
  return t;
}

TurnoverSpec turnover_nonstandard(double theta1, double theta2, double a) {
  TurnoverSpec t;
  t.mixture = beta_mixture_d2(theta1, theta2, a);
  t.theta1 = theta1;
  t.theta2 = theta2;
  t.nu1 = t.mixture->w1;
  return t;
}

Matrix density_table(const DirichletMixtureSpec& spec, int grid) {
  const int d = spec.dim();
  if (grid <= d) throw Error(ErrorCode::InvalidArgument, "grid must exceed the dimension");
  std::vector<Vector> points;
  std::vector<int> parts(static_cast<std::size_t>(d), 1);
  // Compositions of `grid` into d positive parts, in lexicographic order.
  std::function<void(int, int)> fill = [&](int k, int left) {
    if (k == d - 1) {
      parts[static_cast<std::size_t>(k)] = left;
      Vector x(d);
      for (int c = 0; c < d; ++c) x(c) = static_cast<double>(parts[static_cast<std::size_t>(c)]) / grid;
      points.push_back(std::move(x));
      return;
    }
    for (int v = 1; v <= left - (d - 1 - k); ++v) {
      parts[static_cast<std::size_t>(k)] = v;
      fill(k + 1, left - v);
    }
  };
  fill(0, grid);
  Matrix table(static_cast<Eigen::Index>(points.size()), 2 * d + 1);
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    const Vector& x = points[r];
    table.row(row).head(d) = x.transpose();
    for (int i = 0; i < d; ++i) table(row, d + i) = spec.component_density(x, i);
    table(row, 2 * d) = spec.marginal_density(x);
  }
  return table;
}

}  // namespace freezing
