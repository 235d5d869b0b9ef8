#include "doctest.h"

#include <array>
#include <cmath>

#include "freezing/error.hpp"
#include "freezing/limits_analytics.hpp"
#include "freezing/stats.hpp"

using namespace freezing;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

}  // namespace

TEST_CASE("dirichlet_mixture: components, weights and marginal moments") {
  const std::array<double, 3> theta{1.0, 2.0, 5.0};
  const auto mix = dirichlet_mixture(theta, 1.0);
  CHECK((mix.components[0] - vec({2, 2, 5})).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mix.components[1] - vec({1, 3, 5})).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mix.components[2] - vec({1, 2, 6})).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mix.weights - vec({0.125, 0.25, 0.625})).cwiseAbs().maxCoeff() < 1e-15);

  for (double a : {0.5, 3.0, 40.0}) {
    const auto m = dirichlet_mixture(theta, a);
    CHECK((m.marginal_mean() - vec({0.125, 0.25, 0.625})).cwiseAbs().maxCoeff() < 1e-14);
  }
  const std::array<double, 3> unit{0.125, 0.25, 0.625};
  const Vector nu = vec({0.125, 0.25, 0.625});
  const Matrix base = Matrix(nu.asDiagonal()) - nu * nu.transpose();
  const double a = 1000.0;
  const auto big = dirichlet_mixture(unit, a);
  CHECK((big.marginal_covariance() - base / (a + 1.0)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a * big.marginal_covariance() - base).cwiseAbs().maxCoeff() < 1e-2);

  // Sampler against the moment formulas.
  Rng rng(6);
  const auto small = dirichlet_mixture(unit, 2.0);
  Matrix draws(20'000, 3);
  for (Eigen::Index r = 0; r < draws.rows(); ++r) draws.row(r) = small.sample(rng).x.transpose();
  CHECK(moment_report(draws, small.marginal_mean(), small.marginal_covariance()).pass);
}

TEST_CASE("marginalization identity at interior points") {
  const std::array<double, 3> theta{0.125, 0.25, 0.625};
  for (double a : {1.0, 4.0, 60.0}) {
    const auto mix = dirichlet_mixture(theta, a);
    for (const auto& x : interior_points(3, 50, 1e-3)) {
      double mixed = 0.0;
      for (int i = 0; i < 3; ++i) mixed += mix.weights(i) * mix.component_density(x, i);
      CHECK(mixed == doctest::Approx(dirichlet_density(mix.marginal_parameters(), x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("beta_mixture_d2") {
  const auto u = beta_mixture_d2(1.0, 1.0, 1.0);
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(u.marginal_density(x) == doctest::Approx(1.0));
    CHECK(u.marginal_cdf(x) == doctest::Approx(x));
  }
  const auto w = beta_mixture_d2(1.0, 3.0, 2.0);
  CHECK(w.w1 == doctest::Approx(0.25));
  CHECK(w.w2 == doctest::Approx(0.75));
  const auto again = beta_mixture_d2(0.5, 0.5, 2.0);
  CHECK(again.marginal_density(0.3) == doctest::Approx(1.0));
  CHECK(again.component_density(0.3, 0) == doctest::Approx(u.component_density(0.3, 0)));

  const std::array<double, 2> theta{0.3, 0.7};
  const auto mix = dirichlet_mixture(theta, 2.5);
  const auto beta = beta_mixture_d2(0.3, 0.7, 2.5);
  for (double x : {0.05, 0.3, 0.77}) {
    const Vector p = vec({x, 1.0 - x});
    for (int i = 0; i < 2; ++i)
      CHECK(beta.component_density(x, i) == doctest::Approx(mix.component_density(p, i)).epsilon(1e-12));
  }
}

TEST_CASE("phi_complete_graph: closed form, symmetry and normalization") {
  const std::array<double, 2> ones{1.0, 1.0};
  const auto phi = phi_complete_graph(ones, 1.0);
  CHECK(phi.value(vec({0.3, 0.7}), 0) == doctest::Approx(0.6));

  const std::array<double, 3> sym{0.2, 0.2, 0.2};
  const auto phi3 = phi_complete_graph(sym, 2.0);
  const Vector x = vec({0.2, 0.5, 0.3});
  const Vector swapped = vec({0.5, 0.2, 0.3});
  CHECK(phi3.value(x, 0) == doctest::Approx(phi3.value(swapped, 1)));

  // Monte Carlo: sum_i nu_i E_U[phi(U, i)] / density_U with U uniform on the simplex.
  const std::array<double, 3> theta{0.125, 0.25, 0.625};
  const auto f = phi_complete_graph(theta, 8.0);
  const Vector nu = vec({0.125, 0.25, 0.625});
  const Vector ones3 = Vector::Ones(3);
  Rng rng(10);
  double total = 0.0;
  const int m = 200'000;
  for (int k = 0; k < m; ++k) {
    const Vector u = dirichlet_sample(ones3, rng);
    for (int i = 0; i < 3; ++i) total += nu(i) * f.value(u, i) / 2.0;
  }
  CHECK(total / m == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("pde_residual") {
  const std::array<double, 2> ones{1.0, 1.0};
  const auto q = complete_graph_generator(ones);
  const Vector nu = vec({0.5, 0.5});
  const auto phi = phi_complete_graph(ones, 1.0);
  CHECK(std::abs(pde_residual(phi, q, 1.0, nu, vec({0.3, 0.7}), 0)) < 1e-12);

  PhiCandidate scaled = phi;
  scaled.value = [&](const Vector& x, int i) { return 3.0 * phi.value(x, i); };
  scaled.gradient = [&](const Vector& x, int i) -> Vector { return 3.0 * phi.gradient(x, i); };
  const std::array<double, 3> theta{0.125, 0.25, 0.625};
  const auto q3 = complete_graph_generator(theta);
  const Vector nu3 = vec({0.125, 0.25, 0.625});
  const auto good = phi_complete_graph(theta, 2.0);
  PhiCandidate wrong;
  wrong.dim = 3;
  wrong.value = [&](const Vector& x, int) { return dirichlet_density(2.0 * nu3, x); };
  PhiCandidate no_grad = good;
  no_grad.gradient = nullptr;
  for (const auto& x : interior_points(3, 30, 0.05)) {
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(pde_residual(good, q3, 2.0, nu3, x, i)) < 1e-8);
      CHECK(std::abs(pde_residual(no_grad, q3, 2.0, nu3, x, i)) < 1e-4);
    }
  }
  const Vector generic = vec({0.2, 0.3, 0.5});
  CHECK(std::abs(pde_residual(wrong, q3, 2.0, nu3, generic, 0)) > 0.1);
  const Vector x2 = vec({0.4, 0.6});
  CHECK(pde_residual(scaled, q, 1.0, nu, x2, 1) == doctest::Approx(3.0 * pde_residual(phi, q, 1.0, nu, x2, 1)));
  try {
    pde_residual(good, q3, 2.0, nu3, vec({0.0005, 0.4995, 0.5}), 0);
    FAIL("expected BoundaryTooClose");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryTooClose);
  }
}

TEST_CASE("interior points are deterministic and respect the margin") {
  const auto a = interior_points(4, 100, 1e-3);
  const auto b = interior_points(4, 100, 1e-3);
  REQUIRE(a.size() == 100);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a[k].minCoeff() >= 1e-3);
    CHECK(a[k].sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("turnover specs") {
  const auto s = turnover_standard(0.5, 0.5, 0.0, -0.5);
  CHECK(*s.variance == doctest::Approx(1.0));
  CHECK(*s.variance_pm1 == doctest::Approx(4.0));
  for (double u : {-0.3, 0.0, 2.0}) CHECK(*turnover_standard(0.5, 0.5, 0.0, u).variance == doctest::Approx(1.0 / (2.0 * (1.0 + u))));
  const auto n = turnover_nonstandard(1.0, 3.0, 2.0);
  REQUIRE(n.mixture.has_value());
  CHECK(n.nu1 == doctest::Approx(0.25));
  CHECK(n.mixture->w1 == doctest::Approx(0.25));
}

TEST_CASE("density_table layout") {
  const std::array<double, 3> theta{0.125, 0.25, 0.625};
  const auto mix = dirichlet_mixture(theta, 8.0);
  const Matrix t = density_table(mix, 10);
  CHECK(t.cols() == 7);
  CHECK(t.rows() == 36);  // lattice points k/10 with all k_i >= 1
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    const Vector x = t.row(r).head(3).transpose();
    CHECK(x.sum() == doctest::Approx(1.0));
    CHECK(t(r, 3) == doctest::Approx(dirichlet_density(vec({2, 2, 5}), x)));
    CHECK(t(r, 6) == doctest::Approx(mix.marginal_density(x)));
  }
}
