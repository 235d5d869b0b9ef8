#include "doctest.h"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "freezing/error.hpp"
#include "freezing/markov_core.hpp"

using namespace freezing;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// Random generator with strictly positive off-diagonal rates and row sums <= 1.
Matrix random_rates(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix q = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double total = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      q(i, j) = u(rng);
      total += q(i, j);
    }
    q.row(i) /= total * 1.1;
    q(i, i) = -q.row(i).sum();
  }
  return q;
}

// Reachability closure by repeated boolean squaring.
std::vector<std::vector<bool>> reach(const Matrix& q) {
  const auto d = static_cast<std::size_t>(q.rows());
  std::vector<std::vector<bool>> r(d, std::vector<bool>(d, false));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) r[i][j] = i == j || q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0;
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
  return r;
}

}  // namespace

TEST_CASE("validate: complete graph is irreducible and matches brute-force reachability") {
  Matrix raw(3, 3);
  raw << -7, 2, 5, 1, -6, 5, 1, 2, -3;
  // Unscaled theta = (1,2,5) has diagonal below -1, so check structure on theta/8.
  const Matrix scaled = raw / 8.0;
  const auto q = GeneratorMatrix::validate(scaled);
  CHECK(q.irreducible());
  const auto r = reach(scaled);
  for (const auto& row : r)
    for (bool b : row) CHECK(b);
  CHECK(q.q().rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validate: indecomposable example with recurrent class {1,2}") {
  Matrix p(3, 3);
  p << 0, 1, 0, 1, 0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const auto q = GeneratorMatrix::validate(p - Matrix::Identity(3, 3));
  CHECK(q.connectivity().kind == Connectivity::Indecomposable);
  CHECK(q.connectivity().recurrent_states == std::vector<int>{0, 1});
  const auto nu = stationary_distribution(q).nu;
  CHECK(nu(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(nu(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(nu(2)) < 1e-12);
  CHECK(code_of([&] { poisson_solution(q, {nu}); }) == ErrorCode::NotIrreducible);
}

TEST_CASE("validate: error cases") {
  CHECK(code_of([] { GeneratorMatrix::validate(Matrix::Zero(2, 2)); }) == ErrorCode::Decomposable);
  Matrix neg(2, 2);
  neg << 0, -0.5, 0.5, 0;
  CHECK(code_of([&] { GeneratorMatrix::validate(neg); }) == ErrorCode::NegativeOffDiagonal);
  Matrix big(2, 2);
  big << 0, 1.5, 0.5, 0;
  CHECK(code_of([&] { GeneratorMatrix::validate(big); }) == ErrorCode::RowSumOutOfRange);
}

TEST_CASE("stationary distribution: closed forms and power iteration") {
  const std::array<double, 3> theta{1.0 / 8, 2.0 / 8, 5.0 / 8};
  const auto nu = stationary_distribution(complete_graph_generator(theta)).nu;
  CHECK(nu(0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(nu(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(nu(2) == doctest::Approx(0.625).epsilon(1e-12));

  const std::array<double, 2> sym{1.0, 1.0};
  const auto nu2 = stationary_distribution(complete_graph_generator(sym)).nu;
  CHECK(nu2(0) == doctest::Approx(0.5));

  Matrix raw(3, 3);
  raw << -0.4, 0.3, 0.1, 0.05, -0.65, 0.6, 0.4, 0.2, -0.6;
  const auto q = GeneratorMatrix::validate(raw);
  const Matrix kernel = Matrix::Identity(3, 3) + 0.5 * q.q();
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(3, 1.0 / 3);
  for (int k = 0; k < 5000; ++k) v = v * kernel;
  const auto law = stationary_distribution(q).nu;
  CHECK((law.transpose() - v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((law.transpose() * q.q()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("poisson solution: complete graph closed form, D=2 difference, random residuals") {
  const std::array<double, 3> theta{0.1, 0.3, 0.4};
  const auto q = complete_graph_generator(theta);
  const auto nu = stationary_distribution(q);
  const Matrix closed = complete_graph_poisson(theta);
  CHECK(poisson_residual(q, nu, closed) <= 1e-12);
  const auto raw = poisson_solution(q, nu, PoissonGauge::Raw);
  CHECK((raw.h - closed).cwiseAbs().maxCoeff() < 1e-10);

  const std::array<double, 2> t2{0.3, 0.6};
  const auto q2 = complete_graph_generator(t2);
  const auto h2 = poisson_solution(q2, stationary_distribution(q2)).h;
  CHECK(h2(0, 0) - h2(0, 1) == doctest::Approx(1.0 / 0.9).epsilon(1e-10));

  std::mt19937_64 rng(11);
  for (int d = 2; d <= 8; ++d) {
    const auto g = GeneratorMatrix::validate(random_rates(d, rng));
    const auto law = stationary_distribution(g);
    const auto sol = poisson_solution(g, law);
    CHECK(poisson_residual(g, law, sol.h) <= 1e-10);
    CHECK((sol.h * law.nu).cwiseAbs().maxCoeff() <= 1e-10);
    const auto alt = poisson_solution(g, law, PoissonGauge::Raw);
    const Matrix shift = alt.h - sol.h;
    for (int k = 0; k < d; ++k) CHECK((shift.row(k).array() - shift(k, 0)).abs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spectral gap: eigenvalue oracle, D=2 and scaling") {
  const std::array<double, 3> theta{1.0 / 8, 2.0 / 8, 5.0 / 8};
  const auto q = complete_graph_generator(theta);
  CHECK(spectral_gap(q) == doctest::Approx(1.0).epsilon(1e-10));
  const Eigen::VectorXcd ev = q.q().eigenvalues();
  double gap = 1e300;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev(k)) > 1e-9) gap = std::min(gap, -ev(k).real());
  CHECK(spectral_gap(q) == doctest::Approx(gap).epsilon(1e-10));

  const std::array<double, 2> t2{0.2, 0.7};
  CHECK(spectral_gap(complete_graph_generator(t2)) == doctest::Approx(0.9).epsilon(1e-10));
  CHECK(spectral_gap(q.scaled(0.5)) == doctest::Approx(0.5 * spectral_gap(q)).epsilon(1e-10));
  CHECK(kernel_spectral_gap(q) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("complete graph generator: entries and stochasticity check") {
  const std::array<double, 2> theta{1.0, 1.0};
  const auto q = complete_graph_generator(theta);
  CHECK(q(0, 0) == -1.0);
  CHECK(q(0, 1) == 1.0);
  CHECK(q(1, 0) == 1.0);
  const std::array<double, 3> unscaled{1.0, 2.0, 5.0};
  CHECK(code_of([&] { complete_graph_generator(unscaled); }) == ErrorCode::RowSumOutOfRange);
}
