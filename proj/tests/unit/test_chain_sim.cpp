#include "doctest.h"

#include <array>
#include <cmath>
#include <numeric>

#include "freezing/chain_sim.hpp"
#include "freezing/error.hpp"

using namespace freezing;

namespace {

const std::array<double, 2> kHalf{0.5, 0.5};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("transition_row: critical schedule and two-scale remainder") {
  const std::array<double, 2> ones{1.0, 1.0};
  const auto row = transition_row(complete_graph_generator(ones), FreezingSchedule::critical(1.0), 10, 0);
  CHECK(row(0) == doctest::Approx(0.9));
  CHECK(row(1) == doctest::Approx(0.1));

  // State 2 leaves only through the remainder: p_n r_n(2,1) = n^-1/2 n^-1/2.
  Matrix raw(2, 2);
  raw << -1, 1, 0, 0;
  const auto q = GeneratorMatrix::validate(raw);
  RemainderSpec r;
  r.A = 1.0;
  r.theta_r = 0.5;
  r.evaluator = [](std::int64_t n, int i, int j) {
    return i == 1 && j == 0 ? std::pow(static_cast<double>(n), -0.5) : 0.0;
  };
  const FreezingSchedule s(PowerLaw{1.0, 0.5}, r);
  const auto row2 = transition_row(q, s, 16, 1);
  CHECK(row2(0) == doctest::Approx(1.0 / 16));
  CHECK(row2(1) == doctest::Approx(15.0 / 16));

  const auto far = transition_row(complete_graph_generator(kHalf), FreezingSchedule::critical(1.0), 1'000'000'000, 1);
  CHECK(far(1) > 1.0 - 1e-9);
}

TEST_CASE("transition_row: invalid rows and minimal valid index") {
  const auto q = complete_graph_generator(kHalf);
  const FreezingSchedule s(ConstantPlus{1.0, 0.0, 1.0}, RemainderSpec{2.0, 1.0, [](std::int64_t n, int, int) {
                                                                  return -2.0 / static_cast<double>(n);
                                                                }});
  CHECK(code_of([&] { transition_row(q, s, 1, 0); }) == ErrorCode::InvalidRow);
  const auto n0 = minimal_valid_index(q, s);
  CHECK(n0 == 4);
  CHECK_NOTHROW(transition_row(q, s, n0, 0));
  ChainOptions opt;
  opt.steps = 50;
  opt.init = InitialLaw::uniform(2);
  CHECK(resolve_offset(q, s, opt) == n0 - 1);
  Rng rng(1);
  CHECK_NOTHROW(simulate_chain(q, s, opt, rng));
  opt.offset = 0;
  CHECK(code_of([&] { simulate_chain(q, s, opt, rng); }) == ErrorCode::InvalidRow);
}

TEST_CASE("simulate_chain: remainder exceeding its declared bound aborts") {
  const auto q = complete_graph_generator(kHalf);
  const FreezingSchedule s(PowerLaw{1.0, 0.5}, RemainderSpec{1.0, 1.0, [](std::int64_t n, int, int) {
                                                 return 0.1 * std::pow(static_cast<double>(n), -0.5);
                                               }});
  ChainOptions opt;
  opt.steps = 10'000;
  opt.init = InitialLaw::uniform(2);
  Rng rng(3);
  CHECK(code_of([&] { simulate_chain(q, s, opt, rng); }) == ErrorCode::RemainderBoundViolated);
}

TEST_CASE("empirical_update: counts and recursion") {
  auto s = ChainState::start(2, 1);
  CHECK(s.x()(0) == 0.0);
  CHECK(s.x()(1) == 1.0);

  ChainState t{4, 0, {3, 1}};
  t = empirical_update(t, 0);
  CHECK(t.n == 5);
  CHECK(t.x()(0) == doctest::Approx(0.8));
  CHECK(t.x()(1) == doctest::Approx(0.2));

  Rng rng(5);
  auto state = ChainState::start(3, 0);
  Vector rec = state.x();
  for (std::int64_t n = 1; n < 10'000; ++n) {
    const int next = static_cast<int>(rng() % 3);
    state = empirical_update(state, next);
    Vector e = Vector::Zero(3);
    e(next) = 1.0;
    const double g = 1.0 / static_cast<double>(n + 1);
    rec = (1.0 - g) * rec + g * e;
  }
  CHECK((rec - state.x()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::accumulate(state.counts.begin(), state.counts.end(), std::int64_t{0}) == state.n);
  CHECK(state.x().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fluctuation") {
  const auto s = FreezingSchedule::power_law(1.0, 0.5);
  Vector nu(2);
  nu << 0.5, 0.5;
  const ChainState state{10'000, 0, {5100, 4900}};
  const Vector y = fluctuation(state, nu, s);
  CHECK(y(0) == doctest::Approx(0.1));
  CHECK(y(1) == doctest::Approx(-0.1));
  const ChainState mirror{10'000, 1, {4900, 5100}};
  CHECK((fluctuation(mirror, nu, s) + y).cwiseAbs().maxCoeff() < 1e-12);
  const ChainState at_nu{10'000, 0, {5000, 5000}};
  CHECK(fluctuation(at_nu, nu, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("homogeneous reduction: p = 1 gives the kernel Id + q") {
  const std::array<double, 2> theta{0.2, 0.3};
  const auto q = complete_graph_generator(theta);
  ChainOptions opt;
  opt.steps = 1'000'000;
  opt.init = InitialLaw::fixed(2, 0);
  Rng rng(17);
  const auto run = simulate_chain(q, FreezingSchedule::constant(1.0), opt, rng);
  // Kernel eigenvalue 1 - |theta| = 0.5, so N_eff = N (1 - 0.5) / (1 + 0.5).
  const double nu1 = 0.4;
  const double n_eff = static_cast<double>(opt.steps) / 3.0;
  CHECK(std::abs(run.final.x()(0) - nu1) <= 4.0 * std::sqrt(nu1 * (1 - nu1) / n_eff));
}

TEST_CASE("frozen schedule: chains stop moving") {
  EnsembleConfig cfg;
  cfg.options.steps = 100'000;
  cfg.options.init = InitialLaw::uniform(3);
  cfg.replicates = 200;
  cfg.master_seed = 99;
  const std::array<double, 3> theta{0.125, 0.25, 0.625};
  const auto ens = run_ensemble(complete_graph_generator(theta), FreezingSchedule::power_law(1.0, 1.5), cfg);
  int quiet = 0;
  for (const auto& r : ens.runs) quiet += r.last_jump <= 10'000 ? 1 : 0;
  CHECK(quiet >= 180);
}

TEST_CASE("run_ensemble: determinism, thread independence and symmetric mean") {
  const auto q = complete_graph_generator(kHalf);
  EnsembleConfig cfg;
  cfg.options.steps = 100'000;
  cfg.options.init = InitialLaw::uniform(2);
  cfg.options.checkpoints = log_checkpoints(100, 100'000);
  cfg.replicates = 1000;
  cfg.master_seed = 2024;
  cfg.threads = 1;
  const auto a = run_ensemble(q, FreezingSchedule::critical(1.0), cfg);
  cfg.threads = 3;
  const auto b = run_ensemble(q, FreezingSchedule::critical(1.0), cfg);
  bool same = true;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    same = same && a.runs[r].final.counts == b.runs[r].final.counts && a.runs[r].final.i == b.runs[r].final.i;
    const double v = a.runs[r].final.x()(0);
    sum += v;
    sum2 += v * v;
  }
  CHECK(same);
  const double m = static_cast<double>(cfg.replicates);
  const double mean = sum / m;
  const double se = std::sqrt((sum2 / m - mean * mean) / m);
  CHECK(std::abs(mean - 0.5) <= 3.0 * se);

  const auto& cps = cfg.options.checkpoints;
  CHECK(cps.front() == 100);
  CHECK(cps.back() == 100'000);
  for (std::size_t k = 1; k < cps.size(); ++k) CHECK(cps[k] > cps[k - 1]);
  CHECK(a.runs[0].snapshots.size() == cps.size());

  // Replicate r depends only on derive_seed(master, r).
  ChainOptions one = cfg.options;
  Rng rng(derive_seed(cfg.master_seed, 7));
  const auto solo = simulate_chain(q, FreezingSchedule::critical(1.0), one, rng);
  CHECK(solo.final.counts == a.runs[7].final.counts);
}

TEST_CASE("weighted means with unit weights reproduce x_n") {
  ChainOptions opt;
  opt.steps = 5000;
  opt.init = InitialLaw::uniform(2);
  opt.weights = [](std::int64_t) { return 1.0; };
  Rng rng(8);
  const auto run = simulate_chain(complete_graph_generator(kHalf), FreezingSchedule::power_law(1.0, 0.5), opt, rng);
  REQUIRE(run.weighted_x.has_value());
  CHECK((*run.weighted_x - run.final.x()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("interpolation on harmonic times") {
  ChainOptions opt;
  opt.steps = 200;
  opt.init = InitialLaw::uniform(2);
  opt.record_states = true;
  Rng rng(4);
  const auto run = simulate_chain(complete_graph_generator(kHalf), FreezingSchedule::critical(1.0), opt, rng);
  const auto path = interpolate(2, run.states);
  CHECK(path.tau(1) == 1.0);
  CHECK(code_of([&] { path.at(0.5); }) == ErrorCode::OutOfRange);
  CHECK(path.at(path.tau(3)).n == 3);
  double h100 = 0.0;
  for (int k = 1; k <= 100; ++k) h100 += 1.0 / k;
  const auto p = path.at(h100 + 1e-9);
  CHECK(p.n == 100);
  CHECK(p.i == run.states[99]);
  for (std::int64_t n = 1; n <= path.size(); ++n) CHECK(path.index_at(path.tau(n)) == n);
  CHECK(code_of([&] { path.at(path.tau(200) + 1.0); }) == ErrorCode::OutOfRange);
  Vector x = Vector::Zero(2);
  for (int k = 0; k < 100; ++k) x(run.states[static_cast<std::size_t>(k)]) += 0.01;
  CHECK((p.x - x).cwiseAbs().maxCoeff() < 1e-12);
}
