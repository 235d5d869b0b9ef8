#include "freezing/pdmp_sim.hpp"

#include <algorithm>
#include <cmath>

#include "freezing/error.hpp"

namespace freezing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Off-diagonal jump intensities of the discrete component.
struct JumpRates {
  Matrix rate;
  Vector exit;

  explicit JumpRates(Matrix r) : rate(std::move(r)), exit(rate.rows()) {
    for (Eigen::Index i = 0; i < rate.rows(); ++i) {
      rate(i, i) = 0.0;
      exit(i) = rate.row(i).sum();
    }
  }

  int dim() const { return static_cast<int>(rate.rows()); }

  double holding(int i, Rng& rng) const { return exit(i) > 0.0 ? exponential(rng, exit(i)) : kInf; }

  int target(int i, Rng& rng) const {
    const double u = uniform01(rng) * exit(i);
    double acc = 0.0;
    int last = i;
    for (int j = 0; j < dim(); ++j) {
      if (j == i || rate(i, j) <= 0.0) continue;
      acc += rate(i, j);
      last = j;
      if (u < acc) return j;
    }
    return last;
  }
};

JumpRates rates_from(const GeneratorMatrix& q, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "jump-rate parameter a must be positive");
  return JumpRates(q.q() * a);
}

void check_state(const EZZState& s, int dim) {
  if (s.x.size() != dim) throw Error(ErrorCode::InvalidArgument, "initial x has wrong dimension");
  if (s.i < 0 || s.i >= dim) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
  if (std::abs(s.x.sum() - 1.0) > 1e-12 || s.x.minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "initial x must lie on the simplex");
  }
}

CouplingRecord run_coupling(const JumpRates& rates, const EZZState& init1, const EZZState& init2,
                            std::span<const double> grid, Rng& rng) {
  check_state(init1, rates.dim());
  check_state(init2, rates.dim());
  if (!std::is_sorted(grid.begin(), grid.end()) || (!grid.empty() && grid.front() < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time grid must be sorted and non-negative");
  }
  CouplingRecord rec;
  rec.times.assign(grid.begin(), grid.end());
  rec.l1.reserve(grid.size());
  rec.differ.reserve(grid.size());

  Vector x1 = init1.x, x2 = init2.x;
  int i1 = init1.i, i2 = init2.i;
  double t = 0.0;
  bool merged = i1 == i2;
  if (merged) rec.merge_time = 0.0;
  std::size_t g = 0;

  while (g < grid.size()) {
    double tau1, tau2 = kInf;
    if (merged) {
      tau1 = rates.holding(i1, rng);
    } else {
      tau1 = rates.holding(i1, rng);
      tau2 = rates.holding(i2, rng);
    }
    const double t_next = t + std::min(tau1, tau2);
    for (; g < grid.size() && grid[g] < t_next; ++g) {
      const double dt = grid[g] - t;
      rec.l1.push_back((flow(x1, i1, dt) - flow(x2, i2, dt)).lpNorm<1>());
      rec.differ.push_back(i1 != i2 ? 1 : 0);
    }
    if (g == grid.size()) break;
    x1 = flow(x1, i1, t_next - t);
    x2 = flow(x2, i2, t_next - t);
    t = t_next;
    if (merged) {
      i1 = i2 = rates.target(i1, rng);
    } else {
      if (tau1 <= tau2) {
        i1 = rates.target(i1, rng);
      } else {
        i2 = rates.target(i2, rng);
      }
      if (i1 == i2) {
        merged = true;
        rec.merge_time = t;
      }
    }
  }
  return rec;
}

}  // namespace

Vector flow(const Vector& x, int i, double dt) {
  if (dt < 0.0) throw Error(ErrorCode::InvalidArgument, "flow needs dt >= 0");
  const double decay = std::exp(-dt);
  Vector y = x * decay;
  y(i) += 1.0 - decay;
  return y;
}

EZZPath simulate_ezz(const GeneratorMatrix& q, double a, const EZZState& initial, double horizon, Rng& rng) {
  const auto rates = rates_from(q, a);
  check_state(initial, q.dim());
  if (!(horizon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
  EZZPath path;
  path.a = a;
  path.horizon = horizon;
  path.initial = initial;
  path.initial.t = 0.0;
  Vector x = initial.x;
  int i = initial.i;
  double t = 0.0;
  while (true) {
    if (rates.exit(i) <= 0.0) {
      path.absorbed = true;
      break;
    }
    const double t_next = t + rates.holding(i, rng);
    if (t_next > horizon) break;
    x = flow(x, i, t_next - t);
    i = rates.target(i, rng);
    t = t_next;
    path.epochs.push_back(t);
    path.states.push_back(i);
    path.x_at_epoch.push_back(x);
  }
  return path;
}

EZZState sample_at(const EZZPath& path, double t) {
  if (t < 0.0 || t > path.horizon) throw Error(ErrorCode::OutOfRange, "t outside [0, horizon]");
  const auto it = std::upper_bound(path.epochs.begin(), path.epochs.end(), t);
  const auto k = it - path.epochs.begin();
  if (k == 0) return {flow(path.initial.x, path.initial.i, t), path.initial.i, t};
  const auto e = static_cast<std::size_t>(k - 1);
  return {flow(path.x_at_epoch[e], path.states[e], t - path.epochs[e]), path.states[e], t};
}

RescaledPath::RescaledPath(const EZZPath& path, Vector nu, double a)
    : path_(&path), nu_(std::move(nu)), scale_(std::sqrt(a)) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "a must be positive");
  if (nu_.size() != path.dim()) throw Error(ErrorCode::InvalidArgument, "nu has wrong dimension");
}

Vector RescaledPath::at(double t) const { return scale_ * (sample_at(*path_, t).x - nu_); }

RescaledPath rescale_path(const EZZPath& path, const Vector& nu, double a) { return RescaledPath(path, nu, a); }

CouplingRecord coupled_ezz_general(const GeneratorMatrix& q, double a, const EZZState& init1,
                                   const EZZState& init2, std::span<const double> grid, Rng& rng) {
  return run_coupling(rates_from(q, a), init1, init2, grid, rng);
}

CouplingRecord coupled_ezz_d2(double theta1, double theta2, double a, const EZZState& init1,
                              const EZZState& init2, std::span<const double> grid, Rng& rng) {
  if (!(theta1 > 0.0 && theta2 > 0.0 && a > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta and a must be positive");
  }
  Matrix r = Matrix::Zero(2, 2);
  r(0, 1) = a * theta2;
  r(1, 0) = a * theta1;
  return run_coupling(JumpRates(r), init1, init2, grid, rng);
}

std::vector<EZZState> ezz_marginals(const GeneratorMatrix& q, double a, const EZZInitSampler& init, double t,
                                    std::size_t replicates, std::uint64_t seed, unsigned threads) {
  std::vector<EZZState> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const auto path = simulate_ezz(q, a, init(rng), t, rng);
    out[r] = sample_at(path, t);
  });
  return out;
}

}  // namespace freezing
