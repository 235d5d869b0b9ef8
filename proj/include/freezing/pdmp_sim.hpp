#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "freezing/markov_core.hpp"
#include "freezing/random.hpp"

namespace freezing {

/// Point (x, i) of the exponential zig-zag process at time t.
struct EZZState {
  Vector x;
  int i = 0;
  double t = 0.0;
};

/// Deterministic part: e_i + (x - e_i) e^{-dt}.
Vector flow(const Vector& x, int i, double dt);

/// Event record of one trajectory on [0, horizon]. Continuous values between
/// epochs are recovered from the closed-form flow.
struct EZZPath {
  double a = 1.0;
  double horizon = 0.0;
  EZZState initial;
  std::vector<double> epochs;
  std::vector<int> states;        // discrete state right after each epoch
  std::vector<Vector> x_at_epoch;  // continuous part at each epoch
  /// Set when the path reached a state with zero exit rate.
  bool absorbed = false;

  int dim() const { return static_cast<int>(initial.x.size()); }
  std::size_t jumps() const { return epochs.size(); }
};

/// Exact simulation: holding time Exp(a |q(i,i)|), target j with probability
/// q(i,j) / |q(i,i)|, flow in between.
EZZPath simulate_ezz(const GeneratorMatrix& q, double a, const EZZState& initial, double horizon, Rng& rng);

/// State at time t in [0, horizon].
EZZState sample_at(const EZZPath& path, double t);

/// Y_t = sqrt(a) (X_t - nu) along a stored path.
class RescaledPath {
 public:
  RescaledPath(const EZZPath& path, Vector nu, double a);
  Vector at(double t) const;

 private:
  const EZZPath* path_;
  Vector nu_;
  double scale_;
};

RescaledPath rescale_path(const EZZPath& path, const Vector& nu, double a);

/// Distances between two coupled copies on a time grid.
struct CouplingRecord {
  std::vector<double> times;
  std::vector<double> l1;        // |X_t - X~_t|_1
  std::vector<char> differ;      // 1 when I_t != I~_t
  double merge_time = std::numeric_limits<double>::infinity();
};

/// Independent copies until the discrete parts first agree (checked at every
/// epoch of either copy), common jumps afterwards. `grid` must be sorted.
CouplingRecord coupled_ezz_general(const GeneratorMatrix& q, double a, const EZZState& init1,
                                   const EZZState& init2, std::span<const double> grid, Rng& rng);

/// Two-state complete-graph coupling with jump rates a theta_2 out of state 0
/// and a theta_1 out of state 1. No constraint on theta beyond positivity.
CouplingRecord coupled_ezz_d2(double theta1, double theta2, double a, const EZZState& init1,
                              const EZZState& init2, std::span<const double> grid, Rng& rng);

using EZZInitSampler = std::function<EZZState(Rng&)>;

/// Marginal (X_t, I_t) over M replicates seeded with derive_seed(seed, r).
std::vector<EZZState> ezz_marginals(const GeneratorMatrix& q, double a, const EZZInitSampler& init, double t,
                                    std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

}  // namespace freezing
