#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "freezing/markov_core.hpp"
#include "freezing/random.hpp"
#include "freezing/schedules.hpp"

namespace freezing {

/// State of the chain after n steps: current state, visit counts and the
/// derived empirical measure x_n = counts / n. States are 0-based.
struct ChainState {
  std::int64_t n = 0;
  int i = 0;
  std::vector<std::int64_t> counts;

  static ChainState start(int dim, int first_state);
  Vector x() const;
};

/// Streaming update: one more visit to next_i. Counts are integers, so x_n has
/// no accumulated rounding error however long the run.
ChainState empirical_update(ChainState state, int next_i);

/// y_n = sqrt(n p_n) (x_n - nu), with p_n read at schedule index n + offset.
Vector fluctuation(const ChainState& state, const Vector& nu, const FreezingSchedule& s,
                   std::int64_t offset = 0);

/// Row i of the kernel at schedule index n: entry j != i is
/// p_n (q(i,j) + r_n(i,j)) and the diagonal completes the row to 1. Throws
/// InvalidRow when an entry leaves [0, 1].
Vector transition_row(const GeneratorMatrix& q, const FreezingSchedule& s, std::int64_t n, int i);

/// Smallest schedule index n >= n_min at which every row is a probability
/// vector, scanning up to `scan_limit`.
std::int64_t minimal_valid_index(const GeneratorMatrix& q, const FreezingSchedule& s,
                                 std::int64_t scan_limit = 1'000'000);

/// Probability vector over states used to draw i_1.
struct InitialLaw {
  std::vector<double> weights;

  static InitialLaw uniform(int dim);
  static InitialLaw fixed(int dim, int state);
  static InitialLaw from(const Vector& law);
  int sample(Rng& rng) const;
};

/// n values 10^(k/per_decade) rounded, restricted to [first, last], always
/// ending with last.
std::vector<std::int64_t> log_checkpoints(std::int64_t first, std::int64_t last, int per_decade = 10);

struct ChainOptions {
  std::int64_t steps = 1000;
  InitialLaw init;
  /// Transitions at step n use schedule index n + offset. Unset means the
  /// smallest offset making every row valid.
  std::optional<std::int64_t> offset;
  /// Sorted chain indices at which snapshots are kept.
  std::vector<std::int64_t> checkpoints;
  /// Keep the whole trajectory i_1..i_N (needed for interpolation).
  bool record_states = false;
  /// Optional weights omega_n for the weighted empirical mean.
  std::function<double(std::int64_t)> weights;
};

struct Snapshot {
  std::int64_t n = 0;
  int i = 0;
  std::vector<std::int64_t> counts;

  Vector x() const;
};

struct ChainRun {
  ChainState final;
  std::int64_t offset = 0;
  std::vector<Snapshot> snapshots;
  std::vector<int> states;
  /// Chain index n of the last step at which i_n != i_{n-1}; 1 if none.
  std::int64_t last_jump = 1;
  /// sum omega_k e_{i_k} / sum omega_k when weights were requested.
  std::optional<Vector> weighted_x;
};

/// Resolves the offset of `options` against q and s.
std::int64_t resolve_offset(const GeneratorMatrix& q, const FreezingSchedule& s,
                            const ChainOptions& options);

/// Exact simulation of N steps with inverse-CDF sampling of every transition.
ChainRun simulate_chain(const GeneratorMatrix& q, const FreezingSchedule& s,
                        const ChainOptions& options, Rng& rng);

struct PathPoint {
  std::int64_t n;
  int i;
  Vector x;
};

/// Piecewise-constant interpolation X_t = x_{m(t)}, I_t = i_{m(t)} with
/// breakpoints tau_n = sum_{k<=n} 1/k and m(t) = sup{k : tau_k <= t}.
class InterpolatedPath {
 public:
  InterpolatedPath(int dim, std::span<const int> states);

  std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
  double tau(std::int64_t n) const { return tau_[static_cast<std::size_t>(n)]; }
  /// m(t); 0 when t < tau_1.
  std::int64_t index_at(double t) const;
  /// Value at time t, defined for tau_1 <= t <= tau_N.
  PathPoint at(double t) const;
  PathPoint point(std::int64_t n) const;

 private:
  int dim_;
  std::vector<int> states_;
  std::vector<double> tau_;                 // tau_[0] = 0
  std::vector<std::int64_t> prefix_counts_;  // row n-1 holds counts after n steps
};

InterpolatedPath interpolate(int dim, std::span<const int> states);

struct EnsembleConfig {
  ChainOptions options;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
};

/// M independent replicates seeded with derive_seed(master_seed, r). Results
/// are stored by replicate index and do not depend on the thread count.
struct ChainEnsemble {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<ChainRun> runs;
};

ChainEnsemble run_ensemble(const GeneratorMatrix& q, const FreezingSchedule& s,
                           const EnsembleConfig& config);

}  // namespace freezing
