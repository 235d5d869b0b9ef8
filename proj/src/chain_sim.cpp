#include "freezing/chain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "freezing/error.hpp"

namespace freezing {

namespace {

constexpr double kRowTol = 1e-12;

Vector counts_to_x(const std::vector<std::int64_t>& counts, std::int64_t n) {
  Vector x(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    x(static_cast<Eigen::Index>(k)) = static_cast<double>(counts[k]) / static_cast<double>(n);
  }
  return x;
}

// Off-diagonal cumulative rates of one state, used for inverse-CDF sampling of
// the jump target once a jump has been decided.
struct JumpTable {
  double exit_rate = 0.0;
  std::vector<double> cumulative;
  std::vector<int> targets;
};

std::vector<JumpTable> build_jump_tables(const GeneratorMatrix& q) {
  std::vector<JumpTable> tables(static_cast<std::size_t>(q.dim()));
  for (int i = 0; i < q.dim(); ++i) {
    auto& t = tables[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int j = 0; j < q.dim(); ++j) {
      if (j == i || q(i, j) <= 0.0) continue;
      acc += q(i, j);
      t.cumulative.push_back(acc);
      t.targets.push_back(j);
    }
    t.exit_rate = acc;
  }
  return tables;
}

void verify_remainder_bound(const GeneratorMatrix& q, const FreezingSchedule& s, std::int64_t first,
                            std::int64_t last) {
  const auto& r = s.remainder();
  if (r.is_zero()) return;
  std::vector<std::int64_t> sample;
  for (std::int64_t n = std::max<std::int64_t>(first, 1); n <= last; n *= 2) sample.push_back(n);
  sample.push_back(last);
  for (auto n : sample) {
    const double bound = r.bound(n) * (1.0 + 1e-12);
    for (int i = 0; i < q.dim(); ++i) {
      for (int j = 0; j < q.dim(); ++j) {
        if (i != j && std::abs(r(n, i, j)) > bound) {
          throw Error(ErrorCode::RemainderBoundViolated,
                      "|r_" + std::to_string(n) + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ")| exceeds the declared bound A n^-theta_r");
        }
      }
    }
  }
}

std::vector<double> schedule_table(const FreezingSchedule& s, std::int64_t steps, std::int64_t offset) {
  std::vector<double> table(static_cast<std::size_t>(std::max<std::int64_t>(steps - 1, 0)));
  for (std::int64_t n = 1; n < steps; ++n) table[static_cast<std::size_t>(n - 1)] = s.p(n + offset);
  return table;
}

ChainRun simulate_with_table(const GeneratorMatrix& q, const FreezingSchedule& s, const ChainOptions& options,
                             std::int64_t offset, std::span<const double> table, Rng& rng) {
  const int d = q.dim();
  const std::int64_t steps = options.steps;
  ChainRun run;
  run.offset = offset;
  int i = options.init.sample(rng);
  run.final = ChainState::start(d, i);
  auto& counts = run.final.counts;
  if (options.record_states) {
    run.states.reserve(static_cast<std::size_t>(steps));
    run.states.push_back(i);
  }

  const bool weighted = static_cast<bool>(options.weights);
  double weight_total = 0.0;
  Vector weighted_sum = Vector::Zero(d);
  if (weighted) {
    const double w = options.weights(1);
    weight_total = w;
    weighted_sum(i) += w;
  }

  auto next_checkpoint = options.checkpoints.begin();
  while (next_checkpoint != options.checkpoints.end() && *next_checkpoint < 1) ++next_checkpoint;
  auto take_snapshot = [&](std::int64_t n) {
    while (next_checkpoint != options.checkpoints.end() && *next_checkpoint == n) {
      run.snapshots.push_back({n, i, counts});
      ++next_checkpoint;
    }
  };
  take_snapshot(1);

  const bool fast = s.remainder().is_zero();
  const auto tables = build_jump_tables(q);
  Vector row(d);

  for (std::int64_t n = 1; n < steps; ++n) {
    int next = i;
    const double u = uniform01(rng);
    if (fast) {
      const double p = table[static_cast<std::size_t>(n - 1)];
      const auto& jt = tables[static_cast<std::size_t>(i)];
      if (u < p * jt.exit_rate) {
        const double v = u / p;
        const auto it = std::upper_bound(jt.cumulative.begin(), jt.cumulative.end(), v);
        const auto k = std::min<std::ptrdiff_t>(it - jt.cumulative.begin(),
                                                static_cast<std::ptrdiff_t>(jt.cumulative.size()) - 1);
        next = jt.targets[static_cast<std::size_t>(k)];
      }
    } else {
      row = transition_row(q, s, n + offset, i);
      double acc = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        acc += row(j);
        if (u < acc) {
          next = j;
          break;
        }
      }
    }
    if (next != i) run.last_jump = n + 1;
    i = next;
    ++counts[static_cast<std::size_t>(i)];
    if (options.record_states) run.states.push_back(i);
    if (weighted) {
      const double w = options.weights(n + 1);
      weight_total += w;
      weighted_sum(i) += w;
    }
    take_snapshot(n + 1);
  }
  run.final.n = steps;
  run.final.i = i;
  if (weighted) run.weighted_x = weighted_sum / weight_total;
  return run;
}

}  // namespace

ChainState ChainState::start(int dim, int first_state) {
  if (first_state < 0 || first_state >= dim) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
  ChainState s;
  s.n = 1;
  s.i = first_state;
  s.counts.assign(static_cast<std::size_t>(dim), 0);
  s.counts[static_cast<std::size_t>(first_state)] = 1;
  return s;
}

Vector ChainState::x() const { return counts_to_x(counts, n); }

Vector Snapshot::x() const { return counts_to_x(counts, n); }

ChainState empirical_update(ChainState state, int next_i) {
  if (next_i < 0 || next_i >= static_cast<int>(state.counts.size())) {
    throw Error(ErrorCode::InvalidArgument, "state out of range");
  }
  ++state.n;
  state.i = next_i;
  ++state.counts[static_cast<std::size_t>(next_i)];
  return state;
}

Vector fluctuation(const ChainState& state, const Vector& nu, const FreezingSchedule& s, std::int64_t offset) {
  const double alpha = std::sqrt(static_cast<double>(state.n) * s.p(state.n + offset));
  return alpha * (state.x() - nu);
}

Vector transition_row(const GeneratorMatrix& q, const FreezingSchedule& s, std::int64_t n, int i) {
  const int d = q.dim();
  if (i < 0 || i >= d) throw Error(ErrorCode::InvalidArgument, "state out of range");
  const double p = s.p(n);
  const auto& r = s.remainder();
  Vector row(d);
  double off = 0.0;
  for (int j = 0; j < d; ++j) {
    if (j == i) continue;
    row(j) = p * (q(i, j) + r(n, i, j));
    off += row(j);
  }
  row(i) = 1.0 - off;
  for (int j = 0; j < d; ++j) {
    if (row(j) < -kRowTol || row(j) > 1.0 + kRowTol) {
      std::string hint;
      try {
        hint = "; first valid index is " + std::to_string(minimal_valid_index(q, s, std::max<std::int64_t>(n, 1) * 1000));
      } catch (const Error&) {
      }
      throw Error(ErrorCode::InvalidRow, "row " + std::to_string(i + 1) + " at n = " + std::to_string(n) +
                                             " is not a probability vector" + hint);
    }
  }
  for (int j = 0; j < d; ++j) row(j) = std::clamp(row(j), 0.0, 1.0);
  return row;
}

std::int64_t minimal_valid_index(const GeneratorMatrix& q, const FreezingSchedule& s, std::int64_t scan_limit) {
  const auto& r = s.remainder();
  const auto last = std::min(scan_limit, s.n_max());
  for (std::int64_t n = s.n_min(); n <= last; ++n) {
    const double p = s.p(n);
    bool ok = true;
    for (int i = 0; i < q.dim() && ok; ++i) {
      double off = 0.0;
      for (int j = 0; j < q.dim(); ++j) {
        if (j == i) continue;
        const double e = p * (q(i, j) + r(n, i, j));
        if (e < -kRowTol) ok = false;
        off += e;
      }
      if (off > 1.0 + kRowTol) ok = false;
    }
    if (ok) return n;
  }
  throw Error(ErrorCode::InvalidRow, "no valid index found up to n = " + std::to_string(last));
}

InitialLaw InitialLaw::uniform(int dim) { return {std::vector<double>(static_cast<std::size_t>(dim), 1.0 / dim)}; }

InitialLaw InitialLaw::fixed(int dim, int state) {
  if (state < 0 || state >= dim) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
  InitialLaw law{std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
  law.weights[static_cast<std::size_t>(state)] = 1.0;
  return law;
}

InitialLaw InitialLaw::from(const Vector& law) { return {std::vector<double>(law.data(), law.data() + law.size())}; }

int InitialLaw::sample(Rng& rng) const {
  if (weights.empty()) throw Error(ErrorCode::InvalidArgument, "empty initial law");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return static_cast<int>(k);
  }
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return static_cast<int>(k);
  }
  return 0;
}

std::vector<std::int64_t> log_checkpoints(std::int64_t first, std::int64_t last, int per_decade) {
  if (first < 1 || last < first || per_decade < 1) throw Error(ErrorCode::InvalidArgument, "bad checkpoint range");
  std::vector<std::int64_t> out;
  const int k0 = static_cast<int>(std::floor(std::log10(static_cast<double>(first)) * per_decade));
  for (int k = k0;; ++k) {
    const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, static_cast<double>(k) / per_decade)));
    if (n > last) break;
    if (n >= first && (out.empty() || out.back() != n)) out.push_back(n);
  }
  if (out.empty() || out.back() != last) out.push_back(last);
  return out;
}

std::int64_t resolve_offset(const GeneratorMatrix& q, const FreezingSchedule& s, const ChainOptions& options) {
  if (options.offset) {
    if (*options.offset < 0) throw Error(ErrorCode::InvalidArgument, "offset must be >= 0");
    return *options.offset;
  }
  return minimal_valid_index(q, s) - 1;
}

ChainRun simulate_chain(const GeneratorMatrix& q, const FreezingSchedule& s, const ChainOptions& options, Rng& rng) {
  if (options.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (static_cast<int>(options.init.weights.size()) != q.dim()) {
    throw Error(ErrorCode::InvalidArgument, "initial law dimension mismatch");
  }
  const auto offset = resolve_offset(q, s, options);
  verify_remainder_bound(q, s, 1 + offset, options.steps + offset);
  const auto table = s.remainder().is_zero() ? schedule_table(s, options.steps, offset) : std::vector<double>{};
  return simulate_with_table(q, s, options, offset, table, rng);
}

InterpolatedPath::InterpolatedPath(int dim, std::span<const int> states)
    : dim_(dim), states_(states.begin(), states.end()) {
  if (states_.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  tau_.resize(states_.size() + 1);
  tau_[0] = 0.0;
  prefix_counts_.assign(states_.size() * static_cast<std::size_t>(dim), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(dim), 0);
  for (std::size_t n = 1; n <= states_.size(); ++n) {
    tau_[n] = tau_[n - 1] + 1.0 / static_cast<double>(n);
    const int s = states_[n - 1];
    if (s < 0 || s >= dim) throw Error(ErrorCode::InvalidArgument, "state out of range");
    ++counts[static_cast<std::size_t>(s)];
    std::copy(counts.begin(), counts.end(), prefix_counts_.begin() + static_cast<std::ptrdiff_t>((n - 1) * dim));
  }
}

std::int64_t InterpolatedPath::index_at(double t) const {
  const auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
  return static_cast<std::int64_t>(it - tau_.begin()) - 1;
}

PathPoint InterpolatedPath::point(std::int64_t n) const {
  if (n < 1 || n > size()) throw Error(ErrorCode::OutOfRange, "index outside the recorded trajectory");
  Vector x(dim_);
  const auto base = static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(dim_);
  for (int k = 0; k < dim_; ++k) {
    x(k) = static_cast<double>(prefix_counts_[base + static_cast<std::size_t>(k)]) / static_cast<double>(n);
  }
  return {n, states_[static_cast<std::size_t>(n - 1)], std::move(x)};
}

PathPoint InterpolatedPath::at(double t) const {
  if (t < tau_[1]) throw Error(ErrorCode::OutOfRange, "interpolated path is defined from tau_1 = 1");
  if (t > tau_.back()) throw Error(ErrorCode::OutOfRange, "t beyond tau_N");
  return point(index_at(t));
}

InterpolatedPath interpolate(int dim, std::span<const int> states) { return InterpolatedPath(dim, states); }

ChainEnsemble run_ensemble(const GeneratorMatrix& q, const FreezingSchedule& s, const EnsembleConfig& config) {
  const auto& options = config.options;
  if (options.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (static_cast<int>(options.init.weights.size()) != q.dim()) {
    throw Error(ErrorCode::InvalidArgument, "initial law dimension mismatch");
  }
  const auto offset = resolve_offset(q, s, options);
  verify_remainder_bound(q, s, 1 + offset, options.steps + offset);
  const auto table = s.remainder().is_zero() ? schedule_table(s, options.steps, offset) : std::vector<double>{};

  ChainEnsemble out;
  out.master_seed = config.master_seed;
  out.seeds.resize(config.replicates);
  out.runs.resize(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::size_t r) {
    out.seeds[r] = derive_seed(config.master_seed, r);
    Rng rng(out.seeds[r]);
    out.runs[r] = simulate_with_table(q, s, options, offset, table, rng);
  });
  return out;
}

}  // namespace freezing
