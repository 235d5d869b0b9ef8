#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace freezing {

/// p_n = a n^-theta.
struct PowerLaw {
  double a = 1.0;
  double theta = 0.5;
};

/// p_n = a / n.
struct Critical {
  double a = 1.0;
};

/// p_n = log(n)^zeta / n for n >= 2. Below the peak at n = e^zeta the value is
/// replaced by the running supremum sup_{m >= n} log(m)^zeta / m so that the
/// schedule stays non-increasing.
struct LogPower {
  double zeta = 1.0;
};

/// p_n = limit + excess n^-rate, decreasing to limit > 0.
struct ConstantPlus {
  double limit = 1.0;
  double excess = 0.0;
  double rate = 1.0;
};

/// Explicit values p_{first_index}, p_{first_index+1}, ...
struct Tabulated {
  std::int64_t first_index = 1;
  std::vector<double> values;
};

using ScheduleKind = std::variant<PowerLaw, Critical, LogPower, ConstantPlus, Tabulated>;

/// Remainder r_n(i,j) with the declared bound |r_n(i,j)| <= A n^-theta_r.
/// States passed to the evaluator are 0-based.
struct RemainderSpec {
  double A = 1.0;
  double theta_r = 1.0;
  std::function<double(std::int64_t n, int i, int j)> evaluator;

  bool is_zero() const { return !evaluator; }
  double operator()(std::int64_t n, int i, int j) const {
    return evaluator ? evaluator(n, i, j) : 0.0;
  }
  double bound(std::int64_t n) const;

  /// r_n(i,j) = c n^-theta_r for every pair i != j, declared with A = max(1, |c|).
  static RemainderSpec uniform_power(double c, double theta_r);
};

class FreezingSchedule {
 public:
  explicit FreezingSchedule(ScheduleKind kind, RemainderSpec remainder = {});

  static FreezingSchedule power_law(double a, double theta) { return FreezingSchedule(PowerLaw{a, theta}); }
  static FreezingSchedule critical(double a) { return FreezingSchedule(Critical{a}); }
  static FreezingSchedule log_power(double zeta) { return FreezingSchedule(LogPower{zeta}); }
  static FreezingSchedule constant(double p) { return FreezingSchedule(ConstantPlus{p, 0.0, 1.0}); }

  /// Exact schedule value; throws IndexBelowStart for n < n_min().
  double p(std::int64_t n) const;
  /// First index at which p_n lies in (0, 1].
  std::int64_t n_min() const { return n_min_; }
  /// Last valid index (tabulated schedules only; otherwise INT64_MAX).
  std::int64_t n_max() const;
  double limit_p() const;
  /// True when sum_n p_n < infinity.
  bool summable() const;

  const ScheduleKind& kind() const { return kind_; }
  const RemainderSpec& remainder() const { return remainder_; }
  std::string describe() const;

 private:
  ScheduleKind kind_;
  RemainderSpec remainder_;
  std::int64_t n_min_ = 1;
};

inline double p_at(const FreezingSchedule& s, std::int64_t n) { return s.p(n); }

struct GammaAlpha {
  double gamma;
  double alpha;
};

/// gamma_n = 1/n and alpha_n = sqrt(p_n / gamma_n) = sqrt(n p_n).
GammaAlpha gamma_alpha(std::int64_t n, const FreezingSchedule& s);

/// Second-order exponent with p_{n+1}/p_n = 1 + Upsilon/n + o(1/n). Analytic
/// for the parametric kinds, fitted on the tail for tabulated schedules.
double upsilon(const FreezingSchedule& s);

/// Mean of n (p_{n+1}/p_n - 1) over n in [from, to].
double upsilon_numeric(const FreezingSchedule& s, std::int64_t from, std::int64_t to);

/// Positive sequence c n^-exponent log(n)^-log_exponent, or the zero sequence,
/// or an arbitrary evaluator.
struct RateSequence {
  double scale = 1.0;
  double exponent = 1.0;
  double log_exponent = 0.0;
  bool zero = false;
  std::function<double(std::int64_t)> custom;

  static RateSequence harmonic() { return {}; }
  static RateSequence power(double exponent, double scale = 1.0) { return {scale, exponent, 0.0, false, {}}; }
  static RateSequence power_log(double exponent, double log_exponent, double scale = 1.0) {
    return {scale, exponent, log_exponent, false, {}};
  }
  static RateSequence zeros() { return {1.0, 0.0, 0.0, true, {}}; }
  static RateSequence from(std::function<double(std::int64_t)> f) {
    RateSequence r;
    r.custom = std::move(f);
    return r;
  }

  bool is_harmonic() const { return !custom && !zero && scale == 1.0 && exponent == 1.0 && log_exponent == 0.0; }
  double operator()(std::int64_t n) const;
};

struct LambdaEstimate {
  double value = 0.0;
  bool analytic = false;
  bool unstable = false;
};

enum class LambdaMode { Auto, Analytic, Numeric };

/// lambda(gamma, eps) = -limsup log(gamma_n v eps_n) / sum_{k<=n} gamma_k.
/// Analytic mode covers gamma_n = 1/n against power(-log) sequences, where the
/// value is min(exponent, 1). Numeric mode evaluates the ratio on dyadic
/// checkpoints up to max_n and reports the limsup over checkpoints in
/// [max_n/2, max_n]; the zero sequence yields +infinity.
LambdaEstimate lambda_rate(const RateSequence& gamma, const RateSequence& eps,
                           LambdaMode mode = LambdaMode::Auto,
                           std::int64_t max_n = 10'000'000);

/// l = lambda(gamma, gamma/p) ^ lambda(gamma, R) for a Standard schedule.
double as_rate_ell(const FreezingSchedule& s);

/// theta_r / (A + theta_r (1 + 1/(a rho))).
double nonstandard_rate_bound(double A, double theta_r, double a, double rho);

enum class Regime { NonStandard, Standard, Frozen, Unsupported };

std::string to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::Unsupported;
  std::optional<double> upsilon;
  std::string notes;
};

RegimeReport classify(const FreezingSchedule& s);

}  // namespace freezing
