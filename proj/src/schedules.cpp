#include "freezing/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freezing/error.hpp"

namespace freezing {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double log_power_raw(double zeta, std::int64_t n) {
  const double nd = static_cast<double>(n);
  return std::pow(std::log(nd), zeta) / nd;
}

double log_power_value(double zeta, std::int64_t n) {
  const double peak = std::exp(zeta);
  if (static_cast<double>(n) >= peak) return log_power_raw(zeta, n);
  const auto below = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::floor(peak)));
  return std::max(log_power_raw(zeta, below), log_power_raw(zeta, below + 1));
}

// Least-squares slope of log p_n against log n over the upper half (in log
// scale) of a tabulated schedule.
double tabulated_tail_exponent(const Tabulated& t) {
  const auto first = t.first_index;
  const auto last = first + static_cast<std::int64_t>(t.values.size()) - 1;
  const auto from = std::max<std::int64_t>(
      first, static_cast<std::int64_t>(std::sqrt(static_cast<double>(first) * static_cast<double>(last))));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (auto n = from; n <= last; ++n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(t.values[static_cast<std::size_t>(n - first)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  const double denom = m * sxx - sx * sx;
  if (m < 2 || denom <= 0) return std::numeric_limits<double>::quiet_NaN();
  return -(m * sxy - sx * sy) / denom;
}

constexpr std::size_t kMinTableForClassification = 16;
constexpr double kExponentTol = 0.05;

}  // namespace

double RemainderSpec::bound(std::int64_t n) const {
  return A * std::pow(static_cast<double>(n), -theta_r);
}

RemainderSpec RemainderSpec::uniform_power(double c, double theta_r) {
  RemainderSpec r;
  r.A = std::max(1.0, std::abs(c));
  r.theta_r = theta_r;
  r.evaluator = [c, theta_r](std::int64_t n, int, int) {
    return c * std::pow(static_cast<double>(n), -theta_r);
  };
  return r;
}

FreezingSchedule::FreezingSchedule(ScheduleKind kind, RemainderSpec remainder)
    : kind_(std::move(kind)), remainder_(std::move(remainder)) {
  if (!remainder_.is_zero() && (remainder_.A < 1.0 || !(remainder_.theta_r > 0.0))) {
    throw Error(ErrorCode::InvalidArgument, "remainder bound needs A >= 1 and theta_r > 0");
  }
  std::visit(
      Overloaded{
          [this](const PowerLaw& k) {
            if (!(k.a > 0.0) || !(k.theta > 0.0) || !std::isfinite(k.a) || !std::isfinite(k.theta)) {
              throw Error(ErrorCode::InvalidArgument, "power_law needs a > 0 and theta > 0");
            }
            n_min_ = 1;
            if (k.a > 1.0) {
              n_min_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::pow(k.a, 1.0 / k.theta))));
              while (k.a * std::pow(static_cast<double>(n_min_), -k.theta) > 1.0) ++n_min_;
            }
          },
          [this](const Critical& k) {
            if (!(k.a > 0.0) || !std::isfinite(k.a)) {
              throw Error(ErrorCode::InvalidArgument, "critical schedule needs a > 0");
            }
            n_min_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(k.a)));
          },
          [this](const LogPower& k) {
            if (!(k.zeta >= 1.0) || !std::isfinite(k.zeta)) {
              throw Error(ErrorCode::InvalidArgument, "log_power needs zeta >= 1");
            }
            n_min_ = 2;
            while (log_power_value(k.zeta, n_min_) > 1.0) ++n_min_;
          },
          [this](const ConstantPlus& k) {
            if (!(k.limit > 0.0) || !(k.excess >= 0.0) || !(k.rate > 0.0) || k.limit + k.excess > 1.0) {
              throw Error(ErrorCode::InvalidArgument,
                          "constant_plus needs limit in (0,1], excess >= 0, rate > 0, limit + excess <= 1");
            }
            n_min_ = 1;
          },
          [this](const Tabulated& k) {
            if (k.values.empty() || k.first_index < 1) {
              throw Error(ErrorCode::InvalidArgument, "tabulated schedule needs values and first_index >= 1");
            }
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (!(k.values[i] > 0.0) || k.values[i] > 1.0) {
                throw Error(ErrorCode::InvalidArgument, "tabulated values must lie in (0,1]");
              }
              if (i > 0 && k.values[i] > k.values[i - 1]) {
                throw Error(ErrorCode::InvalidArgument, "tabulated values must be non-increasing");
              }
            }
            n_min_ = k.first_index;
          },
      },
      kind_);
}

double FreezingSchedule::p(std::int64_t n) const {
  if (n < n_min_) {
    throw Error(ErrorCode::IndexBelowStart,
                "n = " + std::to_string(n) + " is below n_min = " + std::to_string(n_min_));
  }
  const double nd = static_cast<double>(n);
  return std::visit(
      Overloaded{
          [&](const PowerLaw& k) { return k.a * std::pow(nd, -k.theta); },
          [&](const Critical& k) { return k.a / nd; },
          [&](const LogPower& k) { return log_power_value(k.zeta, n); },
          [&](const ConstantPlus& k) { return k.limit + k.excess * std::pow(nd, -k.rate); },
          [&](const Tabulated& k) {
            const auto idx = n - k.first_index;
            if (idx >= static_cast<std::int64_t>(k.values.size())) {
              throw Error(ErrorCode::OutOfRange, "n = " + std::to_string(n) + " beyond tabulated range");
            }
            return k.values[static_cast<std::size_t>(idx)];
          },
      },
      kind_);
}

std::int64_t FreezingSchedule::n_max() const {
  if (const auto* t = std::get_if<Tabulated>(&kind_)) {
    return t->first_index + static_cast<std::int64_t>(t->values.size()) - 1;
  }
  return std::numeric_limits<std::int64_t>::max();
}

double FreezingSchedule::limit_p() const {
  return std::visit(Overloaded{
                        [](const ConstantPlus& k) { return k.limit; },
                        [](const Tabulated& k) {
                          return tabulated_tail_exponent(k) < kExponentTol ? k.values.back() : 0.0;
                        },
                        [](const auto&) { return 0.0; },
                    },
                    kind_);
}

bool FreezingSchedule::summable() const {
  return std::visit(Overloaded{
                        [](const PowerLaw& k) { return k.theta > 1.0; },
                        [](const Tabulated& k) { return tabulated_tail_exponent(k) > 1.0 + kExponentTol; },
                        [](const auto&) { return false; },
                    },
                    kind_);
}

std::string FreezingSchedule::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PowerLaw& k) { os << "power_law(a=" << k.a << ", theta=" << k.theta << ")"; },
                 [&](const Critical& k) { os << "critical(a=" << k.a << ")"; },
                 [&](const LogPower& k) { os << "log_power(zeta=" << k.zeta << ")"; },
                 [&](const ConstantPlus& k) {
                   os << "constant_plus(limit=" << k.limit << ", excess=" << k.excess << ", rate=" << k.rate << ")";
                 },
                 [&](const Tabulated& k) {
                   os << "tabulated(first_index=" << k.first_index << ", length=" << k.values.size() << ")";
                 },
             },
             kind_);
  if (!remainder_.is_zero()) os << " + remainder(A=" << remainder_.A << ", theta_r=" << remainder_.theta_r << ")";
  return os.str();
}

GammaAlpha gamma_alpha(std::int64_t n, const FreezingSchedule& s) {
  const double nd = static_cast<double>(n);
  return {1.0 / nd, std::sqrt(nd * s.p(n))};
}

double upsilon_numeric(const FreezingSchedule& s, std::int64_t from, std::int64_t to) {
  from = std::max(from, s.n_min());
  to = std::min(to, s.n_max() - 1);
  if (to < from) throw Error(ErrorCode::InvalidArgument, "empty range for upsilon fit");
  double sum = 0.0;
  for (auto n = from; n <= to; ++n) {
    const double ratio_minus_one = std::expm1(std::log(s.p(n + 1)) - std::log(s.p(n)));
    sum += static_cast<double>(n) * ratio_minus_one;
  }
  return sum / static_cast<double>(to - from + 1);
}

namespace {

std::optional<double> tabulated_upsilon(const FreezingSchedule& s, const Tabulated& t) {
  if (t.values.size() < kMinTableForClassification) return std::nullopt;
  const auto last = s.n_max() - 1;
  const auto len = static_cast<std::int64_t>(t.values.size());
  const auto mid = last - len / 4;
  const double early = upsilon_numeric(s, mid - len / 8, mid);
  const double late = upsilon_numeric(s, last - len / 8, last);
  if (!std::isfinite(early) || !std::isfinite(late) || std::abs(early - late) > 0.1) return std::nullopt;
  return late;
}

}  // namespace

double upsilon(const FreezingSchedule& s) {
  return std::visit(Overloaded{
                        [](const PowerLaw& k) { return -k.theta; },
                        [](const Critical&) { return -1.0; },
                        [](const LogPower&) { return -1.0; },
                        [](const ConstantPlus&) { return 0.0; },
                        [&](const Tabulated& k) {
                          const auto u = tabulated_upsilon(s, k);
                          if (!u) throw Error(ErrorCode::UnsupportedRegime, "no stable Upsilon on the table tail");
                          return *u;
                        },
                    },
                    s.kind());
}

double RateSequence::operator()(std::int64_t n) const {
  if (zero) return 0.0;
  if (custom) return custom(n);
  const double nd = static_cast<double>(n);
  double v = scale * std::pow(nd, -exponent);
  if (log_exponent != 0.0) v *= std::pow(std::log(nd), -log_exponent);
  return v;
}

LambdaEstimate lambda_rate(const RateSequence& gamma, const RateSequence& eps, LambdaMode mode,
                           std::int64_t max_n) {
  if (eps.zero) return {std::numeric_limits<double>::infinity(), true, false};
  const bool analytic_ok = gamma.is_harmonic() && !eps.custom && !eps.zero;
  if (mode == LambdaMode::Analytic && !analytic_ok) {
    throw Error(ErrorCode::InvalidArgument, "analytic lambda needs gamma_n = 1/n and a power-law eps");
  }
  if (analytic_ok && mode != LambdaMode::Numeric) {
    return {std::min(eps.exponent, 1.0), true, false};
  }
  if (max_n < 16) throw Error(ErrorCode::InvalidArgument, "numeric lambda needs max_n >= 16");

  std::vector<std::int64_t> checkpoints;
  for (std::int64_t n = 2; n < max_n; n *= 2) checkpoints.push_back(n);
  checkpoints.push_back(max_n);

  std::vector<double> rates;  // -log(gamma v eps) / sum gamma at each checkpoint
  double cumulative = 0.0;
  std::size_t next = 0;
  const std::int64_t start = (gamma.log_exponent != 0.0) ? 2 : 1;
  for (std::int64_t n = start; n <= max_n && next < checkpoints.size(); ++n) {
    cumulative += gamma(n);
    if (n == checkpoints[next]) {
      const double top = std::max(gamma(n), eps(n));
      rates.push_back(-std::log(top) / cumulative);
      ++next;
    }
  }
  LambdaEstimate out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (2 * checkpoints[k] >= max_n) out.value = std::min(out.value, rates[k]);
  }
  const auto half = rates.begin() + static_cast<std::ptrdiff_t>(rates.size() / 2);
  const auto [lo, hi] = std::minmax_element(half, rates.end());
  out.unstable = !std::isfinite(out.value) || (*hi - *lo) > 0.25 * std::abs(out.value) + 0.05;
  return out;
}

double as_rate_ell(const FreezingSchedule& s) {
  const auto report = classify(s);
  if (report.regime != Regime::Standard) {
    throw Error(ErrorCode::UnsupportedRegime, "as_rate_ell needs a Standard schedule, got " + to_string(report.regime));
  }
  const auto gamma = RateSequence::harmonic();
  const RateSequence ratio = std::visit(
      Overloaded{
          [](const PowerLaw& k) { return RateSequence::power(1.0 - k.theta, 1.0 / k.a); },
          [](const Critical& k) { return RateSequence::power(0.0, 1.0 / k.a); },
          [](const LogPower& k) { return RateSequence::power_log(0.0, k.zeta); },
          [](const ConstantPlus& k) { return RateSequence::power(1.0, 1.0 / k.limit); },
          [&](const Tabulated&) {
            return RateSequence::from([&s](std::int64_t n) { return 1.0 / (static_cast<double>(n) * s.p(n)); });
          },
      },
      s.kind());
  double ell;
  if (ratio.custom) {
    const auto last = s.n_max();
    ell = lambda_rate(gamma, RateSequence::from([&](std::int64_t n) {
                        return n < s.n_min() ? 1.0 : ratio(n);
                      }),
                      LambdaMode::Numeric, last)
              .value;
  } else {
    ell = lambda_rate(gamma, ratio).value;
  }
  if (!s.remainder().is_zero()) {
    ell = std::min(ell, lambda_rate(gamma, RateSequence::power(s.remainder().theta_r)).value);
  }
  return ell;
}

double nonstandard_rate_bound(double A, double theta_r, double a, double rho) {
  if (!(A >= 1.0) || !(theta_r > 0.0) || theta_r > 1.0 || !(a > 0.0) || !(rho > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "need A >= 1, theta_r in (0,1], a > 0, rho > 0");
  }
  return theta_r / (A + theta_r * (1.0 + 1.0 / (a * rho)));
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NonStandard: return "NonStandard";
    case Regime::Standard: return "Standard";
    case Regime::Frozen: return "Frozen";
    case Regime::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

namespace {

// Appends a note when the remainder is too large for the Gaussian limit,
// which needs R_n / sqrt(p_n gamma_n) -> 0.
void check_remainder_for_clt(const FreezingSchedule& s, double p_exponent, RegimeReport& report) {
  if (s.remainder().is_zero()) return;
  if (s.remainder().theta_r <= (1.0 + p_exponent) / 2.0) {
    report.notes += "; remainder decays too slowly for the Gaussian limit (needs theta_r > (1 + theta)/2)";
  }
}

}  // namespace

RegimeReport classify(const FreezingSchedule& s) {
  RegimeReport report;
  std::visit(
      Overloaded{
          [&](const PowerLaw& k) {
            if (k.theta > 1.0) {
              report.regime = Regime::Frozen;
              report.notes = "sum p_n < infinity: the chain eventually stops moving";
            } else if (k.theta == 1.0) {
              report.regime = Regime::NonStandard;
              report.upsilon = -1.0;
              report.notes = "p_n = a/n: limit is the exponential zig-zag stationary law";
            } else {
              report.regime = Regime::Standard;
              report.upsilon = -k.theta;
              report.notes = "gamma_n/p_n = n^(theta-1)/a -> 0";
              check_remainder_for_clt(s, k.theta, report);
            }
          },
          [&](const Critical&) {
            report.regime = Regime::NonStandard;
            report.upsilon = -1.0;
            report.notes = "p_n = a/n: limit is the exponential zig-zag stationary law";
          },
          [&](const LogPower&) {
            report.regime = Regime::Standard;
            report.upsilon = -1.0;
            report.notes = "gamma_n/p_n = log(n)^-zeta -> 0; 1 + Upsilon = 0 so the Gaussian covariance is undefined";
            check_remainder_for_clt(s, 1.0, report);
          },
          [&](const ConstantPlus&) {
            report.regime = Regime::Standard;
            report.upsilon = 0.0;
            report.notes = "p_n -> p > 0";
            check_remainder_for_clt(s, 0.0, report);
          },
          [&](const Tabulated& k) {
            if (k.values.size() < kMinTableForClassification) {
              report.regime = Regime::Unsupported;
              report.notes = "table too short to classify";
              return;
            }
            const double exponent = tabulated_tail_exponent(k);
            const auto last = s.n_max();
            const auto from = std::max<std::int64_t>(
                k.first_index,
                static_cast<std::int64_t>(std::sqrt(static_cast<double>(k.first_index) * static_cast<double>(last))));
            const double drift = std::log((static_cast<double>(last) * s.p(last)) /
                                          (static_cast<double>(from) * s.p(from)));
            if (!std::isfinite(exponent)) {
              report.regime = Regime::Unsupported;
              report.notes = "tail exponent not finite";
            } else if (exponent > 1.0 + kExponentTol) {
              report.regime = Regime::Frozen;
              report.notes = "tail exponent > 1: sum p_n < infinity";
            } else if (exponent < 1.0 - kExponentTol || drift > kExponentTol) {
              report.regime = Regime::Standard;
              report.upsilon = tabulated_upsilon(s, k);
              report.notes = report.upsilon ? "gamma_n/p_n -> 0" : "gamma_n/p_n -> 0 but no stable Upsilon";
            } else if (std::abs(drift) <= kExponentTol) {
              report.regime = Regime::NonStandard;
              report.upsilon = -1.0;
              report.notes = "n p_n approximately constant";
            } else {
              report.regime = Regime::Unsupported;
              report.notes = "p_n = o(1/n) with divergent sum (e.g. 1/(n log n)) is not covered";
            }
          },
      },
      s.kind());
  return report;
}

}  // namespace freezing
