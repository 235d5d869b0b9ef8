#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "freezing/markov_core.hpp"

namespace freezing {

/// Exact W1 between two empirical laws on the line: integral of
/// |F_a^{-1}(u) - F_b^{-1}(u)| over u, evaluated on the merged breakpoints.
double wasserstein1_1d(std::span<const double> a, std::span<const double> b);

/// W1 between an empirical law and an analytic law given by its quantile
/// function. The quantile is evaluated at the midpoints of the union of the
/// sample breakpoints m/M and a uniform grid with `nodes` cells.
double wasserstein1_1d(std::span<const double> a, const std::function<double(double)>& quantile,
                       std::size_t nodes = 4096);

/// Mean of 1-D W1 over `n_proj` random unit directions. Rows are draws.
double sliced_wasserstein(const Matrix& a, const Matrix& b, std::size_t n_proj = 64, std::uint64_t seed = 0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double critical = 0.0;
  bool pass = true;
  /// Too few points for the asymptotic critical value to mean anything.
  bool inconclusive = false;
  std::size_t n = 0;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);

/// One-sample KS test against a continuous cdf at level alpha.
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf, double alpha = 0.01);

enum class MomentErrors {
  /// Standard errors of second moments from empirical fourth moments.
  Empirical,
  /// Gaussian fourth moments: Var = (S_kk S_ll + S_kl^2) / M.
  Wick,
};

struct MomentEntry {
  std::string name;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

struct MomentReport {
  std::vector<MomentEntry> entries;
  double max_abs_z = 0.0;
  bool pass = true;
};

/// Means and upper-triangle covariances of the rows of `samples` against
/// analytic values, as z-scores. Needs M >= 30.
MomentReport moment_report(const Matrix& samples, const Vector& mean, const Matrix& covariance,
                           double z_max = 4.0, MomentErrors errors = MomentErrors::Empirical);

Vector sample_mean(const Matrix& samples);
/// Unbiased sample covariance.
Matrix sample_covariance(const Matrix& samples);

enum class RateScale {
  LogLog,     // log d against log n
  LogLinear,  // log d against t
};

struct RateFit {
  std::vector<double> abscissae;
  std::vector<double> log_distances;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  RateScale scale = RateScale::LogLog;
};

/// Least-squares line through (x, log d) or (log x, log d). Needs at least
/// five points and positive distances.
RateFit rate_fit(std::span<const double> x, std::span<const double> d, RateScale scale = RateScale::LogLog);

/// One line of a verification report.
struct StatReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string config_hash;
};

void to_json(nlohmann::json& j, const StatReport& r);
void to_json(nlohmann::json& j, const RateFit& r);
void to_json(nlohmann::json& j, const KsResult& r);
void to_json(nlohmann::json& j, const MomentReport& r);

}  // namespace freezing
