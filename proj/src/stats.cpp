#include "freezing/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freezing/error.hpp"
#include "freezing/random.hpp"

namespace freezing {

namespace {

std::vector<double> sorted_copy(std::span<const double> s) {
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

// Walks the merged partition {i/m} u {j/n} of [0, 1] and calls
// piece(lo, hi, i, j) on each cell, with i, j the active indices.
template <class Piece>
void merged_partition(std::size_t m, std::size_t n, Piece&& piece) {
  std::size_t i = 0, j = 0;
  double lo = 0.0;
  while (i < m && j < n) {
    // Compare (i+1)/m with (j+1)/n exactly.
    const auto lhs = static_cast<unsigned __int128>(i + 1) * n;
    const auto rhs = static_cast<unsigned __int128>(j + 1) * m;
    const double hi = lhs <= rhs ? static_cast<double>(i + 1) / static_cast<double>(m)
                                 : static_cast<double>(j + 1) / static_cast<double>(n);
    piece(lo, hi, i, j);
    lo = hi;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
}

}  // namespace

double wasserstein1_1d(std::span<const double> a, std::span<const double> b) {
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  double total = 0.0;
  merged_partition(x.size(), y.size(), [&](double lo, double hi, std::size_t i, std::size_t j) {
    total += (hi - lo) * std::abs(x[i] - y[j]);
  });
  return total;
}

double wasserstein1_1d(std::span<const double> a, const std::function<double(double)>& quantile, std::size_t nodes) {
  if (nodes == 0) throw Error(ErrorCode::InvalidArgument, "quantile grid needs at least one node");
  const auto x = sorted_copy(a);
  double total = 0.0;
  merged_partition(x.size(), nodes, [&](double lo, double hi, std::size_t i, std::size_t) {
    total += (hi - lo) * std::abs(x[i] - quantile(0.5 * (lo + hi)));
  });
  return total;
}

double sliced_wasserstein(const Matrix& a, const Matrix& b, std::size_t n_proj, std::uint64_t seed) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::InvalidArgument, "samples have different dimensions");
  if (a.rows() == 0 || b.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty sample");
  if (n_proj == 0) throw Error(ErrorCode::InvalidArgument, "need at least one projection");
  Rng rng(derive_seed(seed, 0));
  Vector dir(a.cols());
  double total = 0.0;
  for (std::size_t k = 0; k < n_proj; ++k) {
    do {
      for (Eigen::Index c = 0; c < dir.size(); ++c) dir(c) = standard_normal(rng);
    } while (dir.norm() == 0.0);
    dir.normalize();
    const Vector pa = a * dir;
    const Vector pb = b * dir;
    total += wasserstein1_1d(std::span<const double>(pa.data(), static_cast<std::size_t>(pa.size())),
                             std::span<const double>(pb.data(), static_cast<std::size_t>(pb.size())));
  }
  return total / static_cast<double>(n_proj);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Theta-function form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf, double alpha) {
  const auto x = sorted_copy(sample);
  const auto n = x.size();
  const double nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = cdf(x[k]);
    d = std::max({d, static_cast<double>(k + 1) / nd - f, f - static_cast<double>(k) / nd});
  }
  // Stephens' finite-sample correction of the asymptotic scale.
  const double scale = std::sqrt(nd) + 0.12 + 0.11 / std::sqrt(nd);
  double lo = 0.1, hi = 5.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_sf(mid) > alpha ? lo : hi) = mid;
  }
  KsResult r;
  r.n = n;
  r.statistic = d;
  r.p_value = kolmogorov_sf(scale * d);
  r.critical = hi / scale;
  r.pass = r.p_value >= alpha;
  r.inconclusive = n < 5;
  return r;
}

Vector sample_mean(const Matrix& samples) {
  if (samples.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty sample");
  return samples.colwise().mean().transpose();
}

Matrix sample_covariance(const Matrix& samples) {
  if (samples.rows() < 2) throw Error(ErrorCode::InvalidArgument, "covariance needs at least two draws");
  const Matrix centred = samples.rowwise() - samples.colwise().mean();
  return centred.transpose() * centred / static_cast<double>(samples.rows() - 1);
}

MomentReport moment_report(const Matrix& samples, const Vector& mean, const Matrix& covariance, double z_max,
                           MomentErrors errors) {
  const auto M = samples.rows();
  const auto d = samples.cols();
  if (M < 30) throw Error(ErrorCode::InvalidArgument, "moment report needs M >= 30");
  if (mean.size() != d || covariance.rows() != d || covariance.cols() != d) {
    throw Error(ErrorCode::InvalidArgument, "analytic moments have wrong dimension");
  }
  const double md = static_cast<double>(M);
  const Vector emp_mean = sample_mean(samples);
  const Matrix emp_cov = sample_covariance(samples);
  const Matrix centred = samples.rowwise() - emp_mean.transpose();

  MomentReport rep;
  auto add = [&](std::string name, double empirical, double analytic, double se) {
    MomentEntry e{std::move(name), empirical, analytic, se, 0.0};
    const double diff = empirical - analytic;
    if (se > 0.0) {
      e.z = diff / se;
    } else {
      e.z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(e.z));
    rep.entries.push_back(std::move(e));
  };
  for (Eigen::Index k = 0; k < d; ++k) {
    const double var = std::max(covariance(k, k), 0.0);
    add("mean[" + std::to_string(k + 1) + "]", emp_mean(k), mean(k), std::sqrt(var / md));
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = k; l < d; ++l) {
      double var;
      if (errors == MomentErrors::Wick) {
        var = (covariance(k, k) * covariance(l, l) + covariance(k, l) * covariance(k, l)) / md;
      } else {
        const Vector prod = centred.col(k).cwiseProduct(centred.col(l));
        const double pm = prod.mean();
        var = (prod.array() - pm).square().sum() / (md - 1.0) / md;
      }
      add("cov[" + std::to_string(k + 1) + "," + std::to_string(l + 1) + "]", emp_cov(k, l), covariance(k, l),
          std::sqrt(std::max(var, 0.0)));
    }
  }
  rep.pass = rep.max_abs_z <= z_max;
  return rep;
}

RateFit rate_fit(std::span<const double> x, std::span<const double> d, RateScale scale) {
  if (x.size() != d.size()) throw Error(ErrorCode::InvalidArgument, "abscissae and distances differ in length");
  if (x.size() < 5) throw Error(ErrorCode::InvalidArgument, "rate fit needs at least 5 points");
  RateFit fit;
  fit.scale = scale;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(d[k] > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "distances must be positive");
    if (scale == RateScale::LogLog && !(x[k] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive abscissae");
    }
    fit.abscissae.push_back(scale == RateScale::LogLog ? std::log(x[k]) : x[k]);
    fit.log_distances.push_back(std::log(d[k]));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += fit.abscissae[k];
    sy += fit.log_distances[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = fit.abscissae[k] - mx, dy = fit.log_distances[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "abscissae must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

void to_json(nlohmann::json& j, const StatReport& r) {
  j = {{"test", r.test},   {"statistic", r.statistic}, {"threshold", r.threshold},
       {"pass", r.pass},   {"seed", r.seed},           {"config_hash", r.config_hash}};
}

void to_json(nlohmann::json& j, const RateFit& r) {
  j = {{"scale", r.scale == RateScale::LogLog ? "log-log" : "log-linear"},
       {"slope", r.slope},
       {"intercept", r.intercept},
       {"r2", r.r2},
       {"points", r.abscissae.size()}};
}

void to_json(nlohmann::json& j, const KsResult& r) {
  j = {{"statistic", r.statistic}, {"p_value", r.p_value}, {"critical", r.critical},
       {"pass", r.pass},           {"inconclusive", r.inconclusive}, {"n", r.n}};
}

void to_json(nlohmann::json& j, const MomentReport& r) {
  auto entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"name", e.name}, {"empirical", e.empirical}, {"analytic", e.analytic},
                       {"std_error", e.std_error}, {"z", e.z}});
  }
  j = {{"max_abs_z", r.max_abs_z}, {"pass", r.pass}, {"entries", std::move(entries)}};
}

}  // namespace freezing
