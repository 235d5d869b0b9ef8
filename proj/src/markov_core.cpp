#include "freezing/markov_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "freezing/error.hpp"

namespace freezing {

namespace {

constexpr double kConstructionTol = 1e-12;
constexpr double kResidualTol = 1e-10;

std::vector<std::vector<bool>> reachability(const Matrix& q) {
  const int d = static_cast<int>(q.rows());
  std::vector<std::vector<bool>> reach(d, std::vector<bool>(d, false));
  for (int s = 0; s < d; ++s) {
    std::vector<int> stack{s};
    reach[s][s] = true;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < d; ++j) {
        if (j != i && q(i, j) > 0.0 && !reach[s][j]) {
          reach[s][j] = true;
          stack.push_back(j);
        }
      }
    }
  }
  return reach;
}

void require_irreducible(const GeneratorMatrix& q, const char* what) {
  if (!q.irreducible()) {
    throw Error(ErrorCode::NotIrreducible,
                std::string(what) + " requires an irreducible generator");
  }
}

}  // namespace

ConnectivityClass classify_connectivity(const Matrix& q) {
  const int d = static_cast<int>(q.rows());
  const auto reach = reachability(q);
  // A state is recurrent iff every state it reaches reaches it back.
  std::vector<bool> recurrent(d, true);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (reach[i][j] && !reach[j][i]) {
        recurrent[i] = false;
        break;
      }
    }
  }
  ConnectivityClass out;
  std::vector<bool> seen(d, false);
  int closed_classes = 0;
  for (int i = 0; i < d; ++i) {
    if (!recurrent[i]) continue;
    out.recurrent_states.push_back(i);
    if (seen[i]) continue;
    ++closed_classes;
    for (int j = 0; j < d; ++j) {
      if (reach[i][j]) seen[j] = true;
    }
  }
  if (closed_classes != 1) {
    out.kind = Connectivity::Decomposable;
  } else if (static_cast<int>(out.recurrent_states.size()) == d) {
    out.kind = Connectivity::Irreducible;
  } else {
    out.kind = Connectivity::Indecomposable;
  }
  return out;
}

GeneratorMatrix GeneratorMatrix::validate(const Matrix& raw) {
  if (raw.rows() != raw.cols() || raw.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument, "generator must be square with dimension >= 2");
  }
  if (!raw.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "generator has non-finite entries");
  }
  const int d = static_cast<int>(raw.rows());
  Matrix q = raw;
  for (int i = 0; i < d; ++i) {
    double off = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      if (raw(i, j) < 0.0) {
        throw Error(ErrorCode::NegativeOffDiagonal,
                    "q(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") < 0");
      }
      off += raw(i, j);
    }
    if (std::abs(off + raw(i, i)) > kConstructionTol) {
      throw Error(ErrorCode::RowSumOutOfRange,
                  "row " + std::to_string(i + 1) + " does not sum to zero");
    }
    if (off > 1.0 + kConstructionTol) {
      throw Error(ErrorCode::RowSumOutOfRange,
                  "q(" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                      ") < -1, Id + q is not stochastic");
    }
    q(i, i) = -off;
  }
  auto connectivity = classify_connectivity(q);
  if (connectivity.kind == Connectivity::Decomposable) {
    throw Error(ErrorCode::Decomposable, "generator has more than one recurrent class");
  }
  return GeneratorMatrix(std::move(q), std::move(connectivity));
}

GeneratorMatrix GeneratorMatrix::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
  return validate(q_ * c);
}

StationaryLaw stationary_distribution(const GeneratorMatrix& q) {
  const int d = q.dim();
  Matrix a(d + 1, d);
  a.topRows(d) = q.q().transpose();
  a.row(d).setOnes();
  Vector b = Vector::Zero(d + 1);
  b(d) = 1.0;
  Vector nu = a.colPivHouseholderQr().solve(b);
  for (int i = 0; i < d; ++i) nu(i) = std::max(nu(i), 0.0);
  nu /= nu.sum();
  const double residual = (nu.transpose() * q.q()).cwiseAbs().maxCoeff();
  if (residual > kResidualTol) {
    throw Error(ErrorCode::SingularBeyondNullSpace,
                "stationary law residual " + std::to_string(residual));
  }
  return {std::move(nu)};
}

PoissonSolution poisson_solution(const GeneratorMatrix& q, const StationaryLaw& nu,
                                 PoissonGauge gauge) {
  require_irreducible(q, "poisson_solution");
  const int d = q.dim();
  Eigen::FullPivLU<Matrix> lu(q.q());
  lu.setThreshold(1e-10);
  if (lu.rank() != d - 1) {
    throw Error(ErrorCode::SingularBeyondNullSpace,
                "generator rank " + std::to_string(lu.rank()) + " != D-1");
  }
  // Coordinate k solves [q; c^T] h_k = [nu_k 1 - e_k; 0], c fixing the gauge.
  Matrix a(d + 1, d);
  a.topRows(d) = q.q();
  Matrix rhs = Matrix::Zero(d + 1, d);
  for (int k = 0; k < d; ++k) {
    rhs.col(k).head(d).setConstant(nu.nu(k));
    rhs(k, k) -= 1.0;
  }
  PoissonSolution out;
  out.gauge = gauge;
  if (gauge == PoissonGauge::NuMeanZero) {
    a.row(d) = nu.nu.transpose();
    out.h = a.colPivHouseholderQr().solve(rhs).transpose();
  } else {
    out.h.resize(d, d);
    for (int k = 0; k < d; ++k) {
      a.row(d).setZero();
      a(d, (k + 1) % d) = 1.0;
      const Vector hk = a.colPivHouseholderQr().solve(rhs.col(k));
      out.h.row(k) = hk.transpose();
    }
  }
  const double residual = poisson_residual(q, nu, out.h);
  if (residual > kResidualTol) {
    throw Error(ErrorCode::SingularBeyondNullSpace,
                "Poisson residual " + std::to_string(residual));
  }
  return out;
}

double poisson_residual(const GeneratorMatrix& q, const StationaryLaw& nu, const Matrix& h) {
  const int d = q.dim();
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j != i) lhs += q(i, j) * (h(k, j) - h(k, i));
      }
      const double rhs = nu.nu(k) - (i == k ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

namespace {

// Eigenvalues of q with the one closest to zero removed.
std::vector<std::complex<double>> nontrivial_eigenvalues(const GeneratorMatrix& q) {
  Eigen::EigenSolver<Matrix> solver(q.q(), false);
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> values(ev.data(), ev.data() + ev.size());
  const auto zero = std::min_element(values.begin(), values.end(),
                                     [](auto x, auto y) { return std::abs(x) < std::abs(y); });
  values.erase(zero);
  return values;
}

}  // namespace

double spectral_gap(const GeneratorMatrix& q) {
  require_irreducible(q, "spectral_gap");
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& lambda : nontrivial_eigenvalues(q)) gap = std::min(gap, -lambda.real());
  return gap;
}

double kernel_spectral_gap(const GeneratorMatrix& q) {
  require_irreducible(q, "kernel_spectral_gap");
  double largest = 0.0;
  for (const auto& lambda : nontrivial_eigenvalues(q)) {
    largest = std::max(largest, std::abs(1.0 + lambda));
  }
  return 1.0 - largest;
}

namespace {

double theta_total(std::span<const double> theta) {
  if (theta.size() < 2) throw Error(ErrorCode::InvalidArgument, "theta needs D >= 2 entries");
  for (double t : theta) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::InvalidArgument, "theta entries must be positive");
    }
  }
  return std::accumulate(theta.begin(), theta.end(), 0.0);
}

}  // namespace

GeneratorMatrix complete_graph_generator(std::span<const double> theta) {
  const double total = theta_total(theta);
  const int d = static_cast<int>(theta.size());
  for (int i = 0; i < d; ++i) {
    if (total - theta[i] > 1.0 + kConstructionTol) {
      throw Error(ErrorCode::RowSumOutOfRange,
                  "|theta| - theta_" + std::to_string(i + 1) + " = " +
                      std::to_string(total - theta[i]) + " > 1; rescale theta");
    }
  }
  Matrix raw(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) raw(i, j) = theta[j] - (i == j ? total : 0.0);
  }
  return GeneratorMatrix::validate(raw);
}

StationaryLaw complete_graph_stationary(std::span<const double> theta) {
  const double total = theta_total(theta);
  Vector nu(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t i = 0; i < theta.size(); ++i) nu(static_cast<Eigen::Index>(i)) = theta[i] / total;
  return {std::move(nu)};
}

Matrix complete_graph_poisson(std::span<const double> theta) {
  const double total = theta_total(theta);
  const auto d = static_cast<Eigen::Index>(theta.size());
  return Matrix::Identity(d, d) / total;
}

}  // namespace freezing
