#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace freezing {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Connectivity { Irreducible, Indecomposable, Decomposable };

/// Reachability class of the directed graph {i -> j : q(i,j) > 0}.
struct ConnectivityClass {
  Connectivity kind = Connectivity::Decomposable;
  /// States (0-based) of the recurrent class when it is unique; otherwise the
  /// union of all closed classes.
  std::vector<int> recurrent_states;
};

ConnectivityClass classify_connectivity(const Matrix& q);

/// Continuous-time generator q with q(i,j) >= 0 off the diagonal, zero row
/// sums and q(i,i) >= -1, so that Id + q is a stochastic matrix. The diagonal
/// is recomputed from the off-diagonal entries, which makes every row sum
/// exactly zero. Immutable once built.
class GeneratorMatrix {
 public:
  /// Accepts irreducible and indecomposable matrices; rejects the rest.
  static GeneratorMatrix validate(const Matrix& raw);

  int dim() const { return static_cast<int>(q_.rows()); }
  const Matrix& q() const { return q_; }
  double operator()(int i, int j) const { return q_(i, j); }
  const ConnectivityClass& connectivity() const { return connectivity_; }
  bool irreducible() const { return connectivity_.kind == Connectivity::Irreducible; }

  /// Total jump rate out of state i, i.e. -q(i,i).
  double exit_rate(int i) const { return -q_(i, i); }

  GeneratorMatrix scaled(double c) const;

 private:
  GeneratorMatrix(Matrix q, ConnectivityClass connectivity)
      : q_(std::move(q)), connectivity_(std::move(connectivity)) {}

  Matrix q_;
  ConnectivityClass connectivity_;
};

struct StationaryLaw {
  Vector nu;
};

enum class PoissonGauge {
  /// sum_i nu_i h_{k,i} = 0 for every k (the fundamental-matrix solution).
  NuMeanZero,
  /// h_{k,(k+1) mod D} = 0; on the complete graph this reproduces the closed
  /// form h_{k,i} = 1{i=k}/|theta|.
  Raw,
};

/// h(k, i) is the k-th coordinate at state i and solves
///   sum_{j != i} q(i,j) (h(k,j) - h(k,i)) = nu_k - 1{i=k}.
struct PoissonSolution {
  Matrix h;
  PoissonGauge gauge = PoissonGauge::NuMeanZero;
};

StationaryLaw stationary_distribution(const GeneratorMatrix& q);

PoissonSolution poisson_solution(const GeneratorMatrix& q, const StationaryLaw& nu,
                                 PoissonGauge gauge = PoissonGauge::NuMeanZero);

/// Max-norm residual of the Poisson equation for an arbitrary candidate h.
double poisson_residual(const GeneratorMatrix& q, const StationaryLaw& nu, const Matrix& h);

/// min{-Re(lambda) : lambda eigenvalue of q, lambda != 0}. This is the
/// normalisation used in every rate formula of the library.
double spectral_gap(const GeneratorMatrix& q);

/// Gap of the discrete kernel Id + q: 1 - max{|1 + lambda| : lambda != 0}.
double kernel_spectral_gap(const GeneratorMatrix& q);

/// q(i,j) = theta_j - |theta| 1{i=j}. Requires |theta| - theta_i <= 1 for
/// every i so that Id + q stays stochastic.
GeneratorMatrix complete_graph_generator(std::span<const double> theta);

/// Closed forms on the complete graph: nu_i = theta_i/|theta| and the Raw-gauge
/// Poisson solution h_{k,i} = 1{i=k}/|theta|.
StationaryLaw complete_graph_stationary(std::span<const double> theta);
Matrix complete_graph_poisson(std::span<const double> theta);

}  // namespace freezing
