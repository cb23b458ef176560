#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <functional>

#include "erasure/states.hpp"

namespace erasure {

using OutcomeModel = std::function<OutcomeDistribution(double phi)>;

/// Ramsey sensing model: |+>, phase phi, noise of strength q, then a terminal
/// measurement in basis theta. Erasure detection is enabled only for the
/// erasure channel.
OutcomeModel sensing_model(ChannelKind kind, double q, double theta);

/// Sum over outcomes of (d p_x / d phi)^2 / p_x by central differences.
///
/// Outcomes with p_x < 1e-14 whose derivative is also below 1e-10 contribute
/// their limit value 2 p_x'' (the removable singularity of (p')^2/p at a
/// quadratic zero); a vanishing probability with non-vanishing slope throws
/// SingularEvaluation.
double classical_fisher_numeric(const OutcomeModel& model, double phi, double step = 1e-5);

/// (1-q)^2 sin^2(d) / (1 - (1-q)^2 cos^2(d)) with d = phi - theta.
/// At full contrast (q = 0) this is the constant 1, the limit value at d = 0.
double fisher_depolarizing(double q, double delta);

/// Same form with the contrast 1 - 2q.
double fisher_dephasing(double q, double delta);

/// 1 - q for every delta. The three-outcome sum has a removable singularity at
/// sin(delta) = 0; the limit is returned there.
double fisher_erasure(double q, double delta);

double fisher_analytic(ChannelKind kind, double q, double delta);

/// Upper bound (1 - q) F from convexity when the error branch carries no
/// information about phi.
double convexity_upper_bound(double q, double noiseless_qfi);

using Matrix2c = Eigen::Matrix2cd;

/// 2x2 density matrix: Hermitian, unit trace, eigenvalues in [0, 1]
/// (all within 1e-12).
class DensityMatrix2 {
 public:
  /// Validates the invariants; throws InvalidArgument otherwise.
  explicit DensityMatrix2(const Matrix2c& m);

  static DensityMatrix2 from_bloch(const std::array<double, 3>& r);
  static DensityMatrix2 pure(std::complex<double> a0, std::complex<double> a1);

  const Matrix2c& matrix() const { return m_; }
  double purity() const;

  /// (1 - q) rho + q I/2
  DensityMatrix2 depolarized(double q) const;

 private:
  Matrix2c m_;
};

struct HermitianEigen2 {
  std::array<double, 2> values;  // ascending
  std::array<Eigen::Vector2cd, 2> vectors;
};

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
HermitianEigen2 eigen_hermitian2(const Matrix2c& m);

/// Pauli matrices and sigma_z / 2.
Matrix2c pauli_x();
Matrix2c pauli_y();
Matrix2c pauli_z();

/// 4 (2 tr(rho^2) - 1) |<eta0|H|eta1>|^2 with eta0, eta1 the eigenvectors of
/// rho0. Throws SingularEvaluation if the eigenvalue gap of rho0 is below
/// 1e-10 (e.g. rho0 = I/2), where the eigenbasis is not defined.
double qfi_pure_generator(const DensityMatrix2& rho0, const Matrix2c& generator);

/// (1 - q)^2 times the QFI of rho0.
double qfi_depolarized(const DensityMatrix2& rho0, const Matrix2c& generator, double q);

/// QFI formula applied directly to (1 - q) rho0 + q I/2.
double qfi_depolarized_direct(const DensityMatrix2& rho0, const Matrix2c& generator, double q);

}  // namespace erasure
