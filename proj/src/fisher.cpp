#include "erasure/fisher.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "erasure/error.hpp"

namespace erasure {
namespace {

constexpr double kVanishingProbability = 1e-14;
constexpr double kVanishingSlope = 1e-10;
constexpr double kCurvatureStep = 1e-4;
constexpr double kMatrixTolerance = 1e-12;
constexpr double kDegeneracyGap = 1e-10;

void require_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("q must lie in [0, 1], got " + std::to_string(q));
  }
}

void require_q_below_one(double q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw InvalidArgument("depolarizing strength must lie in [0, 1), got " + std::to_string(q));
  }
}

// c^2 sin^2 / (1 - c^2 cos^2) with the denominator written as
// (1 - c^2) + c^2 sin^2 so it stays accurate near full contrast.
double fisher_for_contrast(double contrast, double delta) {
  const double c2 = contrast * contrast;
  if (c2 == 1.0) return 1.0;
  const double s2 = std::sin(delta) * std::sin(delta);
  const double denom = (1.0 - c2) + c2 * s2;
  if (denom <= 0.0) return 0.0;
  return c2 * s2 / denom;
}

}  // namespace

OutcomeModel sensing_model(ChannelKind kind, double q, double theta) {
  require_q(q);
  const MeasurementBasis basis(theta);
  const bool detect = kind == ChannelKind::Erasure;
  return [=](double phi) {
    const SensorState state = apply_noise(accumulate_phase(prepare_plus(), phi), kind, q);
    return measure_probs(state, basis, detect);
  };
}

double classical_fisher_numeric(const OutcomeModel& model, double phi, double step) {
  if (!(step > 0.0 && step <= 1e-2)) {
    throw InvalidArgument("finite-difference step must lie in (0, 1e-2], got " +
                          std::to_string(step));
  }
  const auto as_array = [](const OutcomeDistribution& d) {
    return std::array<double, 3>{d.p_plus, d.p_minus, d.p_erasure};
  };
  const auto center = as_array(model(phi));
  const auto up = as_array(model(phi + step));
  const auto down = as_array(model(phi - step));

  double total = 0.0;
  for (std::size_t x = 0; x < 3; ++x) {
    const double slope = (up[x] - down[x]) / (2.0 * step);
    if (center[x] >= kVanishingProbability) {
      total += slope * slope / center[x];
      continue;
    }
    if (std::abs(slope) >= kVanishingSlope) {
      throw SingularEvaluation("singular Fisher evaluation: outcome probability " +
                               std::to_string(center[x]) + " vanishes with slope " +
                               std::to_string(slope));
    }
    const double h = std::max(step, kCurvatureStep);
    const double hi = as_array(model(phi + h))[x];
    const double lo = as_array(model(phi - h))[x];
    const double curvature = (hi - 2.0 * center[x] + lo) / (h * h);
    total += 2.0 * std::max(curvature, 0.0);
  }
  return total;
}

double fisher_depolarizing(double q, double delta) {
  require_q(q);
  return fisher_for_contrast(1.0 - q, delta);
}

double fisher_dephasing(double q, double delta) {
  require_q(q);
  return fisher_for_contrast(1.0 - 2.0 * q, delta);
}

double fisher_erasure(double q, double /*delta*/) {
  require_q(q);
  return 1.0 - q;
}

double fisher_analytic(ChannelKind kind, double q, double delta) {
  switch (kind) {
    case ChannelKind::Depolarizing:
      return fisher_depolarizing(q, delta);
    case ChannelKind::Dephasing:
      return fisher_dephasing(q, delta);
    case ChannelKind::Erasure:
      return fisher_erasure(q, delta);
  }
  return 0.0;
}

double convexity_upper_bound(double q, double noiseless_qfi) {
  require_q(q);
  return (1.0 - q) * noiseless_qfi;
}

Matrix2c pauli_x() {
  Matrix2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2c pauli_y() {
  const std::complex<double> i(0.0, 1.0);
  Matrix2c m;
  m << 0.0, -i, i, 0.0;
  return m;
}

Matrix2c pauli_z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

DensityMatrix2::DensityMatrix2(const Matrix2c& m) : m_(m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kMatrixTolerance) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - 1.0) > kMatrixTolerance) {
    throw InvalidArgument("density matrix trace differs from 1");
  }
  const auto eig = eigen_hermitian2(m);
  if (eig.values[0] < -kMatrixTolerance || eig.values[1] > 1.0 + kMatrixTolerance) {
    throw InvalidArgument("density matrix eigenvalues outside [0, 1]");
  }
}

DensityMatrix2 DensityMatrix2::from_bloch(const std::array<double, 3>& r) {
  const Matrix2c m =
      0.5 * (Matrix2c::Identity() + r[0] * pauli_x() + r[1] * pauli_y() + r[2] * pauli_z());
  return DensityMatrix2(m);
}

DensityMatrix2 DensityMatrix2::pure(std::complex<double> a0, std::complex<double> a1) {
  Eigen::Vector2cd psi(a0, a1);
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidArgument("zero state vector");
  psi /= norm;
  return DensityMatrix2(psi * psi.adjoint());
}

double DensityMatrix2::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix2 DensityMatrix2::depolarized(double q) const {
  require_q(q);
  return DensityMatrix2((1.0 - q) * m_ + 0.5 * q * Matrix2c::Identity());
}

HermitianEigen2 eigen_hermitian2(const Matrix2c& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const std::complex<double> b = m(0, 1);
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, std::abs(b));

  HermitianEigen2 out;
  out.values = {mean - radius, mean + radius};
  for (int k = 0; k < 2; ++k) {
    const double lambda = out.values[k];
    // Two candidate null vectors of (m - lambda I); take the better conditioned one.
    Eigen::Vector2cd u(b, lambda - a);
    Eigen::Vector2cd v(lambda - d, std::conj(b));
    Eigen::Vector2cd w = u.norm() >= v.norm() ? u : v;
    if (w.norm() == 0.0) {
      // m is a multiple of the identity; any orthonormal basis works.
      w = k == 0 ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
    }
    out.vectors[k] = w.normalized();
  }
  return out;
}

double qfi_pure_generator(const DensityMatrix2& rho0, const Matrix2c& generator) {
  if ((generator - generator.adjoint()).cwiseAbs().maxCoeff() > kMatrixTolerance) {
    throw InvalidArgument("generator is not Hermitian");
  }
  const auto eig = eigen_hermitian2(rho0.matrix());
  if (eig.values[1] - eig.values[0] < kDegeneracyGap) {
    throw SingularEvaluation("QFI formula undefined at degenerate input");
  }
  const std::complex<double> element =
      eig.vectors[0].adjoint() * generator * eig.vectors[1];
  return 4.0 * (2.0 * rho0.purity() - 1.0) * std::norm(element);
}

double qfi_depolarized(const DensityMatrix2& rho0, const Matrix2c& generator, double q) {
  require_q_below_one(q);
  const double scale = (1.0 - q) * (1.0 - q);
  return scale * qfi_pure_generator(rho0, generator);
}

double qfi_depolarized_direct(const DensityMatrix2& rho0, const Matrix2c& generator, double q) {
  require_q_below_one(q);
  return qfi_pure_generator(rho0.depolarized(q), generator);
}

}  // namespace erasure
