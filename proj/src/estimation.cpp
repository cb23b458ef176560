#include "erasure/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "erasure/error.hpp"
#include "erasure/fisher.hpp"

namespace erasure {

PhaseEstimate mle_phase(const CountRecord& counts) {
  const double signal_shots = static_cast<double>(counts.n_plus + counts.n_minus);
  if (signal_shots == 0.0) {
    throw EstimationError("all counts erased");
  }
  const double shots = static_cast<double>(counts.shots());

  double contrast = 1.0;
  double q_for_fisher = counts.q;
  switch (counts.kind) {
    case ChannelKind::Erasure:
      q_for_fisher = static_cast<double>(counts.n_erasure) / shots;
      break;
    case ChannelKind::Depolarizing:
      contrast = 1.0 - counts.q;
      break;
    case ChannelKind::Dephasing:
      contrast = 1.0 - 2.0 * counts.q;
      break;
  }
  if (counts.kind != ChannelKind::Erasure) {
    if (!(counts.q >= 0.0 && counts.q <= 1.0)) {
      throw InvalidArgument("q must lie in [0, 1], got " + std::to_string(counts.q));
    }
    if (counts.n_erasure != 0) {
      throw InvalidArgument("erasure counts recorded for a channel without erasure detection");
    }
    if (std::abs(contrast) < 1e-12) {
      throw EstimationError("parameter unidentifiable: fringe contrast vanishes");
    }
  }

  const double p_plus = static_cast<double>(counts.n_plus) / signal_shots;
  const double argument = (2.0 * p_plus - 1.0) / contrast;

  PhaseEstimate est;
  est.at_boundary = argument <= -1.0 || argument >= 1.0;
  est.phi = std::acos(std::clamp(argument, -1.0, 1.0));
  const double info = fisher_analytic(counts.kind, q_for_fisher, est.phi);
  est.stderr_ = info > 0.0 ? 1.0 / std::sqrt(shots * info)
                           : std::numeric_limits<double>::infinity();
  return est;
}

namespace {

using Conic = Eigen::Matrix<double, 6, 1>;

double conic_value(const Conic& c, double x, double y) {
  return c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y + c[5];
}

// Conic in standardized coordinates u = (x - mx)/s, v = (y - my)/s rewritten in x, y.
Conic unstandardize(const Conic& k, double mx, double my, double s) {
  const double a = k[0] / (s * s);
  const double b = k[1] / (s * s);
  const double c = k[2] / (s * s);
  const double d = k[3] / s;
  const double e = k[4] / s;
  Conic out;
  out[0] = a;
  out[1] = b;
  out[2] = c;
  out[3] = -2.0 * a * mx - b * my + d;
  out[4] = -2.0 * c * my - b * mx + e;
  out[5] = a * mx * mx + b * mx * my + c * my * my - d * mx - e * my + k[5];
  return out;
}

}  // namespace

EllipseFitResult ellipse_fit(std::span<const ExcitationPair> points, std::size_t min_points) {
  if (min_points < kDefaultMinEllipsePoints) {
    throw InvalidArgument("an ellipse fit needs min_points >= 6");
  }
  if (points.size() < min_points) {
    throw InvalidArgument("ellipse fit needs at least " + std::to_string(min_points) +
                          " points, got " + std::to_string(points.size()));
  }
  const auto n = static_cast<Eigen::Index>(points.size());

  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    if (!std::isfinite(p.x_a) || !std::isfinite(p.x_b)) {
      throw InvalidArgument("non-finite point in ellipse fit input");
    }
    mx += p.x_a;
    my += p.x_b;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : points) {
    spread += (p.x_a - mx) * (p.x_a - mx) + (p.x_b - my) * (p.x_b - my);
  }
  const double s = std::sqrt(spread / (2.0 * static_cast<double>(n)));
  if (!(s > 0.0)) throw FitFailure("no ellipse: all points coincide");

  Eigen::MatrixXd quad(n, 3);
  Eigen::MatrixXd lin(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (points[static_cast<std::size_t>(i)].x_a - mx) / s;
    const double v = (points[static_cast<std::size_t>(i)].x_b - my) / s;
    quad.row(i) << u * u, u * v, v * v;
    lin.row(i) << u, v, 1.0;
  }
  const Eigen::Matrix3d s1 = quad.transpose() * quad;
  const Eigen::Matrix3d s2 = quad.transpose() * lin;
  const Eigen::Matrix3d s3 = lin.transpose() * lin;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> s3_eig(s3);
  if (s3_eig.eigenvalues()(0) <= 1e-12 * s3_eig.eigenvalues()(2)) {
    throw FitFailure("no ellipse: degenerate scatter (collinear points)");
  }
  const Eigen::Matrix3d t = -s3.ldlt().solve(s2.transpose());
  const Eigen::Matrix3d m = s1 + s2 * t;
  // Premultiply by the inverse of the 3x3 constraint block [[0,0,2],[0,-1,0],[2,0,0]].
  Eigen::Matrix3d reduced;
  reduced.row(0) = m.row(2) / 2.0;
  reduced.row(1) = -m.row(1);
  reduced.row(2) = m.row(0) / 2.0;

  const Eigen::EigenSolver<Eigen::Matrix3d> solver(reduced);
  const auto vectors = solver.eigenvectors();
  int best = -1;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d a = vectors.col(k).real();
    if (vectors.col(k).imag().norm() > 1e-9 * vectors.col(k).norm()) continue;
    const double constraint = 4.0 * a[0] * a[2] - a[1] * a[1];
    if (!(constraint > 0.0)) continue;
    const Eigen::Vector3d scaled = a / std::sqrt(constraint);
    const double residual = scaled.dot(m * scaled);
    if (residual < best_residual) {
      best_residual = residual;
      best = k;
    }
  }
  if (best < 0) throw FitFailure("no ellipse: no eigenvector satisfies 4AC - B^2 > 0");

  const Eigen::Vector3d a1 = vectors.col(best).real();
  const Eigen::Vector3d a2 = t * a1;
  Conic standardized;
  standardized << a1, a2;
  Conic conic = unstandardize(standardized, mx, my, s);
  conic.normalize();
  if (conic[0] < 0.0) conic = -conic;

  const double a = conic[0];
  const double b = conic[1];
  const double c = conic[2];
  const double det = 4.0 * a * c - b * b;
  if (!(det > 0.0)) throw FitFailure("no ellipse: fitted conic has B^2 - 4AC >= 0");

  EllipseFitResult out;
  std::copy(conic.data(), conic.data() + 6, out.conic.begin());
  out.phi_d = std::acos(std::clamp(-b / (2.0 * std::sqrt(a * c)), -1.0, 1.0));
  out.center_a = (b * conic[4] - 2.0 * c * conic[3]) / det;
  out.center_b = (b * conic[3] - 2.0 * a * conic[4]) / det;
  const double level = -conic_value(conic, out.center_a, out.center_b);
  if (!(level > 0.0)) throw FitFailure("no ellipse: fitted conic is imaginary");
  out.contrast_a = 2.0 * std::sqrt(4.0 * c * level / det);
  out.contrast_b = 2.0 * std::sqrt(4.0 * a * level / det);

  double sum_sq = 0.0;
  for (const auto& p : points) {
    const double r = conic_value(conic, p.x_a, p.x_b);
    sum_sq += r * r;
  }
  out.rms_residual = std::sqrt(sum_sq / static_cast<double>(n));
  out.points = points.size();
  return out;
}

namespace {

double jackknife_error(const std::vector<double>& replicates) {
  const double g = static_cast<double>(replicates.size());
  double mean = 0.0;
  for (double r : replicates) mean += r;
  mean /= g;
  double ss = 0.0;
  for (double r : replicates) ss += (r - mean) * (r - mean);
  return std::sqrt((g - 1.0) / g * ss);
}

}  // namespace

EllipseJackknife ellipse_fit_jackknife(std::span<const ExcitationPair> points,
                                       std::size_t blocks) {
  if (blocks < 2) throw InvalidArgument("jackknife needs at least 2 blocks");
  const std::size_t block_len = points.size() / blocks;
  if (block_len == 0) throw InvalidArgument("fewer points than jackknife blocks");

  EllipseJackknife out;
  out.fit = ellipse_fit(points);

  std::vector<double> phi;
  std::vector<double> c_a;
  std::vector<double> c_b;
  std::vector<ExcitationPair> kept;
  kept.reserve(points.size());
  for (std::size_t j = 0; j < blocks; ++j) {
    const std::size_t begin = j * block_len;
    const std::size_t end = j + 1 == blocks ? points.size() : begin + block_len;
    kept.clear();
    kept.insert(kept.end(), points.begin(), points.begin() + static_cast<std::ptrdiff_t>(begin));
    kept.insert(kept.end(), points.begin() + static_cast<std::ptrdiff_t>(end), points.end());
    const auto fit = ellipse_fit(kept);
    phi.push_back(fit.phi_d);
    c_a.push_back(fit.contrast_a);
    c_b.push_back(fit.contrast_b);
  }
  out.phi_d_error = jackknife_error(phi);
  out.contrast_a_error = jackknife_error(c_a);
  out.contrast_b_error = jackknife_error(c_b);
  return out;
}

std::vector<std::optional<double>> phase_series_from_cycles(
    std::span<const ExcitationPair> cycles, std::size_t window, std::size_t min_points) {
  if (window < min_points) {
    throw InvalidArgument("window (" + std::to_string(window) + ") smaller than min_points (" +
                          std::to_string(min_points) + ")");
  }
  if (cycles.size() < 2 * window) {
    throw InvalidArgument("need at least two windows of cycles, got " +
                          std::to_string(cycles.size()) + " cycles for window " +
                          std::to_string(window));
  }
  std::vector<std::optional<double>> series;
  const std::size_t count = cycles.size() / window;
  series.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    try {
      series.emplace_back(ellipse_fit(cycles.subspan(w * window, window), min_points).phi_d);
    } catch (const FitFailure&) {
      series.emplace_back(std::nullopt);
    }
  }
  return series;
}

}  // namespace erasure
