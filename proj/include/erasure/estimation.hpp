#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erasure/states.hpp"

namespace erasure {

struct CountRecord {
  std::uint64_t n_plus = 0;
  std::uint64_t n_minus = 0;
  std::uint64_t n_erasure = 0;
  double theta = 0.0;
  ChannelKind kind = ChannelKind::Erasure;
  // Known noise strength. Ignored for erasure, where the erased fraction is
  // observed directly.
  double q = 0.0;

  std::uint64_t shots() const { return n_plus + n_minus + n_erasure; }
};

struct PhaseEstimate {
  /// Estimate of the offset phi - theta folded into [0, pi]; equals phi when
  /// theta = 0.
  double phi = 0.0;
  /// 1 / sqrt(shots * F) at the estimate; infinite where F vanishes.
  double stderr_ = 0.0;
  /// The cosine argument fell outside [-1, 1] and was clamped.
  bool at_boundary = false;
};

/// Inverts the fringe for phi. Erased shots are excluded from the signal.
/// Throws EstimationError when every shot was erased, or when the contrast
/// vanishes (depolarizing q = 1, dephasing q = 1/2).
PhaseEstimate mle_phase(const CountRecord& counts);

struct ExcitationPair {
  double x_a = 0.0;
  double x_b = 0.0;
};

struct EllipseFitResult {
  /// A x^2 + B xy + C y^2 + D x + E y + F = 0, unit norm, A > 0.
  std::array<double, 6> conic{};
  /// Differential phase magnitude in [0, pi] from cos(phi_d) = -B / (2 sqrt(AC)).
  double phi_d = 0.0;
  double contrast_a = 0.0;
  double contrast_b = 0.0;
  double center_a = 0.0;
  double center_b = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

inline constexpr std::size_t kDefaultMinEllipsePoints = 6;

/// Ellipse-specific direct least squares: minimizes the algebraic residual
/// subject to 4AC - B^2 = 1, solved as a reduced 3x3 generalized eigenproblem.
/// Throws InvalidArgument with fewer than `min_points` points and FitFailure
/// ("no ellipse") for degenerate scatter or a non-elliptic conic.
EllipseFitResult ellipse_fit(std::span<const ExcitationPair> points,
                             std::size_t min_points = kDefaultMinEllipsePoints);

struct EllipseJackknife {
  EllipseFitResult fit;
  double phi_d_error = 0.0;
  double contrast_a_error = 0.0;
  double contrast_b_error = 0.0;
};

/// Full-sample fit with delete-one-block jackknife errors over `blocks`
/// contiguous blocks of points.
EllipseJackknife ellipse_fit_jackknife(std::span<const ExcitationPair> points,
                                       std::size_t blocks = 20);

/// One phi_d per non-overlapping window of `window` cycles; a trailing partial
/// window is dropped. Windows whose fit fails are returned as gaps.
std::vector<std::optional<double>> phase_series_from_cycles(
    std::span<const ExcitationPair> cycles, std::size_t window,
    std::size_t min_points = kDefaultMinEllipsePoints);

}  // namespace erasure
