#pragma once
#include <cstdint>
#include <string>

#include "mbeseg/field.hpp"

namespace mbeseg {

struct FixtureSpec {
  enum class Kind { two_shapes, ring, star_corners, blurred_boundary };
  enum class Bias { none, linear, radial_gaussian };

  Kind kind = Kind::ring;
  int width = 128, height = 128;

  double foreground = 170.0;
  double background = 85.0;

  // ring
  double inner_radius = 24.0;
  double outer_radius = 44.0;
  // blurred_boundary
  double blur_sigma = 3.0;

  Bias bias = Bias::none;
  double bias_gain = 0.3;       // linear: I *= 1 + gain (i - (M-1)/2)/(M-1)
  double bias_amplitude = 0.3;  // radial_gaussian: I *= 1 - A exp(-rho^2/2 sb^2)
  double bias_sigma = 0.0;      // 0 -> 0.35 min(M, N)

  double noise_std = 0.0;       // additive Gaussian, counter-based, no clamping
  std::uint64_t seed = 0;
};

struct Fixture {
  ScalarField2D image;      // 0..255 scale before bias/noise, real-valued after
  ScalarField2D truth_mask; // {0,1}, unaffected by bias/noise/blur
};

Fixture generate(const FixtureSpec& spec);

// Overlap scores for {0,1} masks; empty-vs-empty scores 1. Non-binary input
// raises an invalid-mask error.
double dice(const ScalarField2D& a, const ScalarField2D& b);
double iou(const ScalarField2D& a, const ScalarField2D& b);

} // namespace mbeseg
