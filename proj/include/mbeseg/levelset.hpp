#pragma once
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mbeseg/field.hpp"

namespace mbeseg {

struct DiracSpec {
  enum class Kind { compact, rational };
  Kind kind = Kind::rational;
  double epsilon = 1.0;
};

// Sharp Heaviside with H(0) = 1: the zero level set belongs to the interior.
inline double heaviside_sharp(double p) { return p >= 0.0 ? 1.0 : 0.0; }

// Smoothed Dirac delta.
//   compact:  (1/2eps)(1 + cos(pi p / eps)) on |p| <= eps, 0 outside
//   rational: (1/pi) eps / (eps^2 + p^2)
double dirac(double p, const DiracSpec& spec);

// Antiderivative of dirac() normalized to 0 at -inf and 1 at +inf
// (a smooth Heaviside; arctan form for the rational kind).
double dirac_antiderivative(double p, const DiracSpec& spec);

struct InitSpec {
  enum class Shape { rectangle, disk, mask };
  enum class Mode { binary_step, signed_distance };

  Shape shape = Shape::disk;
  Mode mode = Mode::binary_step;

  // rectangle: pixel centers with x0 <= i <= x1 and y0 <= j <= y1
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  // disk: (i - cx)^2 + (j - cy)^2 <= radius^2
  double cx = 0, cy = 0, radius = 0;
  // mask: 8-bit grayscale image, nonzero = interior; must match grid size
  std::string mask_path;

  // binary_step magnitude c: phi = +c inside, -c outside
  double step = 2.0;
};

// Builds the initial level set on a width x height grid. Interior is phi > 0.
// signed_distance mode: phi = +(d - 1/2) inside and -(d - 1/2) outside, where
// d is the exact Euclidean distance (periodic metric) to the nearest pixel of
// the opposite region, so interface-adjacent pixels carry +-1/2 and
// |grad phi| <= sqrt(2) holds discretely.
ScalarField2D init_level_set(int width, int height, const InitSpec& spec);

struct Polyline {
  std::vector<std::array<double, 2>> pts;
  bool closed = false;
  double length() const;
};

// Marching squares over the (width-1) x (height-1) interior cells (no wrap
// cells, so open curves terminate at the grid frame). Vertices lie on cell
// edges at the linear-interpolation zero; saddle cells are split by the sign
// of the cell average.
std::vector<Polyline> extract_zero_contour(const ScalarField2D& phi);

// {H(phi), 1 - H(phi)} with the sharp Heaviside.
std::pair<ScalarField2D, ScalarField2D> region_masks(const ScalarField2D& phi);

} // namespace mbeseg
