#pragma once
#include <cstddef>
#include <vector>

#include "mbeseg/error.hpp"

namespace mbeseg {

enum class Axis { x, y };

// Scalar samples on a width x height periodic grid with unit spacing,
// row-major: index (i, j) -> j * width + i, i running along x.
struct ScalarField2D {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  ScalarField2D() = default;
  ScalarField2D(int w, int h, double fill = 0.0);

  double& operator()(int i, int j) {
    return v[static_cast<std::size_t>(j) * width + i];
  }
  double operator()(int i, int j) const {
    return v[static_cast<std::size_t>(j) * width + i];
  }
  // Periodic fetch; accepts any integer offsets.
  double wrapped(int i, int j) const;

  std::size_t size() const { return v.size(); }
  bool same_shape(const ScalarField2D& o) const {
    return width == o.width && height == o.height;
  }
};

struct VectorField2D {
  ScalarField2D x, y;
  VectorField2D() = default;
  VectorField2D(int w, int h) : x(w, h), y(w, h) {}
};

// One-sided and central differences on the periodic grid (h = 1).
ScalarField2D diff_forward(const ScalarField2D& f, Axis axis);
ScalarField2D diff_backward(const ScalarField2D& f, Axis axis);
ScalarField2D diff_central(const ScalarField2D& f, Axis axis);

VectorField2D gradient_central(const ScalarField2D& f);
ScalarField2D divergence_central(const VectorField2D& w);

// Five-point Laplacian (forward-of-backward per axis) and its square.
ScalarField2D laplacian(const ScalarField2D& f);
ScalarField2D biharmonic(const ScalarField2D& f);

// |grad f| from central differences; values below floor_value are clamped
// up to it (pass 0 for the raw magnitude).
ScalarField2D gradient_magnitude(const ScalarField2D& f, double floor_value);

// Periodic Gaussian smoothing, separable, truncated at radius ceil(4 sigma)
// per axis, kernel normalized to unit sum.
ScalarField2D convolve_gaussian(const ScalarField2D& f, double sigma);

// Deterministic left-to-right reductions.
double field_sum(const ScalarField2D& f);
double field_inner(const ScalarField2D& a, const ScalarField2D& b);
double field_max_abs(const ScalarField2D& f);

} // namespace mbeseg
