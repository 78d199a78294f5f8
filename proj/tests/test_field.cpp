#include <cmath>
#include <random>

#include "doctest.h"
#include "mbeseg/field.hpp"

using namespace mbeseg;

namespace {

ScalarField2D random_field(int w, int h, std::uint64_t seed, double lo = -1.0,
                           double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField2D f(w, h);
  for (double& x : f.v) x = dist(rng);
  return f;
}

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

} // namespace

TEST_CASE("one-sided differences match direct index arithmetic with wrap") {
  ScalarField2D f = random_field(5, 4, 11);
  ScalarField2D fx = diff_forward(f, Axis::x);
  ScalarField2D bx = diff_backward(f, Axis::x);
  ScalarField2D cy = diff_central(f, Axis::y);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 5; ++i) {
      CHECK(fx(i, j) == doctest::Approx(f(wrap(i + 1, 5), j) - f(i, j)).epsilon(1e-15));
      CHECK(bx(i, j) == doctest::Approx(f(i, j) - f(wrap(i - 1, 5), j)).epsilon(1e-15));
      CHECK(cy(i, j) ==
            doctest::Approx(0.5 * (f(i, wrap(j + 1, 4)) - f(i, wrap(j - 1, 4))))
                .epsilon(1e-15));
    }
}

TEST_CASE("forward and backward differences are negative adjoints") {
  ScalarField2D f = random_field(8, 8, 21);
  ScalarField2D g = random_field(8, 8, 22);
  for (Axis ax : {Axis::x, Axis::y}) {
    const double lhs = field_inner(diff_forward(f, ax), g);
    const double rhs = -field_inner(f, diff_backward(g, ax));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
}

TEST_CASE("central divergence is the negative adjoint of the central gradient") {
  ScalarField2D f = random_field(9, 7, 31);
  VectorField2D w(9, 7);
  w.x = random_field(9, 7, 32);
  w.y = random_field(9, 7, 33);
  VectorField2D gr = gradient_central(f);
  const double lhs = field_inner(divergence_central(w), f);
  const double rhs = -(field_inner(w.x, gr.x) + field_inner(w.y, gr.y));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("laplacian is the backward divergence of forward differences") {
  ScalarField2D f = random_field(8, 6, 41);
  ScalarField2D lap = laplacian(f);
  ScalarField2D composed(8, 6);
  for (Axis ax : {Axis::x, Axis::y}) {
    ScalarField2D d = diff_backward(diff_forward(f, ax), ax);
    for (std::size_t k = 0; k < composed.v.size(); ++k) composed.v[k] += d.v[k];
  }
  for (std::size_t k = 0; k < lap.v.size(); ++k)
    CHECK(lap.v[k] == doctest::Approx(composed.v[k]).epsilon(1e-14));
}

TEST_CASE("biharmonic equals the 13-point wide stencil") {
  ScalarField2D f = random_field(8, 8, 51);
  ScalarField2D bi = biharmonic(f);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      const double expect =
          20.0 * f(i, j) -
          8.0 * (f.wrapped(i + 1, j) + f.wrapped(i - 1, j) + f.wrapped(i, j + 1) +
                 f.wrapped(i, j - 1)) +
          2.0 * (f.wrapped(i + 1, j + 1) + f.wrapped(i + 1, j - 1) +
                 f.wrapped(i - 1, j + 1) + f.wrapped(i - 1, j - 1)) +
          (f.wrapped(i + 2, j) + f.wrapped(i - 2, j) + f.wrapped(i, j + 2) +
           f.wrapped(i, j - 2));
      CHECK(bi(i, j) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("gradient magnitude honors the floor") {
  ScalarField2D f(6, 6, 3.5); // constant, raw magnitude zero everywhere
  ScalarField2D raw = gradient_magnitude(f, 0.0);
  ScalarField2D floored = gradient_magnitude(f, 1e-8);
  for (std::size_t k = 0; k < f.v.size(); ++k) {
    CHECK(raw.v[k] == 0.0);
    CHECK(floored.v[k] == 1e-8);
  }
}

TEST_CASE("gaussian convolution matches the periodic double sum") {
  const double sigma = 1.3;
  const int R = static_cast<int>(std::ceil(4.0 * sigma));
  ScalarField2D f = random_field(9, 8, 61, 0.0, 255.0);
  ScalarField2D got = convolve_gaussian(f, sigma);

  // explicit 2D kernel over the truncation window, normalized to unit sum
  std::vector<double> k2((2 * R + 1) * (2 * R + 1));
  double total = 0.0;
  for (int dy = -R; dy <= R; ++dy)
    for (int dx = -R; dx <= R; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k2[(dy + R) * (2 * R + 1) + (dx + R)] = w;
      total += w;
    }
  for (double& w : k2) w /= total;

  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 9; ++i) {
      double acc = 0.0;
      for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx)
          acc += k2[(dy + R) * (2 * R + 1) + (dx + R)] * f.wrapped(i + dx, j + dy);
      CHECK(got(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("gaussian convolution preserves constants and the mean") {
  ScalarField2D c(12, 10, 7.25);
  ScalarField2D got = convolve_gaussian(c, 2.0);
  for (double x : got.v) CHECK(x == doctest::Approx(7.25).epsilon(1e-14));

  ScalarField2D f = random_field(12, 10, 71, 0.0, 10.0);
  CHECK(field_sum(convolve_gaussian(f, 2.0)) ==
        doctest::Approx(field_sum(f)).epsilon(1e-12));
}

TEST_CASE("reductions") {
  ScalarField2D f(2, 2);
  f.v = {1.0, -2.0, 3.0, -4.5};
  CHECK(field_sum(f) == doctest::Approx(-2.5));
  CHECK(field_max_abs(f) == 4.5);
  ScalarField2D g(2, 2);
  g.v = {2.0, 1.0, 0.0, 2.0};
  CHECK(field_inner(f, g) == doctest::Approx(1.0 * 2 - 2.0 * 1 + 0 - 9.0));
}

TEST_CASE("operators reject grids smaller than 4x4") {
  ScalarField2D tiny(3, 5, 1.0);
  CHECK_THROWS_AS(laplacian(tiny), Error);
  CHECK_THROWS_AS(diff_forward(tiny, Axis::x), Error);
  CHECK_THROWS_AS(convolve_gaussian(tiny, 1.0), Error);
  try {
    biharmonic(tiny);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_grid);
  }
  // the container itself stays usable below the operator minimum
  ScalarField2D small(2, 2, 0.0);
  CHECK(small.size() == 4);
}
