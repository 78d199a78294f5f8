#include "mbeseg/bench.hpp"

#include <array>
#include <cmath>
#include <string>

namespace mbeseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Counter-based generator: value k of a stream is a pure function of
// (seed, k), so pixels can be filled in any order with identical results.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double unit_open(std::uint64_t seed, std::uint64_t ctr) {
  const std::uint64_t bits = mix64(seed + (ctr + 1) * 0x9E3779B97F4A7C15ull);
  return ((bits >> 11) + 1) * 0x1.0p-53; // in (0, 1]
}

inline double gauss(std::uint64_t seed, std::uint64_t k) {
  const double u1 = unit_open(seed, 2 * k);
  const double u2 = unit_open(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

struct StarShape {
  double cx, cy;
  std::array<double, 10> px, py;
  StarShape(double cx_, double cy_, double r_out, double r_in) : cx(cx_), cy(cy_) {
    for (int k = 0; k < 10; ++k) {
      const double r = k % 2 == 0 ? r_out : r_in;
      const double th = -kPi / 2.0 + k * kPi / 5.0;
      px[k] = cx + r * std::cos(th);
      py[k] = cy + r * std::sin(th);
    }
  }
  bool contains(double x, double y) const {
    bool in = false;
    for (int k = 0, m = 9; k < 10; m = k++) {
      if ((py[k] > y) != (py[m] > y) &&
          x < (px[m] - px[k]) * (y - py[k]) / (py[m] - py[k]) + px[k])
        in = !in;
    }
    return in;
  }
};

} // namespace

Fixture generate(const FixtureSpec& spec) {
  const int W = spec.width, H = spec.height;
  if (W < 4 || H < 4)
    fail(ErrorKind::invalid_fixture, "fixture: grid must be at least 4x4");
  if (spec.foreground == spec.background)
    fail(ErrorKind::invalid_fixture, "fixture: foreground equals background");
  if (spec.noise_std < 0.0)
    fail(ErrorKind::invalid_fixture, "fixture: noise_std must be >= 0");

  const double cx = (W - 1) / 2.0, cy = (H - 1) / 2.0;
  const double mind = std::min(W, H);

  Fixture fx;
  fx.truth_mask = ScalarField2D(W, H);

  switch (spec.kind) {
    case FixtureSpec::Kind::two_shapes: {
      const double dcx = 0.32 * W, dcy = 0.34 * H, dr = 0.16 * mind;
      const double rx0 = 0.55 * W, rx1 = 0.84 * W, ry0 = 0.52 * H, ry1 = 0.82 * H;
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
          const double ddx = i - dcx, ddy = j - dcy;
          const bool in = ddx * ddx + ddy * ddy <= dr * dr ||
                          (i >= rx0 && i <= rx1 && j >= ry0 && j <= ry1);
          fx.truth_mask(i, j) = in ? 1.0 : 0.0;
        }
      break;
    }
    case FixtureSpec::Kind::ring: {
      const double ri = spec.inner_radius, ro = spec.outer_radius;
      if (!(ri > 0.0) || !(ro > ri))
        fail(ErrorKind::invalid_fixture, "fixture: ring needs 0 < inner < outer");
      if (ro > std::min(cx, cy))
        fail(ErrorKind::invalid_fixture, "fixture: ring outer radius exceeds grid");
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
          const double d2 = (i - cx) * (i - cx) + (j - cy) * (j - cy);
          fx.truth_mask(i, j) = d2 <= ro * ro && d2 > ri * ri ? 1.0 : 0.0;
        }
      break;
    }
    case FixtureSpec::Kind::star_corners: {
      const StarShape star(cx, cy, 0.38 * mind, 0.16 * mind);
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i)
          fx.truth_mask(i, j) = star.contains(i, j) ? 1.0 : 0.0;
      break;
    }
    case FixtureSpec::Kind::blurred_boundary: {
      const double a = 0.30 * W, b = 0.22 * H;
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
          const double ex = (i - cx) / a, ey = (j - cy) / b;
          fx.truth_mask(i, j) = ex * ex + ey * ey <= 1.0 ? 1.0 : 0.0;
        }
      break;
    }
  }

  fx.image = ScalarField2D(W, H);
  for (std::size_t k = 0; k < fx.image.v.size(); ++k)
    fx.image.v[k] =
        fx.truth_mask.v[k] != 0.0 ? spec.foreground : spec.background;

  if (spec.kind == FixtureSpec::Kind::blurred_boundary) {
    if (!(spec.blur_sigma > 0.0))
      fail(ErrorKind::invalid_fixture, "fixture: blur_sigma must be positive");
    fx.image = convolve_gaussian(fx.image, spec.blur_sigma);
  }

  switch (spec.bias) {
    case FixtureSpec::Bias::none:
      break;
    case FixtureSpec::Bias::linear: {
      if (!(std::fabs(spec.bias_gain) < 1.0))
        fail(ErrorKind::invalid_fixture, "fixture: |bias_gain| must be < 1");
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i)
          fx.image(i, j) *= 1.0 + spec.bias_gain * (i - cx) / (W - 1);
      break;
    }
    case FixtureSpec::Bias::radial_gaussian: {
      if (!(spec.bias_amplitude >= 0.0) || !(spec.bias_amplitude < 1.0))
        fail(ErrorKind::invalid_fixture, "fixture: bias_amplitude must be in [0,1)");
      const double sb = spec.bias_sigma > 0.0 ? spec.bias_sigma : 0.35 * mind;
      for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
          const double d2 = (i - cx) * (i - cx) + (j - cy) * (j - cy);
          fx.image(i, j) *=
              1.0 - spec.bias_amplitude * std::exp(-0.5 * d2 / (sb * sb));
        }
      break;
    }
  }

  if (spec.noise_std > 0.0)
    for (std::size_t k = 0; k < fx.image.v.size(); ++k)
      fx.image.v[k] += spec.noise_std * gauss(spec.seed, k);

  return fx;
}

namespace {

void check_mask(const ScalarField2D& m, const char* op) {
  for (double x : m.v)
    if (x != 0.0 && x != 1.0)
      fail(ErrorKind::invalid_mask,
           std::string(op) + ": mask values must be exactly 0 or 1");
}

} // namespace

double dice(const ScalarField2D& a, const ScalarField2D& b) {
  if (!a.same_shape(b))
    fail(ErrorKind::invalid_parameter, "dice: mask sizes differ");
  check_mask(a, "dice");
  check_mask(b, "dice");
  std::size_t na = 0, nb = 0, nab = 0;
  for (std::size_t k = 0; k < a.v.size(); ++k) {
    na += a.v[k] != 0.0;
    nb += b.v[k] != 0.0;
    nab += a.v[k] != 0.0 && b.v[k] != 0.0;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(nab) / static_cast<double>(na + nb);
}

double iou(const ScalarField2D& a, const ScalarField2D& b) {
  if (!a.same_shape(b))
    fail(ErrorKind::invalid_parameter, "iou: mask sizes differ");
  check_mask(a, "iou");
  check_mask(b, "iou");
  std::size_t ni = 0, nu = 0;
  for (std::size_t k = 0; k < a.v.size(); ++k) {
    const bool va = a.v[k] != 0.0, vb = b.v[k] != 0.0;
    ni += va && vb;
    nu += va || vb;
  }
  if (nu == 0) return 1.0;
  return static_cast<double>(ni) / static_cast<double>(nu);
}

} // namespace mbeseg
