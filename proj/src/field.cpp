#include "mbeseg/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mbeseg {

namespace {

inline int wrap(int i, int n) {
  int m = i % n;
  return m < 0 ? m + n : m;
}

void check_grid(const ScalarField2D& f, const char* op) {
  if (f.width < 4 || f.height < 4)
    fail(ErrorKind::invalid_grid,
         std::string(op) + ": grid must be at least 4x4, got " +
             std::to_string(f.width) + "x" + std::to_string(f.height));
  if (f.v.size() != static_cast<std::size_t>(f.width) * f.height)
    fail(ErrorKind::invalid_grid, std::string(op) + ": storage size mismatch");
}

void check_same(const ScalarField2D& a, const ScalarField2D& b, const char* op) {
  if (!a.same_shape(b))
    fail(ErrorKind::invalid_grid, std::string(op) + ": shape mismatch");
}

} // namespace

ScalarField2D::ScalarField2D(int w, int h, double fill)
    : width(w), height(h), v(static_cast<std::size_t>(w < 0 ? 0 : w) *
                                 (h < 0 ? 0 : h),
                             fill) {
  if (w <= 0 || h <= 0)
    fail(ErrorKind::invalid_grid, "ScalarField2D: nonpositive dimensions");
}

double ScalarField2D::wrapped(int i, int j) const {
  return (*this)(wrap(i, width), wrap(j, height));
}

ScalarField2D diff_forward(const ScalarField2D& f, Axis axis) {
  check_grid(f, "diff_forward");
  const int M = f.width, N = f.height;
  ScalarField2D out(M, N);
  if (axis == Axis::x) {
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < M - 1; ++i) out(i, j) = f(i + 1, j) - f(i, j);
      out(M - 1, j) = f(0, j) - f(M - 1, j);
    }
  } else {
    for (int j = 0; j < N; ++j) {
      const int jp = j + 1 == N ? 0 : j + 1;
      for (int i = 0; i < M; ++i) out(i, j) = f(i, jp) - f(i, j);
    }
  }
  return out;
}

ScalarField2D diff_backward(const ScalarField2D& f, Axis axis) {
  check_grid(f, "diff_backward");
  const int M = f.width, N = f.height;
  ScalarField2D out(M, N);
  if (axis == Axis::x) {
    for (int j = 0; j < N; ++j) {
      out(0, j) = f(0, j) - f(M - 1, j);
      for (int i = 1; i < M; ++i) out(i, j) = f(i, j) - f(i - 1, j);
    }
  } else {
    for (int j = 0; j < N; ++j) {
      const int jm = j == 0 ? N - 1 : j - 1;
      for (int i = 0; i < M; ++i) out(i, j) = f(i, j) - f(i, jm);
    }
  }
  return out;
}

ScalarField2D diff_central(const ScalarField2D& f, Axis axis) {
  check_grid(f, "diff_central");
  const int M = f.width, N = f.height;
  ScalarField2D out(M, N);
  if (axis == Axis::x) {
    for (int j = 0; j < N; ++j) {
      out(0, j) = 0.5 * (f(1, j) - f(M - 1, j));
      for (int i = 1; i < M - 1; ++i) out(i, j) = 0.5 * (f(i + 1, j) - f(i - 1, j));
      out(M - 1, j) = 0.5 * (f(0, j) - f(M - 2, j));
    }
  } else {
    for (int j = 0; j < N; ++j) {
      const int jp = j + 1 == N ? 0 : j + 1;
      const int jm = j == 0 ? N - 1 : j - 1;
      for (int i = 0; i < M; ++i) out(i, j) = 0.5 * (f(i, jp) - f(i, jm));
    }
  }
  return out;
}

VectorField2D gradient_central(const ScalarField2D& f) {
  VectorField2D g;
  g.x = diff_central(f, Axis::x);
  g.y = diff_central(f, Axis::y);
  return g;
}

ScalarField2D divergence_central(const VectorField2D& w) {
  check_same(w.x, w.y, "divergence_central");
  ScalarField2D dx = diff_central(w.x, Axis::x);
  ScalarField2D dy = diff_central(w.y, Axis::y);
  for (std::size_t k = 0; k < dx.v.size(); ++k) dx.v[k] += dy.v[k];
  return dx;
}

ScalarField2D laplacian(const ScalarField2D& f) {
  check_grid(f, "laplacian");
  const int M = f.width, N = f.height;
  ScalarField2D out(M, N);
  for (int j = 0; j < N; ++j) {
    const int jp = j + 1 == N ? 0 : j + 1;
    const int jm = j == 0 ? N - 1 : j - 1;
    for (int i = 0; i < M; ++i) {
      const int ip = i + 1 == M ? 0 : i + 1;
      const int im = i == 0 ? M - 1 : i - 1;
      out(i, j) = f(ip, j) + f(im, j) + f(i, jp) + f(i, jm) - 4.0 * f(i, j);
    }
  }
  return out;
}

ScalarField2D biharmonic(const ScalarField2D& f) { return laplacian(laplacian(f)); }

ScalarField2D gradient_magnitude(const ScalarField2D& f, double floor_value) {
  if (floor_value < 0.0)
    fail(ErrorKind::invalid_parameter, "gradient_magnitude: negative floor");
  VectorField2D g = gradient_central(f);
  ScalarField2D out(f.width, f.height);
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    double m = std::sqrt(g.x.v[k] * g.x.v[k] + g.y.v[k] * g.y.v[k]);
    out.v[k] = m < floor_value ? floor_value : m;
  }
  return out;
}

ScalarField2D convolve_gaussian(const ScalarField2D& f, double sigma) {
  check_grid(f, "convolve_gaussian");
  if (!(sigma > 0.0))
    fail(ErrorKind::invalid_parameter,
         "convolve_gaussian: sigma must be positive, got " + std::to_string(sigma));

  const int R = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * R + 1);
  double ksum = 0.0;
  for (int d = -R; d <= R; ++d) {
    k[d + R] = std::exp(-0.5 * d * d / (sigma * sigma));
    ksum += k[d + R];
  }
  for (double& w : k) w /= ksum;

  const int M = f.width, N = f.height;
  ScalarField2D mid(M, N), out(M, N);
  std::vector<double> buf;

  buf.resize(static_cast<std::size_t>(M) + 2 * R);
  for (int j = 0; j < N; ++j) {
    for (int t = 0; t < M + 2 * R; ++t) buf[t] = f(wrap(t - R, M), j);
    for (int i = 0; i < M; ++i) {
      double acc = 0.0;
      for (int d = -R; d <= R; ++d) acc += k[d + R] * buf[i + R - d];
      mid(i, j) = acc;
    }
  }

  buf.resize(static_cast<std::size_t>(N) + 2 * R);
  for (int i = 0; i < M; ++i) {
    for (int t = 0; t < N + 2 * R; ++t) buf[t] = mid(i, wrap(t - R, N));
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int d = -R; d <= R; ++d) acc += k[d + R] * buf[j + R - d];
      out(i, j) = acc;
    }
  }
  return out;
}

double field_sum(const ScalarField2D& f) {
  double s = 0.0;
  for (double x : f.v) s += x;
  return s;
}

double field_inner(const ScalarField2D& a, const ScalarField2D& b) {
  check_same(a, b, "field_inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s;
}

double field_max_abs(const ScalarField2D& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::fabs(x));
  return m;
}

} // namespace mbeseg
