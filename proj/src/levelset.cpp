#include "mbeseg/levelset.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mbeseg/image_io.hpp"

namespace mbeseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_dirac(const DiracSpec& spec) {
  if (!(spec.epsilon > 0.0))
    fail(ErrorKind::invalid_parameter, "dirac: epsilon must be positive");
}

} // namespace

double dirac(double p, const DiracSpec& spec) {
  check_dirac(spec);
  const double eps = spec.epsilon;
  if (spec.kind == DiracSpec::Kind::compact) {
    if (std::fabs(p) > eps) return 0.0;
    return (1.0 + std::cos(kPi * p / eps)) / (2.0 * eps);
  }
  return eps / (kPi * (eps * eps + p * p));
}

double dirac_antiderivative(double p, const DiracSpec& spec) {
  check_dirac(spec);
  const double eps = spec.epsilon;
  if (spec.kind == DiracSpec::Kind::compact) {
    if (p <= -eps) return 0.0;
    if (p >= eps) return 1.0;
    return 0.5 * (1.0 + p / eps + std::sin(kPi * p / eps) / kPi);
  }
  return 0.5 + std::atan(p / eps) / kPi;
}

// ---------- initialization ----------

namespace {

std::vector<char> rasterize_init(int w, int h, const InitSpec& spec) {
  std::vector<char> inside(static_cast<std::size_t>(w) * h, 0);
  switch (spec.shape) {
    case InitSpec::Shape::rectangle: {
      if (!(spec.x0 <= spec.x1) || !(spec.y0 <= spec.y1))
        fail(ErrorKind::invalid_parameter, "init: rectangle corners out of order");
      if (spec.x0 < 0 || spec.y0 < 0 || spec.x1 > w - 1 || spec.y1 > h - 1)
        fail(ErrorKind::invalid_parameter, "init: rectangle outside grid bounds");
      for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i)
          if (i >= spec.x0 && i <= spec.x1 && j >= spec.y0 && j <= spec.y1)
            inside[static_cast<std::size_t>(j) * w + i] = 1;
      break;
    }
    case InitSpec::Shape::disk: {
      if (!(spec.radius > 0.0))
        fail(ErrorKind::invalid_parameter, "init: disk radius must be positive");
      if (spec.cx - spec.radius < 0 || spec.cx + spec.radius > w - 1 ||
          spec.cy - spec.radius < 0 || spec.cy + spec.radius > h - 1)
        fail(ErrorKind::invalid_parameter, "init: disk outside grid bounds");
      const double r2 = spec.radius * spec.radius;
      for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
          const double dx = i - spec.cx, dy = j - spec.cy;
          if (dx * dx + dy * dy <= r2)
            inside[static_cast<std::size_t>(j) * w + i] = 1;
        }
      break;
    }
    case InitSpec::Shape::mask: {
      ScalarField2D m = load_mask_image(spec.mask_path);
      if (m.width != w || m.height != h)
        fail(ErrorKind::invalid_parameter,
             "init: mask size " + std::to_string(m.width) + "x" +
                 std::to_string(m.height) + " does not match grid " +
                 std::to_string(w) + "x" + std::to_string(h));
      for (std::size_t k = 0; k < m.v.size(); ++k)
        inside[k] = m.v[k] != 0.0 ? 1 : 0;
      break;
    }
  }
  return inside;
}

// 1D squared distance transform (lower envelope of parabolas).
void dt1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -1e30;
  z[1] = 1e30;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = 1e30;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

// Squared EDT of grid cost (0 on sites, large elsewhere), in place.
void edt2(std::vector<double>& g, int w, int h) {
  std::vector<double> f(std::max(w, h)), d(std::max(w, h)), z(std::max(w, h) + 1);
  std::vector<int> v(std::max(w, h));
  for (int j = 0; j < h; ++j) {
    double* row = g.data() + static_cast<std::size_t>(j) * w;
    dt1d(row, f.data(), w, v.data(), z.data());
    for (int i = 0; i < w; ++i) row[i] = f[i];
  }
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < h; ++j) f[j] = g[static_cast<std::size_t>(j) * w + i];
    dt1d(f.data(), d.data(), h, v.data(), z.data());
    for (int j = 0; j < h; ++j) g[static_cast<std::size_t>(j) * w + i] = d[j];
  }
}

// Exact periodic distance to the nearest marked pixel, via a 3x3 tiling (a
// nearest neighbor on the torus is at most half a period away per axis).
std::vector<double> periodic_edt(const std::vector<char>& marked, int w, int h) {
  const int W = 3 * w, H = 3 * h;
  std::vector<double> g(static_cast<std::size_t>(W) * H);
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i)
      g[static_cast<std::size_t>(j) * W + i] =
          marked[static_cast<std::size_t>(j % h) * w + i % w] ? 0.0 : 1e20;
  edt2(g, W, H);
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i)
      out[static_cast<std::size_t>(j) * w + i] =
          std::sqrt(g[static_cast<std::size_t>(j + h) * W + (i + w)]);
  return out;
}

} // namespace

ScalarField2D init_level_set(int width, int height, const InitSpec& spec) {
  if (width < 4 || height < 4)
    fail(ErrorKind::invalid_grid, "init_level_set: grid must be at least 4x4");
  if (!(spec.step > 0.0))
    fail(ErrorKind::invalid_parameter, "init: step must be positive");

  const std::vector<char> inside = rasterize_init(width, height, spec);
  std::size_t count = 0;
  for (char c : inside) count += c != 0;
  if (count == 0 || count == inside.size())
    fail(ErrorKind::degenerate_init,
         count == 0 ? "init: interior region is empty"
                    : "init: interior region covers the whole grid");

  ScalarField2D phi(width, height);
  if (spec.mode == InitSpec::Mode::binary_step) {
    for (std::size_t k = 0; k < inside.size(); ++k)
      phi.v[k] = inside[k] ? spec.step : -spec.step;
    return phi;
  }

  std::vector<char> outside(inside.size());
  for (std::size_t k = 0; k < inside.size(); ++k) outside[k] = !inside[k];
  const std::vector<double> d_out = periodic_edt(outside, width, height);
  const std::vector<double> d_in = periodic_edt(inside, width, height);
  for (std::size_t k = 0; k < inside.size(); ++k)
    phi.v[k] = inside[k] ? d_out[k] - 0.5 : -(d_in[k] - 0.5);
  return phi;
}

// ---------- zero contour ----------

double Polyline::length() const {
  double s = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    s += std::hypot(pts[k][0] - pts[k - 1][0], pts[k][1] - pts[k - 1][1]);
  if (closed && pts.size() > 2)
    s += std::hypot(pts.front()[0] - pts.back()[0], pts.front()[1] - pts.back()[1]);
  return s;
}

namespace {

struct Segment {
  long a, b; // global edge ids
};

// Edge ids: 2*(j*w + i) for the edge (i,j)-(i+1,j), +1 for (i,j)-(i,j+1).
inline long hedge(int i, int j, int w) { return 2L * (static_cast<long>(j) * w + i); }
inline long vedge(int i, int j, int w) { return 2L * (static_cast<long>(j) * w + i) + 1; }

} // namespace

std::vector<Polyline> extract_zero_contour(const ScalarField2D& phi) {
  if (phi.width < 4 || phi.height < 4)
    fail(ErrorKind::invalid_grid, "extract_zero_contour: grid must be at least 4x4");
  const int M = phi.width, N = phi.height;

  std::map<long, std::array<double, 2>> vert;
  auto crossing = [&](long id, int i0, int j0, int i1, int j1) {
    if (!vert.count(id)) {
      const double u = phi(i0, j0), v = phi(i1, j1);
      const double t = u / (u - v);
      vert[id] = {i0 + t * (i1 - i0), j0 + t * (j1 - j0)};
    }
    return id;
  };

  std::vector<Segment> segs;
  for (int j = 0; j < N - 1; ++j) {
    for (int i = 0; i < M - 1; ++i) {
      const double a = phi(i, j), b = phi(i + 1, j), c = phi(i + 1, j + 1),
                   d = phi(i, j + 1);
      const int code = (a >= 0 ? 1 : 0) | (b >= 0 ? 2 : 0) | (c >= 0 ? 4 : 0) |
                       (d >= 0 ? 8 : 0);
      if (code == 0 || code == 15) continue;

      auto E0 = [&] { return crossing(hedge(i, j, M), i, j, i + 1, j); };
      auto E1 = [&] { return crossing(vedge(i + 1, j, M), i + 1, j, i + 1, j + 1); };
      auto E2 = [&] { return crossing(hedge(i, j + 1, M), i, j + 1, i + 1, j + 1); };
      auto E3 = [&] { return crossing(vedge(i, j, M), i, j, i, j + 1); };

      switch (code) {
        case 1:  segs.push_back({E3(), E0()}); break;
        case 2:  segs.push_back({E0(), E1()}); break;
        case 4:  segs.push_back({E1(), E2()}); break;
        case 8:  segs.push_back({E2(), E3()}); break;
        case 3:  segs.push_back({E3(), E1()}); break;
        case 12: segs.push_back({E1(), E3()}); break;
        case 6:  segs.push_back({E0(), E2()}); break;
        case 9:  segs.push_back({E0(), E2()}); break;
        case 7:  segs.push_back({E2(), E3()}); break;
        case 11: segs.push_back({E1(), E2()}); break;
        case 13: segs.push_back({E0(), E1()}); break;
        case 14: segs.push_back({E3(), E0()}); break;
        case 5: // saddle: center sign picks the pairing
          if (a + b + c + d >= 0.0) {
            segs.push_back({E0(), E1()});
            segs.push_back({E2(), E3()});
          } else {
            segs.push_back({E3(), E0()});
            segs.push_back({E1(), E2()});
          }
          break;
        case 10:
          if (a + b + c + d >= 0.0) {
            segs.push_back({E3(), E0()});
            segs.push_back({E1(), E2()});
          } else {
            segs.push_back({E0(), E1()});
            segs.push_back({E2(), E3()});
          }
          break;
        default: break;
      }
    }
  }

  // Stitch segments into chains. Every crossing vertex touches at most two
  // segments, so chains are simple paths or simple cycles.
  std::map<long, std::array<int, 2>> adj; // edge id -> up to two segment indices
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    for (long e : {segs[s].a, segs[s].b}) {
      auto it = adj.find(e);
      if (it == adj.end())
        adj[e] = {s, -1};
      else
        it->second[1] = s;
    }
  }
  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> out;
  for (int s0 = 0; s0 < static_cast<int>(segs.size()); ++s0) {
    if (used[s0]) continue;
    used[s0] = 1;
    std::vector<long> chain = {segs[s0].a, segs[s0].b};
    bool closed = false;

    // extend past the back, then past the front
    for (int dir = 0; dir < 2; ++dir) {
      while (true) {
        const long tail = dir == 0 ? chain.back() : chain.front();
        const auto& p = adj[tail];
        int cand = -1;
        for (int s : {p[0], p[1]})
          if (s >= 0 && !used[s]) cand = s;
        if (cand < 0) break;
        used[cand] = 1;
        const long next = segs[cand].a == tail ? segs[cand].b : segs[cand].a;
        if (dir == 0)
          chain.push_back(next);
        else
          chain.insert(chain.begin(), next);
        if (chain.front() == chain.back()) {
          closed = true;
          chain.pop_back();
          break;
        }
      }
      if (closed) break;
    }

    Polyline pl;
    pl.closed = closed;
    pl.pts.reserve(chain.size());
    for (long e : chain) pl.pts.push_back(vert[e]);
    out.push_back(std::move(pl));
  }
  return out;
}

std::pair<ScalarField2D, ScalarField2D> region_masks(const ScalarField2D& phi) {
  ScalarField2D m1(phi.width, phi.height), m2(phi.width, phi.height);
  for (std::size_t k = 0; k < phi.v.size(); ++k) {
    m1.v[k] = heaviside_sharp(phi.v[k]);
    m2.v[k] = 1.0 - m1.v[k];
  }
  return {m1, m2};
}

} // namespace mbeseg
