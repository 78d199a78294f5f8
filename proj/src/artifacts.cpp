#include "mbeseg/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mbeseg/image_io.hpp"

namespace mbeseg {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory: " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot write: " + path);
  f << text;
  if (!f) fail(ErrorKind::io, "write failed: " + path);
}

void write_manifest(const std::string& dir, std::vector<std::string> files) {
  files.push_back("manifest.txt");
  std::sort(files.begin(), files.end());
  std::string text;
  for (const std::string& f : files) text += f + "\n";
  write_text(dir + "/manifest.txt", text);
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::uint8_t> mask_bytes(const ScalarField2D& mask) {
  std::vector<std::uint8_t> px(mask.size());
  for (std::size_t k = 0; k < px.size(); ++k)
    px[k] = mask.v[k] != 0.0 ? 255 : 0;
  return px;
}

void draw_contours(std::vector<std::uint8_t>& rgb, int W, int H,
                   const std::vector<Polyline>& contours) {
  auto plot = [&](double x, double y) {
    const int i = std::clamp(static_cast<int>(std::lround(x)), 0, W - 1);
    const int j = std::clamp(static_cast<int>(std::lround(y)), 0, H - 1);
    const std::size_t k = 3 * (static_cast<std::size_t>(j) * W + i);
    rgb[k] = 255;
    rgb[k + 1] = 0;
    rgb[k + 2] = 0;
  };
  for (const Polyline& pl : contours) {
    const std::size_t n = pl.pts.size();
    if (n == 0) continue;
    const std::size_t segs = pl.closed ? n : n - 1;
    for (std::size_t s = 0; s < segs; ++s) {
      const auto& a = pl.pts[s];
      const auto& b = pl.pts[(s + 1) % n];
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
      for (int t = 0; t <= steps; ++t) {
        const double u = static_cast<double>(t) / steps;
        plot(a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]));
      }
    }
  }
}

} // namespace

void emit_artifacts(const SegmentationResult& res, const ScalarField2D& image,
                    const RunConfig& cfg) {
  const std::string dir = cfg.out_dir;
  ensure_dir(dir);
  std::vector<std::string> files;

  if (cfg.emit.count("mask")) {
    save_png_gray8(dir + "/mask.png", mask_bytes(res.mask), res.mask.width,
                   res.mask.height);
    files.push_back("mask.png");
  }

  if (cfg.emit.count("contour_overlay")) {
    const int W = image.width, H = image.height;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(W) * H * 3);
    for (std::size_t k = 0; k < image.v.size(); ++k) {
      const double c = std::clamp(image.v[k], 0.0, 255.0);
      const std::uint8_t g = static_cast<std::uint8_t>(std::lround(c));
      rgb[3 * k] = rgb[3 * k + 1] = rgb[3 * k + 2] = g;
    }
    draw_contours(rgb, W, H, res.contours);
    save_png_rgb8(dir + "/overlay.png", rgb, W, H);
    files.push_back("overlay.png");

    // closed polylines repeat their first vertex on the last line
    std::string text;
    for (std::size_t p = 0; p < res.contours.size(); ++p) {
      const Polyline& pl = res.contours[p];
      if (p) text += "\n";
      for (const auto& v : pl.pts)
        text += fmt17(v[0]) + " " + fmt17(v[1]) + "\n";
      if (pl.closed && !pl.pts.empty())
        text += fmt17(pl.pts[0][0]) + " " + fmt17(pl.pts[0][1]) + "\n";
    }
    write_text(dir + "/contours.txt", text);
    files.push_back("contours.txt");
  }

  if (cfg.emit.count("gradmap")) {
    double lo = 0.0, hi = 0.0;
    if (!res.grad_map.v.empty()) {
      lo = hi = res.grad_map.v[0];
      for (double x : res.grad_map.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    std::vector<std::uint8_t> px(res.grad_map.size());
    const double span = hi - lo;
    for (std::size_t k = 0; k < px.size(); ++k)
      px[k] = span > 0.0 ? static_cast<std::uint8_t>(std::lround(
                               255.0 * (res.grad_map.v[k] - lo) / span))
                         : 0;
    save_png_gray8(dir + "/gradmap.png", px, res.grad_map.width,
                   res.grad_map.height);
    files.push_back("gradmap.png");
    write_text(dir + "/gradmap_scale.txt",
               "min = " + fmt17(lo) + "\nmax = " + fmt17(hi) + "\n");
    files.push_back("gradmap_scale.txt");
  }

  if (cfg.emit.count("trace")) {
    std::ofstream f(dir + "/trace.csv", std::ios::binary);
    if (!f) fail(ErrorKind::io, "cannot write: " + dir + "/trace.csv");
    res.trace.write_csv(f);
    if (!f) fail(ErrorKind::io, "write failed: " + dir + "/trace.csv");
    files.push_back("trace.csv");
  }

  if (cfg.emit.count("final_phi")) {
    const ScalarField2D& phi = res.state.phi;
    std::string text = std::to_string(phi.width) + "," +
                       std::to_string(phi.height) + "\n";
    for (int j = 0; j < phi.height; ++j) {
      for (int i = 0; i < phi.width; ++i)
        text += (i ? "," : "") + fmt17(phi(i, j));
      text += "\n";
    }
    write_text(dir + "/final_phi.csv", text);
    files.push_back("final_phi.csv");
  }

  write_text(dir + "/config_resolved.ini", dump_config(cfg));
  files.push_back("config_resolved.ini");
  write_manifest(dir, std::move(files));
}

void emit_fixture(const Fixture& fx, const FixtureSpec& spec,
                  const std::string& dir) {
  ensure_dir(dir);
  std::vector<std::string> files;

  double lo = fx.image.v[0], hi = fx.image.v[0];
  for (double x : fx.image.v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double span = hi - lo;
  std::vector<std::uint16_t> px(fx.image.size());
  for (std::size_t k = 0; k < px.size(); ++k)
    px[k] = span > 0.0 ? static_cast<std::uint16_t>(std::lround(
                             65535.0 * (fx.image.v[k] - lo) / span))
                       : 0;
  save_png_gray16(dir + "/image.png", px, fx.image.width, fx.image.height);
  files.push_back("image.png");

  save_png_gray8(dir + "/truth_mask.png", mask_bytes(fx.truth_mask),
                 fx.truth_mask.width, fx.truth_mask.height);
  files.push_back("truth_mask.png");

  write_text(dir + "/fixture_spec.txt",
             "spec = " + dump_fixture_spec(spec) + "\nmin = " + fmt17(lo) +
                 "\nmax = " + fmt17(hi) + "\n");
  files.push_back("fixture_spec.txt");
  write_manifest(dir, std::move(files));
}

} // namespace mbeseg
