#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mbeseg/levelset.hpp"

using namespace mbeseg;

namespace {

double torus_dist(int i1, int j1, int i2, int j2, int w, int h) {
  int dx = std::abs(i1 - i2);
  int dy = std::abs(j1 - j2);
  dx = std::min(dx, w - dx);
  dy = std::min(dy, h - dy);
  return std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_pgm8(const std::filesystem::path& path, int w, int h,
                const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("dirac profiles take their closed-form values") {
  DiracSpec compact{DiracSpec::Kind::compact, 1.5};
  CHECK(dirac(0.0, compact) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(dirac(0.75, compact) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(dirac(1.5, compact) == doctest::Approx(0.0));
  CHECK(dirac(-2.0, compact) == 0.0);
  CHECK(dirac(0.4, compact) == dirac(-0.4, compact));

  DiracSpec rational{DiracSpec::Kind::rational, 1.0};
  CHECK(dirac(0.0, rational) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(dirac(1.0, rational) ==
        doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(dirac(3.0, rational) ==
        doctest::Approx(0.1 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("dirac antiderivative is normalized and differentiates back") {
  for (DiracSpec spec : {DiracSpec{DiracSpec::Kind::compact, 1.25},
                         DiracSpec{DiracSpec::Kind::rational, 0.8}}) {
    CAPTURE(static_cast<int>(spec.kind));
    CHECK(dirac_antiderivative(0.0, spec) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dirac_antiderivative(1e9, spec) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(dirac_antiderivative(-1e9, spec) == doctest::Approx(0.0).epsilon(1e-8));
    // derivative check, central differences
    const double hstep = 1e-6;
    for (double p : {-1.7, -0.3, 0.0, 0.4, 1.1}) {
      const double fd = (dirac_antiderivative(p + hstep, spec) -
                         dirac_antiderivative(p - hstep, spec)) /
                        (2.0 * hstep);
      CHECK(fd == doctest::Approx(dirac(p, spec)).epsilon(1e-7));
    }
  }
  // compact support saturates exactly at +-eps
  DiracSpec compact{DiracSpec::Kind::compact, 1.25};
  CHECK(dirac_antiderivative(1.25, compact) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dirac_antiderivative(-1.25, compact) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("binary step init places the step by exact membership") {
  InitSpec rect;
  rect.shape = InitSpec::Shape::rectangle;
  rect.x0 = 2; rect.y0 = 3; rect.x1 = 5; rect.y1 = 4;
  rect.step = 2.0;
  ScalarField2D phi = init_level_set(10, 8, rect);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 10; ++i) {
      const bool in = i >= 2 && i <= 5 && j >= 3 && j <= 4;
      CHECK(phi(i, j) == (in ? 2.0 : -2.0));
    }

  InitSpec disk;
  disk.shape = InitSpec::Shape::disk;
  disk.cx = 4.5; disk.cy = 3.5; disk.radius = 2.0;
  disk.step = 0.5;
  phi = init_level_set(10, 8, disk);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 10; ++i) {
      const bool in =
          (i - 4.5) * (i - 4.5) + (j - 3.5) * (j - 3.5) <= 4.0;
      CHECK(phi(i, j) == (in ? 0.5 : -0.5));
    }
}

TEST_CASE("init rejects degenerate regions") {
  InitSpec spec;
  spec.shape = InitSpec::Shape::disk;
  spec.cx = 4.5; spec.cy = 3.5; spec.radius = 0.1; // misses every pixel center
  CHECK_THROWS_AS(init_level_set(8, 8, spec), Error);

  InitSpec all;
  all.shape = InitSpec::Shape::rectangle;
  all.x0 = 0; all.y0 = 0; all.x1 = 7; all.y1 = 7; // swallows every pixel center
  try {
    init_level_set(8, 8, all);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_init);
  }
}

TEST_CASE("signed distance init matches the brute-force periodic distance") {
  const int W = 16, H = 17;
  InitSpec spec;
  spec.shape = InitSpec::Shape::disk;
  spec.mode = InitSpec::Mode::signed_distance;
  spec.cx = 7.2; spec.cy = 8.1; spec.radius = 4.7;
  ScalarField2D phi = init_level_set(W, H, spec);

  std::vector<char> inside(static_cast<std::size_t>(W) * H);
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i)
      inside[static_cast<std::size_t>(j) * W + i] =
          (i - spec.cx) * (i - spec.cx) + (j - spec.cy) * (j - spec.cy) <=
          spec.radius * spec.radius;

  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      double d = 1e300;
      for (int jj = 0; jj < H; ++jj)
        for (int ii = 0; ii < W; ++ii)
          if (inside[static_cast<std::size_t>(jj) * W + ii] !=
              inside[static_cast<std::size_t>(j) * W + i])
            d = std::min(d, torus_dist(i, j, ii, jj, W, H));
      const double expect =
          inside[static_cast<std::size_t>(j) * W + i] ? d - 0.5 : -(d - 0.5);
      CHECK(phi(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }

  // discrete gradient bound and the +-1/2 band along the interface
  ScalarField2D mag = gradient_magnitude(phi, 0.0);
  for (double m : mag.v) CHECK(m <= std::sqrt(2.0) + 1e-12);
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      const bool here = inside[static_cast<std::size_t>(j) * W + i];
      const bool touches_other =
          inside[static_cast<std::size_t>(j) * W + (i + 1) % W] != here ||
          inside[static_cast<std::size_t>(j) * W + (i + W - 1) % W] != here ||
          inside[static_cast<std::size_t>((j + 1) % H) * W + i] != here ||
          inside[static_cast<std::size_t>((j + H - 1) % H) * W + i] != here;
      if (touches_other) CHECK(std::abs(phi(i, j)) == doctest::Approx(0.5));
    }
}

TEST_CASE("mask init reads an 8-bit grayscale mask") {
  const auto path = temp_file("mbeseg_test_mask.pgm");
  std::vector<unsigned char> bytes(6 * 5, 0);
  for (int j = 1; j <= 3; ++j)
    for (int i = 2; i <= 4; ++i) bytes[static_cast<std::size_t>(j) * 6 + i] = 200;
  write_pgm8(path, 6, 5, bytes);

  InitSpec spec;
  spec.shape = InitSpec::Shape::mask;
  spec.mask_path = path.string();
  spec.step = 1.5;
  ScalarField2D phi = init_level_set(6, 5, spec);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 6; ++i)
      CHECK(phi(i, j) == (bytes[static_cast<std::size_t>(j) * 6 + i] ? 1.5 : -1.5));

  // grid size mismatch is an error
  CHECK_THROWS_AS(init_level_set(8, 8, spec), Error);
  std::filesystem::remove(path);
}

TEST_CASE("polyline length sums segment lengths, closing when asked") {
  Polyline tri;
  tri.pts = {{0.0, 0.0}, {3.0, 0.0}, {0.0, 4.0}};
  tri.closed = false;
  CHECK(tri.length() == doctest::Approx(8.0));
  tri.closed = true;
  CHECK(tri.length() == doctest::Approx(12.0));
}

TEST_CASE("zero contour of a ramp is one open line at the crossing height") {
  ScalarField2D phi(8, 8);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) phi(i, j) = j - 3.25;
  auto lines = extract_zero_contour(phi);
  REQUIRE(lines.size() == 1);
  CHECK(!lines[0].closed);
  CHECK(lines[0].length() == doctest::Approx(7.0).epsilon(1e-12));
  for (const auto& p : lines[0].pts) CHECK(p[1] == doctest::Approx(3.25).epsilon(1e-12));
  // spans the full frame
  double xmin = 1e300, xmax = -1e300;
  for (const auto& p : lines[0].pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
  }
  CHECK(xmin == doctest::Approx(0.0));
  CHECK(xmax == doctest::Approx(7.0));
}

TEST_CASE("zero contour of a disk is one closed curve near the radius") {
  InitSpec spec;
  spec.shape = InitSpec::Shape::disk;
  spec.mode = InitSpec::Mode::signed_distance;
  spec.cx = 11.5; spec.cy = 11.5; spec.radius = 5.0;
  ScalarField2D phi = init_level_set(24, 24, spec);
  auto lines = extract_zero_contour(phi);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  CHECK(lines[0].length() ==
        doctest::Approx(2.0 * std::numbers::pi * 5.0).epsilon(0.08));
  for (const auto& p : lines[0].pts) {
    const double rr = std::hypot(p[0] - 11.5, p[1] - 11.5);
    CHECK(std::abs(rr - 5.0) <= 0.75);
  }
}

TEST_CASE("contour extraction on a one-signed field finds nothing") {
  ScalarField2D phi(8, 8, 1.0);
  CHECK(extract_zero_contour(phi).empty());
}

TEST_CASE("saddle cells split by the cell-average sign") {
  // two positive pixels on a diagonal; the shared cell is a saddle
  ScalarField2D joined(6, 6, -1.0);
  joined(2, 2) = 3.0;
  joined(3, 3) = 3.0; // cell average 1 >= 0: the blobs connect
  auto lines = extract_zero_contour(joined);
  CHECK(lines.size() == 1);
  CHECK(lines[0].closed);

  ScalarField2D split(6, 6, -3.0);
  split(2, 2) = 1.0;
  split(3, 3) = 1.0; // cell average -1 < 0: two separate loops
  lines = extract_zero_contour(split);
  CHECK(lines.size() == 2);
  for (const auto& pl : lines) CHECK(pl.closed);
}

TEST_CASE("region masks partition the grid with zero counted as interior") {
  ScalarField2D phi(5, 4, -1.0);
  phi(1, 1) = 0.0;
  phi(2, 2) = 4.0;
  auto [in, out] = region_masks(phi);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 5; ++i) {
      CHECK(in(i, j) + out(i, j) == 1.0);
      const bool interior = (i == 1 && j == 1) || (i == 2 && j == 2);
      CHECK(in(i, j) == (interior ? 1.0 : 0.0));
    }
}
