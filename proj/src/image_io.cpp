#include "mbeseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <string>

namespace mbeseg {

namespace {

struct File {
  std::FILE* f = nullptr;
  File(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {}
  ~File() {
    if (f) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

// ---- PGM (binary P5) ----

int pgm_token(std::FILE* f, const std::string& path) {
  int c = std::fgetc(f);
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = std::fgetc(f);
    } else if (std::isspace(c)) {
      c = std::fgetc(f);
      continue;
    } else {
      break;
    }
    c = std::fgetc(f);
  }
  if (c == EOF || !std::isdigit(c))
    fail(ErrorKind::format, path + ": malformed PGM header");
  long val = 0;
  while (c != EOF && std::isdigit(c)) {
    val = val * 10 + (c - '0');
    if (val > 1 << 20) fail(ErrorKind::format, path + ": PGM header value too large");
    c = std::fgetc(f);
  }
  if (c == EOF) fail(ErrorKind::format, path + ": truncated PGM header");
  return static_cast<int>(val);
}

ScalarField2D load_pgm(std::FILE* f, const std::string& path) {
  // magic already consumed up to "P5"; header is width height maxval then one
  // whitespace byte before the raster
  const int w = pgm_token(f, path);
  const int h = pgm_token(f, path);
  const int maxval = pgm_token(f, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    fail(ErrorKind::format, path + ": bad PGM dimensions or maxval");

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * bytes);
  if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
    fail(ErrorKind::format, path + ": truncated PGM raster");

  ScalarField2D out(w, h);
  const double scale = 255.0 / maxval;
  for (std::size_t k = 0; k < static_cast<std::size_t>(w) * h; ++k) {
    unsigned v = bytes == 1 ? raw[k]
                            : (static_cast<unsigned>(raw[2 * k]) << 8) | raw[2 * k + 1];
    out.v[k] = v * scale;
  }
  return out;
}

// ---- PNG ----

ScalarField2D load_png_gray(std::FILE* fp, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::io, path + ": libpng init failed");
  }

  ScalarField2D out;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  std::string err;
  volatile bool failed = false;

  if (setjmp(png_jmpbuf(png))) {
    failed = true;
    err = path + ": corrupt PNG";
  } else {
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (color != PNG_COLOR_TYPE_GRAY) {
      failed = true;
      err = path + ": only grayscale PNG input is supported";
    } else {
      if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
      png_set_interlace_handling(png);
      png_read_update_info(png, info);
      depth = png_get_bit_depth(png, info);

      const std::size_t rowbytes = png_get_rowbytes(png, info);
      data.resize(rowbytes * h);
      rows.resize(h);
      for (png_uint_32 j = 0; j < h; ++j) rows[j] = data.data() + rowbytes * j;
      png_read_image(png, rows.data());

      out = ScalarField2D(static_cast<int>(w), static_cast<int>(h));
      for (png_uint_32 j = 0; j < h; ++j) {
        const png_byte* row = rows[j];
        for (png_uint_32 i = 0; i < w; ++i) {
          if (depth == 16) {
            unsigned v = (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1];
            out(i, j) = v / 257.0;
          } else {
            out(i, j) = row[i];
          }
        }
      }
    }
  }

  png_destroy_read_struct(&png, &info, nullptr);
  if (failed) fail(ErrorKind::format, err);
  return out;
}

void save_png(const std::string& path, const unsigned char* bytes, int width,
              int height, int depth, int color_type, std::size_t rowbytes) {
  File file(path, "wb");
  if (!file.f) fail(ErrorKind::io, path + ": cannot open for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    fail(ErrorKind::io, path + ": libpng init failed");
  }

  std::vector<png_bytep> rows(height);
  for (int j = 0; j < height; ++j)
    rows[j] = const_cast<png_bytep>(bytes + rowbytes * j);

  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, file.f);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, width, height, depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, info);
  }
  png_destroy_write_struct(&png, &info);
  if (failed) fail(ErrorKind::io, path + ": PNG write failed");
}

} // namespace

ScalarField2D load_image(const std::string& path) {
  File file(path, "rb");
  if (!file.f) fail(ErrorKind::io, path + ": cannot open");

  unsigned char magic[8] = {0};
  const std::size_t got = std::fread(magic, 1, 8, file.f);
  if (got >= 8 && !png_sig_cmp(magic, 0, 8)) {
    std::rewind(file.f);
    return load_png_gray(file.f, path);
  }
  if (got >= 2 && magic[0] == 'P' && magic[1] == '5') {
    std::fseek(file.f, 2, SEEK_SET);
    return load_pgm(file.f, path);
  }
  if (got >= 2 && magic[0] == 'P' &&
      (magic[1] == '2' || magic[1] == '3' || magic[1] == '6'))
    fail(ErrorKind::format, path + ": only binary grayscale PGM (P5) is supported");
  fail(ErrorKind::format, path + ": not a PNG or PGM file");
}

ScalarField2D load_mask_image(const std::string& path) {
  ScalarField2D img = load_image(path);
  for (double& x : img.v) x = x != 0.0 ? 1.0 : 0.0;
  return img;
}

void save_png_gray8(const std::string& path, const std::vector<std::uint8_t>& px,
                    int width, int height) {
  if (px.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorKind::invalid_parameter, "save_png_gray8: size mismatch");
  save_png(path, px.data(), width, height, 8, PNG_COLOR_TYPE_GRAY,
           static_cast<std::size_t>(width));
}

void save_png_gray16(const std::string& path, const std::vector<std::uint16_t>& px,
                     int width, int height) {
  if (px.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorKind::invalid_parameter, "save_png_gray16: size mismatch");
  std::vector<unsigned char> be(px.size() * 2);
  for (std::size_t k = 0; k < px.size(); ++k) {
    be[2 * k] = static_cast<unsigned char>(px[k] >> 8);
    be[2 * k + 1] = static_cast<unsigned char>(px[k] & 0xff);
  }
  save_png(path, be.data(), width, height, 16, PNG_COLOR_TYPE_GRAY,
           static_cast<std::size_t>(width) * 2);
}

void save_png_rgb8(const std::string& path, const std::vector<std::uint8_t>& px,
                   int width, int height) {
  if (px.size() != static_cast<std::size_t>(width) * height * 3)
    fail(ErrorKind::invalid_parameter, "save_png_rgb8: size mismatch");
  save_png(path, px.data(), width, height, 8, PNG_COLOR_TYPE_RGB,
           static_cast<std::size_t>(width) * 3);
}

} // namespace mbeseg
