#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "mbeseg/field.hpp"

namespace mbeseg {

// Reads an 8- or 16-bit grayscale PNG or a binary PGM (P5) into a field on
// the 0..255 scale (16-bit samples are divided by 257). Color data is
// rejected with a format error.
ScalarField2D load_image(const std::string& path);

// Reads an 8-bit grayscale image as a {0,1} mask: nonzero -> 1.
ScalarField2D load_mask_image(const std::string& path);

void save_png_gray8(const std::string& path, const std::vector<std::uint8_t>& px,
                    int width, int height);
void save_png_gray16(const std::string& path, const std::vector<std::uint16_t>& px,
                     int width, int height);
// Interleaved RGB, 3 bytes per pixel.
void save_png_rgb8(const std::string& path, const std::vector<std::uint8_t>& px,
                   int width, int height);

} // namespace mbeseg
