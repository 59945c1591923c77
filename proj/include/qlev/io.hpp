#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qlev::io {

// Minimal CSV emitter: caller supplies header and rows of preformatted cells.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Binary PPM (P6). pixels is row-major RGB, 3 bytes per pixel.
void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

// Normalized-[0,1] rainbow used for growth-time and size colormaps.
void rainbow(double t, std::uint8_t rgb[3]);

std::string format_double(double x);

}  // namespace qlev::io
