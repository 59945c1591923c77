#include "qlev/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "qlev/common.hpp"

namespace qlev {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // advance past all ties on both sides before comparing the CDFs
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    double fa = double(i) / double(a.size());
    double fb = double(j) / double(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

}  // namespace qlev

namespace qlev::io {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != std::size_t(width) * std::size_t(height) * 3)
    throw std::invalid_argument("write_ppm: pixel buffer size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            std::streamsize(pixels.size()));
}

void rainbow(double t, std::uint8_t rgb[3]) {
  t = std::clamp(t, 0.0, 1.0);
  // hue sweep blue -> red
  double h = (1.0 - t) * 240.0 / 60.0;
  int i = int(h) % 6;
  double f = h - std::floor(h);
  double q = 1.0 - f;
  double r = 0, g = 0, b = 0;
  switch (i) {
    case 0: r = 1; g = f; break;
    case 1: r = q; g = 1; break;
    case 2: g = 1; b = f; break;
    case 3: g = q; b = 1; break;
    case 4: r = f; b = 1; break;
    default: r = 1; b = q; break;
  }
  rgb[0] = std::uint8_t(255.0 * r + 0.5);
  rgb[1] = std::uint8_t(255.0 * g + 0.5);
  rgb[2] = std::uint8_t(255.0 * b + 0.5);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace qlev::io
