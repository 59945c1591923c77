#include "qlev/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fftw3.h>

namespace qlev::field {

namespace {

// FFTW planning is not thread-safe; all transforms here are serialized by
// the caller contract (one transform per sampling call, plans not cached).
void dst1_2d(std::vector<double>& data, int N) {
  fftw_plan plan = fftw_plan_r2r_2d(N, N, data.data(), data.data(),
                                    FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

void dct3_2d(std::vector<double>& data, int N) {
  fftw_plan plan = fftw_plan_r2r_2d(N, N, data.data(), data.data(),
                                    FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

LatticeField sample_dgff(int n, Bc bc, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_dgff: n must be >= 2");
  LatticeField f;
  f.n = n;
  f.bc = bc;
  f.values.assign(std::size_t(n) * std::size_t(n), 0.0);
  Rng rng(seed);
  if (bc == Bc::zero) {
    int N = n - 2;
    if (N <= 0) return f;  // every site is boundary
    std::vector<double> c(std::size_t(N) * std::size_t(N));
    for (int j = 1; j <= N; ++j)
      for (int k = 1; k <= N; ++k) {
        double lam = 4.0 - 2.0 * std::cos(j * kPi / (N + 1)) -
                     2.0 * std::cos(k * kPi / (N + 1));
        c[std::size_t(j - 1) * std::size_t(N) + std::size_t(k - 1)] =
            rng.normal() * std::sqrt(kTwoPi / lam);
      }
    // RODFT00 carries a factor 2 per dimension relative to the orthonormal
    // sine basis sqrt(2/(N+1)) sin(jk pi/(N+1))
    dst1_2d(c, N);
    double scale = 0.5 * std::sqrt(2.0 / (N + 1));
    scale *= scale;
    for (int y = 1; y <= N; ++y)
      for (int x = 1; x <= N; ++x)
        f.at(x, y) = scale * c[std::size_t(y - 1) * std::size_t(N) + std::size_t(x - 1)];
  } else {
    // Neumann (free) eigenbasis: cosine modes, constant mode omitted
    int N = n;
    std::vector<double> c(std::size_t(N) * std::size_t(N), 0.0);
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        if (j == 0 && k == 0) continue;
        double lam = 4.0 - 2.0 * std::cos(j * kPi / N) - 2.0 * std::cos(k * kPi / N);
        double wj = (j == 0) ? std::sqrt(1.0 / N) : 0.5 * std::sqrt(2.0 / N);
        double wk = (k == 0) ? std::sqrt(1.0 / N) : 0.5 * std::sqrt(2.0 / N);
        c[std::size_t(j) * std::size_t(N) + std::size_t(k)] =
            rng.normal() * std::sqrt(kTwoPi / lam) * wj * wk;
      }
    dct3_2d(c, N);
    f.values = c;
  }
  return f;
}

double interpolate(const LatticeField& f, double x, double y) {
  if (x < 0 || y < 0 || x > f.n - 1 || y > f.n - 1)
    throw std::out_of_range("interpolate: point outside grid");
  int x0 = std::min(int(x), f.n - 2);
  int y0 = std::min(int(y), f.n - 2);
  double tx = x - x0, ty = y - y0;
  return (1 - tx) * (1 - ty) * f.at(x0, y0) + tx * (1 - ty) * f.at(x0 + 1, y0) +
         (1 - tx) * ty * f.at(x0, y0 + 1) + tx * ty * f.at(x0 + 1, y0 + 1);
}

double circle_average(const LatticeField& f, double x, double y, double eps) {
  if (eps <= 0) throw std::invalid_argument("circle_average: eps must be > 0");
  if (x < 0 || y < 0 || x > f.n - 1 || y > f.n - 1)
    throw std::out_of_range("circle_average: center outside grid");
  bool on_boundary = (x == 0.0 || y == 0.0 || x == double(f.n - 1) || y == double(f.n - 1));
  int K = std::max(16, int(std::ceil(kTwoPi * eps)));
  double sum = 0.0;
  int used = 0;
  for (int i = 0; i < K; ++i) {
    double th = kTwoPi * (i + 0.5) / K;
    double px = x + eps * std::cos(th);
    double py = y + eps * std::sin(th);
    bool inside = (px >= 0 && py >= 0 && px <= f.n - 1 && py <= f.n - 1);
    if (!inside) {
      if (on_boundary) continue;  // average only the in-grid arc
      throw std::out_of_range("circle_average: circle exits the grid");
    }
    sum += interpolate(f, px, py);
    ++used;
  }
  if (used == 0) throw std::out_of_range("circle_average: no in-grid arc");
  return sum / used;
}

double green_disk(cplx x, cplx y, GreenKind kind) {
  if (x == y) throw std::invalid_argument("green_disk: coincident points");
  if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0)
    throw std::invalid_argument("green_disk: points must be in the open disk");
  double cross = std::abs(1.0 - x * std::conj(y));
  if (kind == GreenKind::dirichlet) return std::log(cross / std::abs(y - x));
  return -std::log(std::abs(x - y) * cross);
}

HarmonicDiskField sample_harmonic_fbgff(int degree,
                                        const std::vector<Singularity>& singularities,
                                        std::uint64_t seed) {
  if (degree < 0) throw std::invalid_argument("sample_harmonic_fbgff: degree < 0");
  HarmonicDiskField f;
  f.degree = degree;
  f.a.resize(std::size_t(degree));
  f.b.resize(std::size_t(degree));
  Rng rng(seed);
  for (int k = 1; k <= degree; ++k) {
    double sigma = std::sqrt(2.0 / k);
    f.a[std::size_t(k - 1)] = sigma * rng.normal();
    f.b[std::size_t(k - 1)] = sigma * rng.normal();
  }
  f.singularities = singularities;
  f.pinned = true;
  return f;
}

namespace {

double expansion_value(const HarmonicDiskField& f, cplx z) {
  double v = 0.0;
  cplx zk = 1.0;
  for (int k = 1; k <= f.degree; ++k) {
    zk *= z;
    v += f.a[std::size_t(k - 1)] * zk.real() + f.b[std::size_t(k - 1)] * zk.imag();
  }
  return v;
}

}  // namespace

double eval(const HarmonicDiskField& f, cplx z) {
  double v = expansion_value(f, z);
  for (const auto& s : f.singularities) {
    double d = std::abs(z - s.location);
    if (d == 0.0) throw std::invalid_argument("eval: point coincides with a singularity");
    v += s.strength * std::log(d);
    // pinning removes the value of each term at the origin; a term anchored
    // at the origin itself carries no pin offset by convention
    if (std::abs(s.location) > 0.0) v -= s.strength * std::log(std::abs(s.location));
  }
  return v;  // the pure expansion vanishes at 0, so no further pin term
}

double eval_regular(const HarmonicDiskField& f, cplx z, cplx excluded_location) {
  double v = expansion_value(f, z);
  for (const auto& s : f.singularities) {
    if (s.location == excluded_location) continue;
    v += s.strength * std::log(std::abs(z - s.location));
    if (std::abs(s.location) > 0.0) v -= s.strength * std::log(std::abs(s.location));
  }
  return v;
}

std::array<double, 2> eval_gradient(const HarmonicDiskField& f, cplx z) {
  // for g = Re F: grad = (Re F', -Im F'); for g = Im F: grad = (Im F', Re F')
  cplx zk = 1.0;
  double gx = 0.0, gy = 0.0;
  for (int k = 1; k <= f.degree; ++k) {
    cplx d = double(k) * zk;  // (z^k)'
    zk *= z;
    gx += f.a[std::size_t(k - 1)] * d.real() + f.b[std::size_t(k - 1)] * d.imag();
    gy += -f.a[std::size_t(k - 1)] * d.imag() + f.b[std::size_t(k - 1)] * d.real();
  }
  for (const auto& s : f.singularities) {
    cplx d = 1.0 / (z - s.location);  // derivative of log(z - x)
    gx += s.strength * d.real();
    gy += -s.strength * d.imag();
  }
  return {gx, gy};
}

void save_lattice(const LatticeField& f, const std::string& path, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_lattice: cannot open " + path);
  out.precision(17);
  out << "latticefield " << f.n << " " << (f.bc == Bc::zero ? "zero" : "free") << " "
      << f.normalization << " " << seed << "\n";
  out.write(reinterpret_cast<const char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
}

LatticeField load_lattice(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_lattice: cannot open " + path);
  std::string tag, bc;
  LatticeField f;
  std::uint64_t seed = 0;
  in >> tag >> f.n >> bc >> f.normalization >> seed;
  if (tag != "latticefield") throw std::runtime_error("load_lattice: bad header");
  f.bc = (bc == "zero") ? Bc::zero : Bc::free;
  in.get();  // newline
  f.values.resize(std::size_t(f.n) * std::size_t(f.n));
  in.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(double)));
  return f;
}

}  // namespace qlev::field
