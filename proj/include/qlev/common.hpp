#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qlev {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// splitmix64; used both to whiten user seeds and to derive independent
// per-worker streams from a master seed (stream i uses master ^ golden*i).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(master ^ splitmix64(0x5851f42d4c957f2dull * (index + 1)));
  }

  double uniform() { return uni_(gen_); }
  double uniform(double a, double b) { return a + (b - a) * uni_(gen_); }
  double normal() { return nrm_(gen_); }
  double exponential(double rate) {
    return -std::log1p(-uni_(gen_)) / rate;
  }
  std::uint64_t bits() { return gen_(); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> nrm_{0.0, 1.0};
};

struct Stats {
  double mean = 0.0;
  double var = 0.0;   // unbiased sample variance
  double sem = 0.0;   // standard error of the mean
  std::size_t n = 0;
};

inline Stats summarize(const std::vector<double>& xs) {
  Stats s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(s.n);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v = s.n > 1 ? v / double(s.n - 1) : 0.0;
  s.mean = m;
  s.var = v;
  s.sem = std::sqrt(v / double(s.n));
  return s;
}

// Total variation distance between two discrete distributions on a shared
// index set; inputs need not be normalized.
inline double total_variation(const std::vector<double>& p,
                              const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: size mismatch");
  double sp = 0.0, sq = 0.0;
  for (double x : p) sp += x;
  for (double x : q) sq += x;
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    tv += std::abs(p[i] / sp - q[i] / sq);
  return 0.5 * tv;
}

// Two-sample Kolmogorov-Smirnov statistic (sorts copies of the inputs).
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Critical value for the two-sample KS test at significance alpha.
inline double ks_critical(std::size_t n, std::size_t m, double alpha) {
  double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

inline double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

}  // namespace qlev
