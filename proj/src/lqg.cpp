#include "qlev/lqg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "qlev/io.hpp"

namespace qlev::lqg {

MassGrid lqg_mass(const field::LatticeField& f, double gamma) {
  if (gamma < 0.0 || gamma > 2.0) throw std::invalid_argument("lqg_mass: gamma outside [0, 2]");
  MassGrid g;
  g.n = f.n;
  g.mass.resize(f.values.size());
  double hmax = *std::max_element(f.values.begin(), f.values.end());
  double z = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    g.mass[i] = std::exp(gamma * (f.values[i] - hmax));
    z += g.mass[i];
  }
  for (double& m : g.mass) m /= z;
  g.total = 1.0;
  return g;
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void split(SquareTiling& t, const std::vector<std::vector<double>>& pyramid, int node_idx) {
  TileNode node = t.nodes[std::size_t(node_idx)];  // copy: vector may reallocate
  if (node.mass < t.delta) return;
  if (node.size == 1) {
    t.nodes[std::size_t(node_idx)].floor_leaf = true;
    return;
  }
  t.nodes[std::size_t(node_idx)].leaf = false;
  int h = node.size / 2;
  // pyramid level L holds sums over squares of side 2^L
  int level = 0;
  for (int s = 1; s < h; s *= 2) ++level;
  int lw = t.n >> level;
  for (int q = 0; q < 4; ++q) {
    TileNode c;
    c.x = node.x + (q % 2) * h;
    c.y = node.y + (q / 2) * h;
    c.size = h;
    c.depth = node.depth + 1;
    c.mass = pyramid[std::size_t(level)][std::size_t(c.y / h) * std::size_t(lw) + std::size_t(c.x / h)];
    int ci = int(t.nodes.size());
    t.nodes[std::size_t(node_idx)].child[q] = ci;
    t.nodes.push_back(c);
    split(t, pyramid, ci);
  }
}

}  // namespace

SquareTiling square_decompose(const MassGrid& mass, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("square_decompose: delta must be > 0");
  if (!is_power_of_two(mass.n)) throw std::invalid_argument("square_decompose: n must be a power of two");
  // dyadic mass pyramid; each parent is the exact four-term sum of its children
  std::vector<std::vector<double>> pyramid;
  pyramid.push_back(mass.mass);
  for (int w = mass.n; w > 1; w /= 2) {
    const auto& fine = pyramid.back();
    int hw = w / 2;
    std::vector<double> coarse(std::size_t(hw) * std::size_t(hw));
    for (int y = 0; y < hw; ++y)
      for (int x = 0; x < hw; ++x)
        coarse[std::size_t(y) * std::size_t(hw) + std::size_t(x)] =
            ((fine[std::size_t(2 * y) * std::size_t(w) + std::size_t(2 * x)] +
              fine[std::size_t(2 * y) * std::size_t(w) + std::size_t(2 * x + 1)]) +
             fine[std::size_t(2 * y + 1) * std::size_t(w) + std::size_t(2 * x)]) +
            fine[std::size_t(2 * y + 1) * std::size_t(w) + std::size_t(2 * x + 1)];
    pyramid.push_back(std::move(coarse));
  }
  SquareTiling t;
  t.n = mass.n;
  t.delta = delta;
  TileNode root;
  root.size = mass.n;
  root.mass = pyramid.back()[0];
  t.nodes.push_back(root);
  split(t, pyramid, 0);
  for (int i = 0; i < int(t.nodes.size()); ++i)
    if (t.nodes[std::size_t(i)].leaf) t.leaves.push_back(i);
  return t;
}

void write_tiling_csv(const SquareTiling& t, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (int i : t.leaves) {
    const auto& nd = t.nodes[std::size_t(i)];
    rows.push_back({std::to_string(nd.x), std::to_string(nd.y), std::to_string(nd.size),
                    io::format_double(nd.mass), std::to_string(nd.depth)});
  }
  io::write_csv(path, {"x", "y", "size", "mass", "depth"}, rows);
}

void render_tiling_ppm(const SquareTiling& t, const std::string& path) {
  int maxd = 0;
  for (int i : t.leaves) maxd = std::max(maxd, t.nodes[std::size_t(i)].depth);
  std::vector<std::uint8_t> px(std::size_t(t.n) * std::size_t(t.n) * 3, 0);
  for (int i : t.leaves) {
    const auto& nd = t.nodes[std::size_t(i)];
    std::uint8_t rgb[3];
    io::rainbow(maxd > 0 ? double(nd.depth) / double(maxd) : 0.0, rgb);
    for (int y = nd.y; y < nd.y + nd.size; ++y)
      for (int x = nd.x; x < nd.x + nd.size; ++x) {
        std::size_t o = (std::size_t(t.n - 1 - y) * std::size_t(t.n) + std::size_t(x)) * 3;
        bool edge = (x == nd.x || y == nd.y);
        px[o] = edge ? std::uint8_t(0) : rgb[0];
        px[o + 1] = edge ? std::uint8_t(0) : rgb[1];
        px[o + 2] = edge ? std::uint8_t(0) : rgb[2];
      }
  }
  io::write_ppm(path, t.n, t.n, px);
}

namespace {

void build_cdf(CircleMeasure& m) {
  const auto n = m.is_density ? m.weights.size() : m.atoms.size();
  m.cdf.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += m.is_density ? m.weights[i] : m.atoms[i].second;
    m.cdf[i] = acc;
  }
  if (!m.cdf.empty()) m.cdf.back() = 1.0;
}

}  // namespace

CircleMeasure boundary_measure_truncated(const field::HarmonicDiskField& f, double a,
                                         int trunc, int grid_resolution, bool compensate) {
  if (trunc < 0 || trunc > f.degree)
    throw std::invalid_argument("boundary_measure_truncated: truncation exceeds field degree");
  if (grid_resolution < 64)
    throw std::invalid_argument("boundary_measure_truncated: grid resolution must be >= 64");
  const int M = grid_resolution;
  const double dth = kTwoPi / M;
  std::vector<const field::Singularity*> boundary, interior;
  for (const auto& s : f.singularities)
    (std::abs(s.location) > 1.0 - 1e-9 ? boundary : interior).push_back(&s);
  for (const auto* s : boundary) {
    double p = a * s->strength;
    if (p <= -1.0) {
      double th = wrap_angle(std::arg(s->location));
      double frac = th / dth;
      if (std::abs(frac - std::round(frac)) < 1e-12)
        throw std::domain_error("boundary_measure_truncated: non-integrable atom on a grid angle");
    }
  }
  std::vector<double> expo(std::size_t(M), 0.0);
  double emax = -1e300;
  const cplx rot = std::polar(1.0, dth);
  cplx u = 1.0;
  for (int j = 0; j < M; ++j, u *= rot) {
    double th = dth * j;
    double h = 0.0;
    cplx uk = 1.0;
    for (int k = 1; k <= trunc; ++k) {
      uk *= u;
      h += f.a[std::size_t(k - 1)] * uk.real() + f.b[std::size_t(k - 1)] * uk.imag();
    }
    double e = a * h;
    for (const auto* s : interior) {
      // a term anchored at the origin contributes nothing on the circle
      if (std::abs(s->location) == 0.0) continue;
      e += a * s->strength *
           (std::log(std::abs(u - s->location)) - std::log(std::abs(s->location)));
    }
    if (compensate) {
      double var = 0.0;
      cplx vk = 1.0;
      for (int k = 1; k <= trunc; ++k) {
        vk *= u;
        var += (2.0 / k) * (vk.real() * vk.real() + vk.imag() * vk.imag());
      }
      e -= a * a * var;
    }
    // log of the boundary-singularity factors; cell-averaged when integrable
    // and the singularity falls inside this cell
    for (const auto* s : boundary) {
      double p = a * s->strength;
      if (p == 0.0) continue;
      double ti = wrap_angle(std::arg(s->location));
      double d = std::abs(th - ti);
      d = std::min(d, kTwoPi - d);
      if (d < 0.5 * dth && p > -1.0 && p < 0.0) {
        // distances from the singularity to the two cell edges; the average
        // of |theta - ti|^p over the cell has a closed form
        double dl = 0.5 * dth - d, dr = 0.5 * dth + d;
        if (wrap_angle(ti - (th - 0.5 * dth)) < dth) {
          dl = wrap_angle(ti - (th - 0.5 * dth));
          dr = dth - dl;
        }
        double avg = (std::pow(dl, p + 1.0) + std::pow(dr, p + 1.0)) / ((p + 1.0) * dth);
        e += std::log(avg);
      } else {
        double chord = std::abs(2.0 * std::sin(0.5 * (th - ti)));
        if (chord == 0.0 && p > 0.0) {
          e = -1e300;
          break;
        }
        e += p * std::log(chord);
      }
    }
    expo[std::size_t(j)] = e;
    emax = std::max(emax, e);
  }
  CircleMeasure m;
  m.is_density = true;
  m.grid = M;
  m.weights.resize(std::size_t(M));
  double z = 0.0;
  for (int j = 0; j < M; ++j) {
    m.weights[std::size_t(j)] = std::exp(expo[std::size_t(j)] - emax);
    z += m.weights[std::size_t(j)];
  }
  for (double& w : m.weights) w /= z;
  build_cdf(m);
  return m;
}

double sample_circle(const CircleMeasure& m, Rng& rng) {
  if (m.cdf.empty()) throw std::invalid_argument("sample_circle: empty measure");
  double v = rng.uniform();
  auto it = std::lower_bound(m.cdf.begin(), m.cdf.end(), v);
  std::size_t i = std::size_t(it - m.cdf.begin());
  if (i >= m.cdf.size()) i = m.cdf.size() - 1;
  if (!m.is_density) return m.atoms[i].first;
  double lo = i == 0 ? 0.0 : m.cdf[i - 1];
  double w = m.cdf[i] - lo;
  double frac = w > 0 ? (v - lo) / w : 0.5;
  double dth = kTwoPi / m.grid;
  return wrap_angle(dth * double(i) + dth * (frac - 0.5));
}

}  // namespace qlev::lqg
