#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"
#include "qlev/lqg.hpp"

using namespace qlev;
using namespace qlev::field;
using namespace qlev::lqg;

TEST_CASE("mass grid: uniform cases and normalization") {
  auto f = sample_dgff(16, field::Bc::zero, 11);
  auto g0 = lqg_mass(f, 0.0);
  for (double m : g0.mass) CHECK(m == doctest::Approx(1.0 / 256.0));
  field::LatticeField c;
  c.n = 8;
  c.values.assign(64, 4.2);
  auto gc = lqg_mass(c, 1.5);
  for (double m : gc.mass) CHECK(m == doctest::Approx(1.0 / 64.0));
  auto g = lqg_mass(f, 2.0);
  double total = 0.0;
  for (double m : g.mass) {
    CHECK(m >= 0.0);
    total += m;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lqg_mass(f, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(lqg_mass(f, 2.5), std::invalid_argument);
}

TEST_CASE("square decomposition: uniform mass gives the complete dyadic grid") {
  MassGrid g;
  g.n = 16;
  g.mass.assign(256, 1.0 / 256.0);
  g.total = 1.0;
  auto t = square_decompose(g, 1.0 / 16.0 + 1e-9);  // stops at 4x4 squares
  CHECK(t.leaves.size() == 16);
  for (int i : t.leaves) {
    CHECK(t.nodes[std::size_t(i)].size == 4);
    CHECK(t.nodes[std::size_t(i)].depth == 2);
    CHECK_FALSE(t.nodes[std::size_t(i)].floor_leaf);
  }
  CHECK_THROWS_AS(square_decompose(g, 0.0), std::invalid_argument);
}

TEST_CASE("square decomposition: point mass splits to a flagged floor leaf") {
  MassGrid g;
  g.n = 8;
  g.mass.assign(64, 0.0);
  g.at(5, 2) = 1.0;
  g.total = 1.0;
  auto t = square_decompose(g, 0.5);
  int floors = 0;
  long area = 0;
  std::set<std::pair<int, int>> corners;
  for (int i : t.leaves) {
    const auto& nd = t.nodes[std::size_t(i)];
    area += long(nd.size) * long(nd.size);
    corners.insert({nd.x, nd.y});
    if (nd.floor_leaf) {
      ++floors;
      CHECK(nd.size == 1);
      CHECK(nd.x == 5);
      CHECK(nd.y == 2);
      CHECK(nd.mass == 1.0);
    } else {
      CHECK(nd.mass < 0.5);
    }
  }
  CHECK(floors == 1);
  CHECK(area == 64);  // leaves partition the grid
  CHECK(corners.size() == t.leaves.size());
}

TEST_CASE("square decomposition conserves mass exactly") {
  auto f = sample_dgff(64, field::Bc::zero, 2718);
  auto g = lqg_mass(f, 1.0);
  auto t = square_decompose(g, 1.0 / 300.0);
  CHECK(t.leaves.size() > 4);
  double leaf_sum = 0.0;
  for (int i : t.leaves) leaf_sum += t.nodes[std::size_t(i)].mass;
  CHECK(std::abs(leaf_sum - 1.0) < 1e-12);
  // every parent is the exact four-term sum of its children
  for (const auto& nd : t.nodes) {
    if (nd.leaf) continue;
    double s = ((t.nodes[std::size_t(nd.child[0])].mass +
                 t.nodes[std::size_t(nd.child[1])].mass) +
                t.nodes[std::size_t(nd.child[2])].mass) +
               t.nodes[std::size_t(nd.child[3])].mass;
    CHECK(nd.mass == s);
  }
}

TEST_CASE("tiling export: csv rows and image bytes") {
  auto f = sample_dgff(32, field::Bc::zero, 5);
  auto t = square_decompose(lqg_mass(f, 1.0), 0.01);
  write_tiling_csv(t, "test_lqg_tiles.csv");
  std::ifstream in("test_lqg_tiles.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == t.leaves.size() + 1);
  render_tiling_ppm(t, "test_lqg_tiles.ppm");
  std::ifstream img("test_lqg_tiles.ppm", std::ios::binary | std::ios::ate);
  CHECK(img.tellg() > 32 * 32 * 3);
  std::remove("test_lqg_tiles.csv");
  std::remove("test_lqg_tiles.ppm");
}

TEST_CASE("boundary measure: zero field is uniform, single mode is closed form") {
  field::HarmonicDiskField zero;
  zero.degree = 0;
  auto mu = boundary_measure_truncated(zero, -0.5, 0, 256);
  for (double w : mu.weights) CHECK(w == doctest::Approx(1.0 / 256.0).epsilon(1e-12));

  field::HarmonicDiskField one;
  one.degree = 1;
  one.a = {0.8};
  one.b = {0.0};
  double a = -0.7;
  auto nu = boundary_measure_truncated(one, a, 1, 512);
  double mx = *std::max_element(nu.weights.begin(), nu.weights.end());
  double mn = *std::min_element(nu.weights.begin(), nu.weights.end());
  CHECK(mx / mn == doctest::Approx(std::exp(2.0 * std::abs(a * 0.8))).epsilon(1e-10));
}

TEST_CASE("variance compensation is a constant shift for this basis") {
  auto f = sample_harmonic_fbgff(10, {}, 404);
  auto plain = boundary_measure_truncated(f, 0.75, 10, 512, false);
  auto comp = boundary_measure_truncated(f, 0.75, 10, 512, true);
  for (std::size_t j = 0; j < plain.weights.size(); ++j)
    CHECK(comp.weights[j] == doctest::Approx(plain.weights[j]).epsilon(1e-12));
}

TEST_CASE("boundary measure flags a non-integrable atom on a grid angle") {
  field::HarmonicDiskField f;
  f.degree = 0;
  f.singularities.push_back({2.0, std::polar(1.0, kTwoPi * 3.0 / 128.0)});
  CHECK_THROWS_AS(boundary_measure_truncated(f, -0.6, 0, 128), std::domain_error);
  // integrable exponent at the same location is fine
  auto mu = boundary_measure_truncated(f, -0.3, 0, 128);
  double s = 0.0;
  for (double w : mu.weights) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("circle sampling: atoms, symmetry, histogram against the density") {
  CircleMeasure pm;
  pm.is_density = false;
  pm.atoms = {{1.25, 1.0}};
  pm.cdf = {1.0};
  Rng rng(1);
  for (int i = 0; i < 50; ++i) CHECK(sample_circle(pm, rng) == 1.25);

  field::HarmonicDiskField zero;
  zero.degree = 0;
  auto uni = boundary_measure_truncated(zero, 1.0, 0, 256);
  cplx acc = 0.0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) acc += std::polar(1.0, sample_circle(uni, rng));
  CHECK(std::abs(acc) / N < 3.0 / std::sqrt(double(N)));

  auto f = sample_harmonic_fbgff(8, {}, 606);
  auto nu = boundary_measure_truncated(f, -1.0 / std::sqrt(6.0), 8, 4096);
  const int B = 8;
  std::vector<double> hist(B, 0.0), expect(B, 0.0);
  for (std::size_t j = 0; j < nu.weights.size(); ++j)
    expect[j * B / nu.weights.size()] += nu.weights[j];
  for (int i = 0; i < N; ++i) {
    double th = sample_circle(nu, rng);
    hist[std::size_t(th / kTwoPi * B) % B] += 1.0;
  }
  CHECK(total_variation(hist, expect) < 0.01);
}

TEST_CASE("resampling the added boundary singularity leaves its law uniform") {
  const double gamma = 1.0;
  const int deg = 12, M = 512, B = 16;
  Rng rng(20260823);
  std::vector<double> hist(B, 0.0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    auto f = sample_harmonic_fbgff(deg, {}, rng.bits());
    double u = rng.uniform(0.0, kTwoPi);
    f.singularities.push_back({-gamma, std::polar(1.0, u)});
    auto nu = boundary_measure_truncated(f, gamma / 2.0, deg, M);
    double up = sample_circle(nu, rng);
    hist[std::size_t(up / kTwoPi * B) % B] += 1.0;
  }
  std::vector<double> flat(B, 1.0);
  CHECK(total_variation(hist, flat) < 0.02);
}
