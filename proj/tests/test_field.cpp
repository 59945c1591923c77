#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"

using namespace qlev;
using namespace qlev::field;

namespace {

// Dense inverse of the grid Laplacian with absorbing boundary, computed
// independently of the spectral sampler.
Eigen::MatrixXd dirichlet_green(int n) {
  int N = n - 2;
  int V = N * N;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(V, V);
  auto id = [&](int x, int y) { return (y - 1) * N + (x - 1); };
  for (int y = 1; y <= N; ++y)
    for (int x = 1; x <= N; ++x) {
      int i = id(x, y);
      L(i, i) = 4.0;
      if (x > 1) L(i, id(x - 1, y)) = -1.0;
      if (x < N) L(i, id(x + 1, y)) = -1.0;
      if (y > 1) L(i, id(x, y - 1)) = -1.0;
      if (y < N) L(i, id(x, y + 1)) = -1.0;
    }
  return L.inverse();
}

// Pseudo-inverse of the grid graph Laplacian (reflecting boundary), via a
// rank-one shift that pins the constant mode.
Eigen::MatrixXd neumann_green(int n) {
  int V = n * n;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(V, V);
  auto id = [&](int x, int y) { return y * n + x; };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      int i = id(x, y);
      auto link = [&](int a, int b) {
        L(i, i) += 1.0;
        L(i, id(a, b)) -= 1.0;
      };
      if (x > 0) link(x - 1, y);
      if (x < n - 1) link(x + 1, y);
      if (y > 0) link(x, y - 1);
      if (y < n - 1) link(x, y + 1);
    }
  Eigen::MatrixXd J = Eigen::MatrixXd::Constant(V, V, 1.0 / V);
  Eigen::MatrixXd G = (L + J).inverse() - J;
  return G;
}

}  // namespace

TEST_CASE("zero-boundary sample covariance matches the lattice Green function") {
  const int n = 17;
  Eigen::MatrixXd G = dirichlet_green(n);
  auto gid = [&](int x, int y) { return (y - 1) * (n - 2) + (x - 1); };
  struct Pair { int x1, y1, x2, y2; };
  std::vector<Pair> pairs = {{8, 8, 8, 8}, {8, 8, 9, 8}, {4, 4, 10, 12}, {2, 14, 3, 14}};
  const int M = 30000;
  std::vector<double> acc(pairs.size(), 0.0);
  for (int i = 0; i < M; ++i) {
    auto f = sample_dgff(n, Bc::zero, 1000 + std::uint64_t(i));
    for (std::size_t p = 0; p < pairs.size(); ++p)
      acc[p] += f.at(pairs[p].x1, pairs[p].y1) * f.at(pairs[p].x2, pairs[p].y2);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    double expect = kTwoPi * G(gid(pairs[p].x1, pairs[p].y1), gid(pairs[p].x2, pairs[p].y2));
    CHECK(acc[p] / M == doctest::Approx(expect).epsilon(0.05).scale(1.0));
  }
  // boundary rows stay exactly zero
  auto f = sample_dgff(n, Bc::zero, 5);
  for (int x = 0; x < n; ++x) {
    CHECK(f.at(x, 0) == 0.0);
    CHECK(f.at(x, n - 1) == 0.0);
    CHECK(f.at(0, x) == 0.0);
    CHECK(f.at(n - 1, x) == 0.0);
  }
}

TEST_CASE("free-boundary sample covariance matches the Laplacian pseudo-inverse") {
  const int n = 9;
  Eigen::MatrixXd G = neumann_green(n);
  auto id = [&](int x, int y) { return y * n + x; };
  struct Pair { int x1, y1, x2, y2; };
  std::vector<Pair> pairs = {{4, 4, 4, 4}, {0, 0, 8, 8}, {2, 3, 6, 1}};
  const int M = 40000;
  std::vector<double> acc(pairs.size(), 0.0);
  double mean_sum = 0.0;
  for (int i = 0; i < M; ++i) {
    auto f = sample_dgff(n, Bc::free, 7000 + std::uint64_t(i));
    for (std::size_t p = 0; p < pairs.size(); ++p)
      acc[p] += f.at(pairs[p].x1, pairs[p].y1) * f.at(pairs[p].x2, pairs[p].y2);
    double m = 0.0;
    for (double v : f.values) m += v;
    mean_sum += m / double(f.values.size());
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    double expect = kTwoPi * G(id(pairs[p].x1, pairs[p].y1), id(pairs[p].x2, pairs[p].y2));
    CHECK(acc[p] / M == doctest::Approx(expect).epsilon(0.05).scale(1.0));
  }
  // with the constant mode dropped every sample averages to zero
  CHECK(std::abs(mean_sum / M) < 1e-12);
}

TEST_CASE("bilinear interpolation is exact on bilinear data") {
  LatticeField f;
  f.n = 5;
  f.values.resize(25);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) f.at(x, y) = 2.0 * x - 3.0 * y + 0.5 * x * y + 1.0;
  CHECK(interpolate(f, 1.25, 2.75) ==
        doctest::Approx(2.0 * 1.25 - 3.0 * 2.75 + 0.5 * 1.25 * 2.75 + 1.0));
  CHECK(interpolate(f, 4.0, 4.0) == doctest::Approx(f.at(4, 4)));
  CHECK_THROWS_AS(interpolate(f, -0.1, 2.0), std::out_of_range);
}

TEST_CASE("circle averages: constants, boundary arcs, range checks") {
  LatticeField f;
  f.n = 9;
  f.values.assign(81, 3.25);
  CHECK(circle_average(f, 4, 4, 2.0) == doctest::Approx(3.25));
  CHECK(circle_average(f, 0, 4, 2.0) == doctest::Approx(3.25));  // semicircle
  CHECK(circle_average(f, 8, 8, 1.5) == doctest::Approx(3.25));  // quarter arc
  CHECK_THROWS_AS(circle_average(f, 4, 4, 5.0), std::out_of_range);
  CHECK_THROWS_AS(circle_average(f, 4, 4, 0.0), std::invalid_argument);
}

TEST_CASE("circle-average variance grows with unit slope in the log of scale") {
  const int n = 513;
  const double c = (n - 1) / 2.0;
  std::vector<double> radii = {4, 8, 16, 32, 64};
  const int M = 300;
  std::vector<std::vector<double>> samples(radii.size());
  for (int i = 0; i < M; ++i) {
    auto f = sample_dgff(n, Bc::zero, 31000 + std::uint64_t(i));
    for (std::size_t r = 0; r < radii.size(); ++r)
      samples[r].push_back(circle_average(f, c, c, radii[r]));
  }
  // least-squares slope of Var against log(1/eps)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    double x = -std::log(radii[r]);
    double y = summarize(samples[r]).var;
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double k = double(radii.size());
  double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("maximum of the field scales like twice the log of the grid size") {
  const int n = 513;
  int inside = 0;
  const int S = 100;
  for (int s = 0; s < S; ++s) {
    auto f = sample_dgff(n, Bc::zero, 52000 + std::uint64_t(s));
    double mx = 0.0;
    for (double v : f.values) mx = std::max(mx, v);
    double a = mx / std::log(double(n - 1));
    if (a > 1.2 && a < 2.8) ++inside;
  }
  CHECK(inside >= 95);
}

TEST_CASE("disk Green functions: symmetry, boundary behavior, identities") {
  cplx x(0.3, 0.1), y(-0.2, 0.4);
  CHECK(green_disk(x, y, GreenKind::dirichlet) ==
        doctest::Approx(green_disk(y, x, GreenKind::dirichlet)));
  CHECK(green_disk(x, y, GreenKind::neumann) ==
        doctest::Approx(green_disk(y, x, GreenKind::neumann)));
  CHECK(green_disk(x, y, GreenKind::dirichlet) > 0.0);
  // at the origin the absorbing kernel reduces to -log of the distance
  CHECK(green_disk(0.0, y, GreenKind::dirichlet) == doctest::Approx(-std::log(std::abs(y))));
  // absorbing kernel vanishes as one point approaches the rim
  CHECK(std::abs(green_disk(cplx(0.999999, 0), y, GreenKind::dirichlet)) < 1e-4);
  // reflecting and absorbing kernels differ by the image term
  CHECK(green_disk(x, y, GreenKind::neumann) + std::log(std::abs(x - y)) ==
        doctest::Approx(-std::log(std::abs(1.0 - x * std::conj(y)))));
  CHECK_THROWS_AS(green_disk(x, x, GreenKind::dirichlet), std::invalid_argument);
  CHECK_THROWS_AS(green_disk(cplx(1.5, 0), y, GreenKind::neumann), std::invalid_argument);
}

TEST_CASE("truncated harmonic expansion reproduces the reflecting-kernel covariance") {
  const int degree = 64;
  struct Pair { cplx x, y; };
  std::vector<Pair> pairs = {{cplx(0.3, 0.0), cplx(-0.4, 0.0)},
                             {cplx(0.0, 0.5), cplx(0.2, 0.3)}};
  const int M = 200000;
  std::vector<double> acc(pairs.size(), 0.0);
  for (int i = 0; i < M; ++i) {
    auto f = sample_harmonic_fbgff(degree, {}, 90000 + std::uint64_t(i));
    for (std::size_t p = 0; p < pairs.size(); ++p)
      acc[p] += eval(f, pairs[p].x) * eval(f, pairs[p].y);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    // independent closed form: the harmonic-part covariance is the
    // reflecting-boundary kernel with its log singularity removed
    double expect = 2.0 * (green_disk(pairs[p].x, pairs[p].y, GreenKind::neumann) +
                           std::log(std::abs(pairs[p].x - pairs[p].y)));
    CHECK(acc[p] / M == doctest::Approx(expect).epsilon(0.04).scale(0.1));
  }
}

TEST_CASE("harmonic field evaluation: pinning, singularities, exclusion") {
  std::vector<Singularity> sing = {{-1.5, cplx(0.4, 0.2)}, {0.7, cplx(-0.3, 0.5)}};
  auto f = sample_harmonic_fbgff(6, sing, 77);
  CHECK(eval(f, cplx(0, 0)) == doctest::Approx(0.0));
  cplx z(0.1, -0.2);
  double full = eval(f, z);
  double reg = eval_regular(f, z, sing[0].location);
  double excluded = sing[0].strength * (std::log(std::abs(z - sing[0].location)) -
                                        std::log(std::abs(sing[0].location)));
  CHECK(full == doctest::Approx(reg + excluded));
  CHECK_THROWS_AS(eval(f, sing[1].location), std::invalid_argument);
}

TEST_CASE("harmonic field gradient matches finite differences") {
  std::vector<Singularity> sing = {{2.0, cplx(0.6, -0.1)}};
  auto f = sample_harmonic_fbgff(8, sing, 123);
  const double h = 1e-5;
  for (cplx z : {cplx(0.2, 0.3), cplx(-0.4, -0.1), cplx(0.0, 0.0)}) {
    auto g = eval_gradient(f, z);
    double fdx = (eval(f, z + cplx(h, 0)) - eval(f, z - cplx(h, 0))) / (2 * h);
    double fdy = (eval(f, z + cplx(0, h)) - eval(f, z - cplx(0, h))) / (2 * h);
    CHECK(g[0] == doctest::Approx(fdx).epsilon(1e-5).scale(1.0));
    CHECK(g[1] == doctest::Approx(fdy).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("lattice serialization round trip") {
  auto f = sample_dgff(17, Bc::free, 2024);
  std::string path = "test_field_roundtrip.bin";
  save_lattice(f, path, 2024);
  auto g = load_lattice(path);
  CHECK(g.n == f.n);
  CHECK(g.bc == f.bc);
  CHECK(g.normalization == f.normalization);
  REQUIRE(g.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);
  std::remove(path.c_str());
}
