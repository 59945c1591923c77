#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"
#include "qlev/growth.hpp"
#include "qlev/lqg.hpp"

using namespace qlev;
using namespace qlev::growth;

TEST_CASE("exact harmonic measure: forced edge and symmetric square") {
  // path 0-1-2 with cluster {0}: the only entry edge is (1,0)
  GrowthGraph path;
  path.n = 3;
  path.adj.resize(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  path.seed = 0;
  path.target = 2;
  std::vector<bool> cl = {true, false, false};
  auto e = harmonic_measure_exact(path, cl, 2);
  REQUIRE(e.size() == 1);
  CHECK(e[0].from == 1);
  CHECK(e[0].to == 0);
  CHECK(e[0].prob == doctest::Approx(1.0));

  // 4-cycle, cluster vertex opposite the target: both entry edges get 1/2
  GrowthGraph cyc;
  cyc.n = 4;
  cyc.adj.resize(4);
  cyc.add_edge(0, 1);
  cyc.add_edge(1, 2);
  cyc.add_edge(2, 3);
  cyc.add_edge(3, 0);
  cyc.seed = 0;
  cyc.target = 2;
  std::vector<bool> cl2 = {true, false, false, false};
  auto e2 = harmonic_measure_exact(cyc, cl2, 2);
  REQUIRE(e2.size() == 2);
  double total = 0.0;
  for (const auto& me : e2) {
    CHECK(me.prob == doctest::Approx(0.5).epsilon(1e-10));
    total += me.prob;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  // target in a component the cluster cannot be entered from is degenerate
  GrowthGraph split;
  split.n = 4;
  split.adj.resize(4);
  split.add_edge(0, 1);
  split.add_edge(2, 3);
  split.seed = 0;
  split.target = 3;
  std::vector<bool> cl3 = {true, false, false, false};
  CHECK_THROWS_AS(harmonic_measure_exact(split, cl3, 3), std::runtime_error);
  // an absorbed target is rejected outright
  std::vector<bool> cl4 = {true, false, false, true};
  CHECK_THROWS_AS(harmonic_measure_exact(split, cl4, 3), std::invalid_argument);
}

TEST_CASE("walk sampler agrees with the exact solver on a 5x5 grid") {
  auto g = grid_graph(5, 5, 12, 0);
  std::vector<bool> cl(25, false);
  cl[12] = true;
  auto exact = harmonic_measure_exact(g, cl, 0);
  std::map<std::pair<int, int>, double> p;
  for (const auto& e : exact) p[{e.from, e.to}] = e.prob;
  Rng rng(314159);
  std::map<std::pair<int, int>, double> freq;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) {
    auto e = harmonic_measure_walk(g, cl, 0, rng);
    freq[{e.from, e.to}] += 1.0;
  }
  std::vector<double> pe, pw;
  for (const auto& [k, v] : p) {
    pe.push_back(v);
    pw.push_back(freq.count(k) ? freq[k] : 0.0);
  }
  CHECK(total_variation(pe, pw) < 0.01);
}

TEST_CASE("eta = 0 growth picks cluster-adjacent edges uniformly") {
  auto g = grid_graph(4, 4, 5, 15);
  const int N = 100000;
  std::map<int, long> first;
  for (int i = 0; i < N; ++i) {
    auto c = grow_dbm(g, 0.0, 1, Clock::steps, Sampler::exact, 9000 + std::uint64_t(i));
    REQUIRE(c.steps.size() == 1);
    first[c.steps[0].to]++;
  }
  REQUIRE(first.size() == 4);  // interior seed has 4 neighbors
  double chi2 = 0.0;
  for (auto& [v, cnt] : first) {
    double expect = N / 4.0;
    chi2 += (cnt - expect) * (cnt - expect) / expect;
  }
  CHECK(chi2 < 16.27);  // chi-square 3 dof at p = 0.001
}

TEST_CASE("walk-based DLA step matches the exact eta = 1 distribution") {
  auto g = grid_graph(7, 7, 24, 0);
  // grow a small fixed cluster first
  std::vector<bool> cl(49, false);
  cl[24] = true;
  cl[25] = true;
  cl[31] = true;
  auto exact = harmonic_measure_exact(g, cl, 0);
  std::map<std::pair<int, int>, double> p;
  for (const auto& e : exact) p[{e.from, e.to}] = e.prob;
  Rng rng(777);
  std::map<std::pair<int, int>, double> freq;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) {
    auto e = harmonic_measure_walk(g, cl, 0, rng);
    freq[{e.from, e.to}] += 1.0;
  }
  std::vector<double> pe, pw;
  for (const auto& [k, v] : p) {
    pe.push_back(v);
    pw.push_back(freq.count(k) ? freq[k] : 0.0);
  }
  CHECK(total_variation(pe, pw) < 0.01);
}

TEST_CASE("growth cluster invariants: connectivity and seed membership") {
  auto g = grid_graph(9, 9, 40, 81, true);
  for (Sampler s : {Sampler::exact, Sampler::walk}) {
    auto c = grow_dbm(g, 1.0, 25, Clock::steps, s, 4242);
    CHECK(c.in_cluster[40]);
    // the run either completes or stops with status after absorbing the target
    CHECK((c.steps.size() == 25 || c.exhausted));
    REQUIRE(!c.steps.empty());
    std::set<int> members = {40};
    for (const auto& st : c.steps) {
      CHECK(members.count(st.from));  // each added edge touches the prior cluster
      CHECK_FALSE(members.count(st.to));
      members.insert(st.to);
    }
  }
}

TEST_CASE("capacity clock reproduces the plain eta = 1 selection law") {
  auto g = grid_graph(5, 5, 12, 0);
  std::vector<bool> cl(25, false);
  cl[12] = true;
  auto exact = harmonic_measure_exact(g, cl, 0);
  std::map<int, double> p;
  for (const auto& e : exact) p[e.from] += e.prob;
  std::map<int, double> freq;
  const int N = 200000;
  double last_clock = -1.0;
  for (int i = 0; i < N; ++i) {
    auto c = grow_dbm(g, 1.0, 1, Clock::capacity, Sampler::exact, 100 + std::uint64_t(i));
    REQUIRE(c.steps.size() == 1);
    freq[c.steps[0].to] += 1.0;
    CHECK(c.steps[0].clock > 0.0);
    last_clock = c.steps[0].clock;
  }
  CHECK(last_clock > 0.0);
  std::vector<double> pe, pf;
  for (const auto& [k, v] : p) {
    pe.push_back(v);
    pf.push_back(freq.count(k) ? freq[k] : 0.0);
  }
  CHECK(total_variation(pe, pf) < 0.01);
}

TEST_CASE("first-passage ball: trivial sizes and deterministic metric") {
  auto g = grid_graph(7, 7, 24, 0);
  auto one = fpp_ball(g, 1.0, 0.0, 1, 1);
  CHECK(one.in_cluster[24]);
  CHECK(one.steps.empty());
  int count = 0;
  for (bool b : one.in_cluster) count += b ? 1 : 0;
  CHECK(count == 1);
  // unit weights: the ball of radius 2 is the graph-distance ball
  auto ball = fpp_ball(g, 0.0, 2.0, 0, 1);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 7; ++x) {
      int d = std::abs(x - 3) + std::abs(y - 3);
      CHECK(ball.in_cluster[std::size_t(y * 7 + x)] == (d <= 2));
    }
}

TEST_CASE("exponential passage times induce the Eden transition kernel") {
  // vertices 0..3; edges 0-1, 0-2, 0-3, 1-2; cluster {0,1} reaches 2 via two
  // edges and 3 via one, so Eden picks 2 with probability 2/3
  GrowthGraph g;
  g.n = 5;
  g.adj.resize(5);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(0, 3);
  g.add_edge(1, 2);
  g.add_edge(3, 4);  // keeps the target out of reach of the two counted steps
  g.seed = 0;
  g.target = 4;
  const int N = 200000;
  long fpp_first = 0, fpp_two = 0, eden_first = 0, eden_two = 0;
  for (int i = 0; i < N; ++i) {
    auto c = fpp_ball(g, 1.0, 0.0, 3, 50 + std::uint64_t(i));
    REQUIRE(c.steps.size() == 2);
    if (c.steps[0].to != 1) continue;
    ++fpp_first;
    if (c.steps[1].to == 2) ++fpp_two;
  }
  for (int i = 0; i < N; ++i) {
    auto c = grow_dbm(g, 0.0, 2, Clock::steps, Sampler::exact, 90 + std::uint64_t(i));
    REQUIRE(c.steps.size() == 2);
    if (c.steps[0].to != 1) continue;
    ++eden_first;
    if (c.steps[1].to == 2) ++eden_two;
  }
  // first step uniform over the three seed edges for both dynamics
  CHECK(double(fpp_first) / N == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK(double(eden_first) / N == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  // conditional second step: two of three boundary edges lead to vertex 2
  CHECK(double(fpp_two) / double(fpp_first) == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK(double(eden_two) / double(eden_first) == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}

TEST_CASE("tiling adjacency graph is connected and supports growth") {
  auto f = sample_dgff(64, field::Bc::zero, 616);
  auto tiling = lqg::square_decompose(lqg::lqg_mass(f, std::sqrt(2.0)), 1.0 / 64.0);
  auto g = tiling_graph(tiling, 32, 32);
  CHECK(g.n == int(tiling.leaves.size()) + 1);
  // adjacency is symmetric
  for (int u = 0; u < g.n; ++u)
    for (auto& [v, w] : g.adj[std::size_t(u)]) {
      bool back = false;
      for (auto& [x, w2] : g.adj[std::size_t(v)]) back |= (x == u);
      CHECK(back);
    }
  auto c = grow_dbm(g, 1.0, 12, Clock::steps, Sampler::walk, 2025);
  CHECK(c.steps.size() <= 12);
  CHECK(!c.steps.empty());
  write_cluster_csv(c, "test_growth_cluster.csv");
  render_tiling_growth_ppm(tiling, c, "test_growth_tiling.ppm");
  std::remove("test_growth_cluster.csv");
  std::remove("test_growth_tiling.ppm");
}
