#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/lqg.hpp"

namespace qlev::growth {

// Undirected weighted graph with a designated growth seed and a walk target
// (possibly an absorbing super-vertex standing in for infinity).
struct GrowthGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, conductance)
  int seed = 0;
  int target = 0;

  void add_edge(int u, int v, double w = 1.0) {
    adj[std::size_t(u)].push_back({v, w});
    adj[std::size_t(v)].push_back({u, w});
  }
};

// w x h grid with unit conductances; site (x, y) has index y*w + x. When
// to_infinity is set an absorbing super-vertex joined to every boundary site
// is appended and used as the target.
GrowthGraph grid_graph(int w, int h, int seed_vertex, int target_vertex,
                       bool to_infinity = false);

// Adjacency graph of tiling leaves (squares sharing a boundary segment),
// seeded at the leaf containing the given site; target is a super-vertex
// joined to the leaves on the tiling's outer edge.
GrowthGraph tiling_graph(const lqg::SquareTiling& t, int seed_x, int seed_y);

enum class Clock { steps, capacity };
enum class Sampler { exact, walk };

struct GrowthStep {
  long step = 0;
  int from = 0;    // cluster endpoint of the added edge
  int to = 0;      // newly absorbed vertex
  double weight = 0.0;  // selection weight (harmonic measure of the edge)
  double clock = 0.0;
};

struct GrowthCluster {
  std::vector<bool> in_cluster;
  std::vector<GrowthStep> steps;
  Clock clock = Clock::steps;
  bool exhausted = false;  // ran out of free vertices or absorbed the target
};

// Half-edge (u, c) with u free and c in the cluster.
struct MeasuredEdge {
  int from = 0;  // free endpoint
  int to = 0;    // cluster endpoint
  double prob = 0.0;
};

// Probability that a random walk from the target first enters the cluster
// through each edge; solved exactly via the Dirichlet problem (phi = 1 at
// the target, 0 on the cluster) with edge probability proportional to
// conductance times phi at the free endpoint.
std::vector<MeasuredEdge> harmonic_measure_exact(const GrowthGraph& g,
                                                 const std::vector<bool>& cluster,
                                                 int target);

MeasuredEdge harmonic_measure_walk(const GrowthGraph& g, const std::vector<bool>& cluster,
                                   int target, Rng& rng);

// Dielectric-breakdown growth: selection weight b(e)^eta with b the exact
// harmonic measure (eta = 0 Eden, eta = 1 DLA; the walk sampler realizes
// eta = 1 natively, other eta always use the exact weights). The capacity
// clock proposes proportionally to b^{2+eta} and accepts with probability
// (min b / b)^2, advancing the clock by b^2 per accepted step.
GrowthCluster grow_dbm(const GrowthGraph& g, double eta, long steps, Clock clock,
                       Sampler sampler, std::uint64_t seed);

// First-passage percolation ball from the seed under i.i.d. Exp(rate) edge
// passage times (rate <= 0 uses the graph's own weights deterministically).
// Stops at the time horizon or after max_vertices absorbed vertices,
// whichever binds first; Dijkstra ties break by vertex index.
GrowthCluster fpp_ball(const GrowthGraph& g, double rate, double time_horizon,
                       long max_vertices, std::uint64_t seed);

void write_cluster_csv(const GrowthCluster& c, const std::string& path);
// Growth-time colormap for grid clusters (vertex index = y*w + x).
void render_grid_growth_ppm(const GrowthCluster& c, int w, int h, const std::string& path);
// Growth-time colormap over tiling leaves (cluster vertices index t.leaves).
void render_tiling_growth_ppm(const lqg::SquareTiling& t, const GrowthCluster& c,
                              const std::string& path);

}  // namespace qlev::growth
