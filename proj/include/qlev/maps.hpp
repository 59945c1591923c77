#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qlev/common.hpp"

namespace qlev::maps {

using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

// Number of rooted type II triangulations of a disc with m+2 boundary edges
// and n internal vertices, in exact integer arithmetic. The trailing factor
// of the published formula is implemented as the factorial (2m+2n+2)!: only
// that reading yields integer counts matching the enumeration oracle.
bigint phi(long n, long m);

// Independent brute-force oracle: exhaustively constructs every rooted type
// II triangulation of the (m+2)-gon with n interior vertices by recursive
// root-face case analysis and returns how many distinct objects were built.
// Guarded to m + n <= 6.
std::uint64_t enumerate_triangulations(long m, long n);

// ---------------------------------------------------------------------------
// Peeling toward a uniformly located target edge.

enum class PeelEvent { terminate, new_vertex, split };

struct NecklaceRecord {
  PeelEvent event;
  int direction = 0;        // new-vertex steps: 0 = left, 1 = right
  long m1 = -1, n1 = -1;    // split steps: region data (region 1 first)
  long m2 = -1, n2 = -1;
  int target_region = 0;    // split steps: 1 or 2
  long bubble_m = -1, bubble_n = -1;  // the region swallowed by the necklace
  long outer_boundary = 0;  // boundary length m+2 after the step
  long offset = 0;          // gluing offset (re-randomized in eden mode)
  long triangles = 0;       // triangles observed by this step
};

struct PeelingState {
  long m = 0;
  long n = 0;
  long steps = 0;
  bool terminated = false;
  std::vector<NecklaceRecord> necklaces;
};

// One exact row of the peeling transition kernel at (m,n): probabilities for
// termination, the new-vertex event, and every ordered split, as exact
// rationals. Entries sum to exactly 1.
struct KernelEntry {
  PeelEvent event;
  long m1 = -1, n1 = -1, m2 = -1, n2 = -1;  // split data when applicable
  bigrat prob;
};
std::vector<KernelEntry> peel_kernel_row(long m, long n, const std::string& mode);

PeelingState peel_step(PeelingState state, const std::string& mode, Rng& rng);
PeelingState explore_until_target(long m0, long n0, const std::string& mode, Rng& rng);

// Uniformly re-randomizes every necklace's gluing offset; the (m,n) path is
// untouched.
void reshuffle_necklaces(std::vector<NecklaceRecord>& log, Rng& rng);

// ---------------------------------------------------------------------------
// Mullin bijection between quadrant walks and tree-decorated rooted maps.

enum class WalkStep : std::uint8_t { xp, xm, yp, ym };  // +x, -x, +y, -y

struct MullinWalk {
  std::vector<WalkStep> steps;
  bool valid() const;  // stays in the closed quadrant, returns to the origin
};

// Rooted planar map with spanning-tree decoration, stored as a rotation
// system. Half-edges are paired h <-> h^1; vertex rotations are counter-
// clockwise lists of half-edge ids.
struct DecoratedMap {
  std::vector<int> vertex_of;              // per half-edge
  std::vector<std::vector<int>> rotation;  // per vertex, ccw order
  std::vector<bool> tree;                  // per edge (half-edge id / 2)
  int root_half_edge = -1;
  int root_vertex = 0;

  int twin(int h) const { return h ^ 1; }
  int num_edges() const { return int(vertex_of.size()) / 2; }
  int num_vertices() const { return int(rotation.size()); }
  int num_faces() const;  // by tracing the face permutation
  int euler_characteristic() const;
  int rot_next(int h) const;  // next half-edge ccw at the same vertex
};

DecoratedMap mullin(const MullinWalk& walk);
MullinWalk mullin_inverse(const DecoratedMap& map);

// Uniform walk of length 2n (uniform tree-decorated rooted map with n edges).
MullinWalk sample_mullin_walk(int n, Rng& rng);

// All valid walks of length 2n (for exhaustive round-trip checks).
std::vector<MullinWalk> all_mullin_walks(int n);

// ---------------------------------------------------------------------------
// Wilson's algorithm and LERW on a plain adjacency-list graph.

using AdjGraph = std::vector<std::vector<int>>;

std::vector<int> lerw(const AdjGraph& g, int a, int b, Rng& rng);  // vertex path
// Returns parent array of the uniform spanning tree rooted at root
// (parent[root] = -1).
std::vector<int> wilson_ust(const AdjGraph& g, int root, Rng& rng);

// ---------------------------------------------------------------------------
// DLA vs reshuffled-LERW comparison on Mullin-sampled maps.

struct DlaLerwStats {
  std::map<int, long> lerw_edges;             // edge-count histogram
  std::map<int, long> dla_edges;
  // statistic of the k-step unzipped map: (tip degree, boundary degree sum),
  // encoded as tip_degree * 1000 + boundary_degree_sum; -1 when the process
  // reached the target in fewer than k steps
  std::map<int, long> lerw_kstep;
  std::map<int, long> dla_kstep;
  int k = 0;
};

DlaLerwStats compare_dla_lerw(int n_edges, int k, long samples, Rng& rng);

}  // namespace qlev::maps
