#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"

namespace qlev::lqg {

// Normalized site masses exp(gamma * h) / Z on an n x n grid.
struct MassGrid {
  int n = 0;
  std::vector<double> mass;  // row-major, mass[y * n + x]
  double total = 0.0;

  double at(int x, int y) const { return mass[std::size_t(y) * std::size_t(n) + std::size_t(x)]; }
  double& at(int x, int y) { return mass[std::size_t(y) * std::size_t(n) + std::size_t(x)]; }
};

MassGrid lqg_mass(const field::LatticeField& f, double gamma);

// Quadtree of dyadic squares; a node splits four ways while its mass is at
// least delta, stopping at single sites ("floor" leaves).
struct TileNode {
  int x = 0, y = 0;    // lower-left corner in site coordinates
  int size = 0;        // side length in sites (power of two)
  int depth = 0;
  double mass = 0.0;
  bool leaf = true;
  bool floor_leaf = false;  // mass still >= delta but square is a single site
  int child[4] = {-1, -1, -1, -1};
};

struct SquareTiling {
  int n = 0;
  double delta = 0.0;
  std::vector<TileNode> nodes;  // nodes[0] is the root
  std::vector<int> leaves;      // indices of leaf nodes
};

SquareTiling square_decompose(const MassGrid& mass, double delta);

void write_tiling_csv(const SquareTiling& t, const std::string& path);
// Leaves colored by Euclidean size (any monotone palette), one pixel per site.
void render_tiling_ppm(const SquareTiling& t, const std::string& path);

// Probability measure on the circle: either a finite list of atoms or a
// piecewise-uniform density on M equal angular cells centered at 2*pi*j/M.
struct CircleMeasure {
  bool is_density = true;
  int grid = 0;
  std::vector<double> weights;                    // cell masses, sum to 1
  std::vector<std::pair<double, double>> atoms;   // (angle, mass), sum to 1
  std::vector<double> cdf;                        // cumulative over cells/atoms
};

// Density proportional to exp(a * h^trunc(e^{i theta})) times
// |e^{i theta} - x_i|^{a * strength_i} for each boundary singularity
// (interior singularities enter through the exponent directly). Cells
// containing an integrable boundary singularity use the analytic cell
// average of the singular factor. compensate subtracts a^2 * Var(h^trunc)
// from the exponent pointwise before normalizing.
CircleMeasure boundary_measure_truncated(const field::HarmonicDiskField& f, double a,
                                         int trunc, int grid_resolution,
                                         bool compensate = false);

double sample_circle(const CircleMeasure& m, Rng& rng);

inline double sample_circle(const CircleMeasure& m, std::uint64_t seed) {
  Rng rng(seed);
  return sample_circle(m, rng);
}

}  // namespace qlev::lqg
