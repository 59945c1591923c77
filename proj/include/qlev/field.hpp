#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qlev/common.hpp"

namespace qlev::field {

enum class Bc { zero, free };

// Real Gaussian field on an n x n grid of sites at integer coordinates
// 0..n-1. Covariance is the 2*pi-normalized Green's function of the grid
// Laplacian (unit edge conductances) under the stated boundary condition;
// the free-boundary field is zero-mean in the eigenbasis sense (constant
// mode omitted). Lengths passed to circle_average are in lattice units.
struct LatticeField {
  int n = 0;
  Bc bc = Bc::zero;
  double normalization = kTwoPi;  // Dirichlet inner product carries 1/(2*pi)
  std::vector<double> values;     // row-major, values[y * n + x]

  double at(int x, int y) const { return values[std::size_t(y) * std::size_t(n) + std::size_t(x)]; }
  double& at(int x, int y) { return values[std::size_t(y) * std::size_t(n) + std::size_t(x)]; }
};

LatticeField sample_dgff(int n, Bc bc, std::uint64_t seed);

// Bilinear interpolation of the field at real-valued grid coordinates.
double interpolate(const LatticeField& f, double x, double y);

// Mean of the field over the circle of radius eps (lattice units) centered
// at z = (x, y); uses >= max(16, ceil(2*pi*eps)) angles. For z on the grid
// boundary only the in-grid arc is averaged; elsewhere the whole circle
// must fit inside the grid.
double circle_average(const LatticeField& f, double x, double y, double eps);

enum class GreenKind { dirichlet, neumann };

// Closed-form Green's functions of the unit disk:
// dirichlet: log|(1 - x conj(y)) / (y - x)|; neumann: -log|(x-y)(1 - x conj(y))|.
double green_disk(cplx x, cplx y, GreenKind kind);

struct Singularity {
  double strength = 0.0;  // coefficient of log|z - location|
  cplx location;          // in the closed unit disk
};

// Truncated harmonic expansion on the unit disk plus explicit log
// singularities, pinned to value 0 at the origin.
struct HarmonicDiskField {
  int degree = 0;
  std::vector<double> a;  // a[k-1] multiplies Re(z^k), 1 <= k <= degree
  std::vector<double> b;  // b[k-1] multiplies Im(z^k)
  std::vector<Singularity> singularities;
  bool pinned = true;
};

// Harmonic part of a free-boundary GFF truncated at the given degree: the
// coefficient of each degree-k monomial pair is N(0, 2/k), which gives each
// unit-Dirichlet-norm basis element (norm under the 1/(2*pi) convention) a
// standard normal coefficient. Singularities are attached verbatim.
HarmonicDiskField sample_harmonic_fbgff(int degree,
                                        const std::vector<Singularity>& singularities,
                                        std::uint64_t seed);

// Pinned evaluation: expansion plus singularity logs, minus the same
// expression at the origin.
double eval(const HarmonicDiskField& f, cplx z);
// Gradient (d/dx, d/dy) by termwise analytic differentiation.
std::array<double, 2> eval_gradient(const HarmonicDiskField& f, cplx z);
// Evaluation without the singularity terms located exactly at z0 (used by
// callers that track those logs separately); still pinned.
double eval_regular(const HarmonicDiskField& f, cplx z, cplx excluded_location);

// Serialization: small text header (n, bc, normalization, seed tag) followed
// by the raw doubles.
void save_lattice(const LatticeField& f, const std::string& path, std::uint64_t seed);
LatticeField load_lattice(const std::string& path);

}  // namespace qlev::field
