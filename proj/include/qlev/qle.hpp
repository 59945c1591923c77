#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"
#include "qlev/loewner.hpp"
#include "qlev/lqg.hpp"

namespace qlev::qle {

// Harmonic truncation of the quantum field driving the growth, evolved block
// by block. The field carries two log singularities: -(kappa+6)/(2 sqrt kappa)
// at the origin and 2/sqrt(kappa) at the current boundary atom.
struct QleState {
  double kappa = 0.0;
  int degree = 0;  // working truncation of the harmonic expansion
  field::HarmonicDiskField h;
  cplx atom;                    // boundary anchor of the 2/sqrt(kappa) log
  cplx last_sampled;            // atom drawn at the start of the last block
  double t = 0.0;               // elapsed capacity time
  int block = 0;                // completed blocks
  loewner::DrivingMeasure nu;   // accumulated atomic hull driving
  bool degraded = false;        // some refit exceeded the residual threshold
  double last_residual = 0.0;   // rms refit residual of the last block
};

// Fresh state: harmonic coefficients sampled with variance 2/k, the boundary
// atom uniform on the circle. Requires kappa > 1.
QleState qle_init(double kappa, int degree, std::uint64_t seed);

// One block of length delta: draw a new atom from the boundary measure with
// exponent -1/sqrt(kappa), grow a radial segment driven by the rotated atom,
// push the field forward through the block's reverse flow, add the fresh
// noise term, and refit the degree-N expansion on an interior circle.
QleState qle_block(const QleState& state, double delta, double dt, std::uint64_t seed);

// Deterministic core of qle_block: the atom is taken from the state as-is
// (no resampling), b is the Brownian path of the block driving (size steps+1,
// b[0] = 0) and dbp the field-noise increments (size steps; zeros give the
// noiseless pushforward).
QleState qle_block_with_paths(const QleState& state, double delta, double dt,
                              const std::vector<double>& b,
                              const std::vector<double>& dbp);

struct QleTrajectory {
  double kappa = 0.0;
  double delta = 0.0;
  double dt = 0.0;
  int degree = 0;
  std::uint64_t seed = 0;
  std::vector<QleState> states;                  // states[0] is the initial state
  std::vector<cplx> atoms;                       // atom drawn per block
  std::vector<lqg::CircleMeasure> nu_snapshots;  // boundary measure per block start
};

QleTrajectory qle_run(double kappa, double delta, double T, int degree, double dt,
                      std::uint64_t seed);

struct DriftSigma {
  double drift = 0.0;
  double sigma = 0.0;
};

// Instantaneous coefficients of the field evolution at the start of a block:
// drift = -grad h(z) . Phi(u, z) + (1/sqrt kappa) Pstar(z, u)
//         + Q dPbar/dtheta(z, u),  sigma = Pstar(z, u).
// A log term anchored at the origin is excluded from the gradient; its
// transport is already carried by the Pstar term.
DriftSigma qle_drift(const field::HarmonicDiskField& h, cplx z, cplx u, double kappa);

// Writes states.csv, hulls.csv, atoms.csv, nu_snapshots.csv, manifest.json
// into the given directory (created if needed).
void export_qle_trajectory(const QleTrajectory& traj, const std::string& dir);

}  // namespace qlev::qle
