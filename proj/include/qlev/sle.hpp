#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/field.hpp"

namespace qlev::sle {

enum class Direction { forward, reverse };

// One sampled radial Loewner run driven by e^{i W_t} with W_t = sqrt(kappa) B_t
// (plus the force-point drift in the rho variant).  Reverse runs store the
// centered states f_t = e^{-i W_t} g_t and their derivatives; forward runs
// store the uncentered states g_t.
struct SleRun {
  double kappa = 0.0;
  Direction direction = Direction::reverse;
  std::vector<cplx> points;

  std::vector<double> t;                // time grid, size steps + 1
  std::vector<double> db;               // Brownian increments, size steps
  std::vector<double> w;                // driving angles W_t, size steps + 1
  std::vector<std::vector<cplx>> f;     // f[i][j]: state of point j at t[i]
  std::vector<std::vector<cplx>> fp;    // derivative states

  bool has_rho = false;
  double rho = 0.0;
  std::vector<cplx> v;                  // centered force point Z_t = e^{-i W_t} V_t
  bool truncated = false;               // stopped early at a force point collision
};

// Euler-Maruyama on the driving angle, classical RK4 on the flow within each
// step (the driving frozen at the step start).  The rho variant requires
// direction == reverse, |v0| = 1, v0 != 1; the run is truncated with
// truncated = true if the centered force point reaches 1.
SleRun sample_radial_sle(double kappa, double T, double dt, const std::vector<cplx>& points,
                         std::uint64_t seed, Direction direction,
                         std::optional<double> rho = std::nullopt,
                         std::optional<cplx> v0 = std::nullopt);

// Harmonic coupling functional
//   (2/sqrt(k)) log|f-1| - ((k+6)/(2 sqrt(k))) log|f| + Q log|f'|
// with Q = 2/gamma + gamma/2, gamma = min(sqrt(k), sqrt(16/k)); the rho
// variant replaces k+6 by k+6-rho and subtracts (rho/sqrt(k)) log|f - Z_t|.
// z must be one of the tracked points and t a grid time of the run; a state
// at a singularity of the formula raises domain_error.
double coupling_h(const SleRun& run, cplx z, double t);

struct ItoStats {
  int runs = 0;
  double horizon = 0.0;
  double mean = 0.0;            // empirical mean of h_T(z) - h_0(z)
  double mean_se = 0.0;
  double predicted_mean = 0.0;  // drift integral averaged over runs
  double variance = 0.0;        // empirical variance of h_T(z) - h_0(z)
  double variance_se = 0.0;
  double predicted_qv = 0.0;    // int Pbar(1, f_s(z))^2 ds averaged over runs
};

// Monte Carlo check of the drift and quadratic variation of the coupling
// functional along reverse runs.  Requires |z| <= 0.8.
ItoStats verify_fh_ito(double kappa, std::optional<double> rho, cplx z, double T, double dt,
                       int n_runs, std::uint64_t seed,
                       std::optional<cplx> v0 = std::nullopt);

// 2 pi times the Poisson kernel of the disk and friends, from
// (P + i Pbar)(z, u) = (u + z)/(u - z); dpbar_dtheta differentiates Pbar in
// the boundary angle; pstar = p - 1 vanishes at z = 0.
struct PoissonKernels {
  double p = 0.0;
  double pbar = 0.0;
  double dpbar_dtheta = 0.0;
  double pstar = 0.0;
};

PoissonKernels poisson_kernels(cplx z, cplx u);

// Integrates the image of the disk Green's function along the reverse flow
// driven by the deterministic angle function and returns the max deviation of
// its numerical time derivative from the predicted kernel product:
// P(psi(z), e^{iW}) P(psi(w), e^{iW}) in the Dirichlet case (pointwise), and
// -Pbar(1, f(z)) Pbar(1, f(w)) in the Neumann case after pairing each
// coordinate against a mean-zero two-point probe to cancel the single-point
// drift terms.
double verify_green_flow(field::GreenKind kind, const std::function<double(double)>& driving,
                         cplx z, cplx w, double T, double dt);

}  // namespace qlev::sle
