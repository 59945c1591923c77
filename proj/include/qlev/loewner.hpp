#pragma once

#include <string>
#include <vector>

#include "qlev/common.hpp"
#include "qlev/lqg.hpp"

namespace qlev::loewner {

// Piecewise-constant-in-time driving: one probability measure on the circle
// per time slice of width dt.
struct DrivingMeasure {
  double dt = 0.0;
  std::vector<lqg::CircleMeasure> slices;

  double horizon() const { return dt * double(slices.size()); }
};

DrivingMeasure uniform_driving(double T, double dt, int grid = 256);
// Point mass at a fixed angle for the whole horizon.
DrivingMeasure constant_atom_driving(double angle, double T, double dt);
// Point mass following the given angle function, sampled at slice midpoints.
DrivingMeasure atom_driving(const std::vector<double>& angles, double dt);
DrivingMeasure reversed(const DrivingMeasure& nu);

struct LoewnerState {
  double t = 0.0;
  std::vector<cplx> z;
  std::vector<bool> swallowed;
  std::vector<double> swallow_time;  // -1 while unswallowed
  double deriv0 = 1.0;               // numerically integrated g_t'(0)
};

using Trajectory = std::vector<LoewnerState>;  // one state per slice boundary

// Adaptive RK4 on dg/dt = integral of Phi(u, g) d nu_t(u) with
// Phi(u, z) = z (u + z)/(u - z); points freeze as swallowed when they reach
// |z| >= 1 - swallow_tol (a collapsing step near an atom also freezes the
// offending point at that time).
Trajectory solve_forward(const DrivingMeasure& nu, const std::vector<cplx>& points,
                         double T, double dt_max = 1e-2, double tol = 1e-10);
// Sign-flipped field df/dt = -integral Phi(u, f) d nu_t(u).
Trajectory solve_reverse(const DrivingMeasure& nu, const std::vector<cplx>& points,
                         double T, double dt_max = 1e-2, double tol = 1e-10);

// g_t^{-1}(w), computed by running the reverse flow with time-reversed
// driving (no Newton iteration involved).
cplx invert_at(const DrivingMeasure& nu, double t, cplx w, double dt_max = 1e-2,
               double tol = 1e-10);

// Trace of the hull complement boundary: image of the circle of radius
// 1 - probe_eps under g_t^{-1}.
std::vector<cplx> hull_boundary(const DrivingMeasure& nu, double t, int resolution,
                                double probe_eps = 1e-3);

// Max over sampled times of the sup-norm difference of the inverse maps on
// the circle |w| = r.
double caratheodory_distance(const DrivingMeasure& a, const DrivingMeasure& b, double r,
                             const std::vector<double>& times, int samples = 64);

// Discrete conformal welding of a simple curve growing from the unit circle:
// unrolls the curve tip-by-tip with closed-form constant-driving slit maps
// and returns the resulting atomic driving on a uniform dt grid.
DrivingMeasure extract_driving(const std::vector<cplx>& curve, double dt);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_driving_csv(const DrivingMeasure& nu, const std::string& path);
void write_polyline_csv(const std::vector<cplx>& pts, const std::string& path);

}  // namespace qlev::loewner
