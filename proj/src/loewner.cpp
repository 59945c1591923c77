#include "qlev/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlev/io.hpp"

namespace qlev::loewner {

namespace {

constexpr double kSwallowTol = 1e-6;
constexpr double kMinStep = 1e-12;

struct Quadrature {
  std::vector<cplx> u;
  std::vector<double> w;
};

Quadrature quadrature_of(const lqg::CircleMeasure& m) {
  Quadrature q;
  if (m.is_density) {
    double dth = kTwoPi / m.grid;
    q.u.reserve(m.weights.size());
    q.w.reserve(m.weights.size());
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
      if (m.weights[j] == 0.0) continue;
      q.u.push_back(std::polar(1.0, dth * double(j)));
      q.w.push_back(m.weights[j]);
    }
  } else {
    for (const auto& [angle, mass] : m.atoms) {
      q.u.push_back(std::polar(1.0, angle));
      q.w.push_back(mass);
    }
  }
  return q;
}

cplx field_at(const Quadrature& q, cplx z) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < q.u.size(); ++j)
    acc += q.w[j] * z * (q.u[j] + z) / (q.u[j] - z);
  return acc;
}

struct FlowState {
  std::vector<cplx> z;
  double deriv0 = 1.0;
};

FlowState rk4_step(const Quadrature& q, const FlowState& s, const std::vector<bool>& frozen,
                   double h, double sign) {
  auto deriv = [&](const FlowState& y) {
    FlowState d;
    d.z.resize(y.z.size());
    for (std::size_t i = 0; i < y.z.size(); ++i)
      d.z[i] = frozen[i] ? cplx(0.0) : sign * field_at(q, y.z[i]);
    d.deriv0 = sign * y.deriv0;  // Phi_z(u, 0) = 1 for every u
    return d;
  };
  auto advance = [&](const FlowState& y, const FlowState& d, double a) {
    FlowState out = y;
    for (std::size_t i = 0; i < y.z.size(); ++i) out.z[i] += a * d.z[i];
    out.deriv0 += a * d.deriv0;
    return out;
  };
  FlowState k1 = deriv(s);
  FlowState k2 = deriv(advance(s, k1, h / 2));
  FlowState k3 = deriv(advance(s, k2, h / 2));
  FlowState k4 = deriv(advance(s, k3, h));
  FlowState out = s;
  for (std::size_t i = 0; i < s.z.size(); ++i)
    out.z[i] += (h / 6.0) * (k1.z[i] + 2.0 * k2.z[i] + 2.0 * k3.z[i] + k4.z[i]);
  out.deriv0 += (h / 6.0) * (k1.deriv0 + 2.0 * k2.deriv0 + 2.0 * k3.deriv0 + k4.deriv0);
  return out;
}

Trajectory solve(const DrivingMeasure& nu, const std::vector<cplx>& points, double T,
                 double dt_max, double tol, double sign) {
  for (cplx z : points)
    if (std::abs(z) >= 1.0) throw std::invalid_argument("loewner solve: point outside open disk");
  LoewnerState st;
  st.t = 0.0;
  st.z = points;
  st.swallowed.assign(points.size(), false);
  st.swallow_time.assign(points.size(), -1.0);
  st.deriv0 = 1.0;
  Trajectory traj;
  traj.push_back(st);
  if (T <= 1e-14) return traj;
  if (nu.slices.empty() || nu.dt <= 0.0)
    throw std::invalid_argument("loewner solve: empty driving measure");
  if (T > nu.horizon() + 1e-12)
    throw std::invalid_argument("loewner solve: horizon exceeds the driving data");
  double t = 0.0;
  std::size_t slice = 0;
  while (t < T - 1e-14) {
    double slice_end = std::min(T, nu.dt * double(slice + 1));
    const Quadrature q = quadrature_of(nu.slices[std::min(slice, nu.slices.size() - 1)]);
    FlowState y{st.z, st.deriv0};
    double local = t;
    double h = std::min(dt_max, slice_end - local);
    while (local < slice_end - 1e-14) {
      h = std::min(h, slice_end - local);
      FlowState full = rk4_step(q, y, st.swallowed, h, sign);
      FlowState half = rk4_step(q, rk4_step(q, y, st.swallowed, h / 2, sign), st.swallowed,
                                h / 2, sign);
      double err = std::abs(full.deriv0 - half.deriv0);
      for (std::size_t i = 0; i < y.z.size(); ++i)
        if (!st.swallowed[i]) err = std::max(err, std::abs(full.z[i] - half.z[i]));
      if (err > tol) {
        if (h > kMinStep) {
          h /= 2;
          continue;
        }
        // step collapse: report the points that ran into the boundary as
        // swallowed, then retry from the pre-step state
        bool any = false;
        std::size_t worst = 0;
        double worst_r = -1.0;
        for (std::size_t i = 0; i < y.z.size(); ++i) {
          if (st.swallowed[i]) continue;
          double r = std::abs(y.z[i]);
          if (r > worst_r) {
            worst_r = r;
            worst = i;
          }
          if (r >= 1.0 - 1e-3) {
            st.swallowed[i] = true;
            st.swallow_time[i] = local;
            y.z[i] /= r;
            any = true;
          }
        }
        if (!any && worst_r > 0.0) {
          st.swallowed[worst] = true;
          st.swallow_time[worst] = local;
          y.z[worst] /= worst_r;
        }
        h = std::min(dt_max, slice_end - local);
        continue;
      }
      y = half;
      local += h;
      for (std::size_t i = 0; i < y.z.size(); ++i)
        if (!st.swallowed[i] && std::abs(y.z[i]) >= 1.0 - kSwallowTol) {
          st.swallowed[i] = true;
          st.swallow_time[i] = local;
          y.z[i] /= std::abs(y.z[i]) * (1.0 + 1e-12);  // clamp onto the circle
        }
      if (err < tol / 32.0) h = std::min(2.0 * h, dt_max);
    }
    st.z = y.z;
    st.deriv0 = y.deriv0;
    st.t = slice_end;
    t = slice_end;
    ++slice;
    traj.push_back(st);
  }
  return traj;
}

}  // namespace

DrivingMeasure uniform_driving(double T, double dt, int grid) {
  DrivingMeasure nu;
  nu.dt = dt;
  lqg::CircleMeasure m;
  m.is_density = true;
  m.grid = grid;
  m.weights.assign(std::size_t(grid), 1.0 / grid);
  std::size_t k = std::size_t(std::ceil(T / dt - 1e-12));
  nu.slices.assign(std::max<std::size_t>(k, 1), m);
  return nu;
}

DrivingMeasure constant_atom_driving(double angle, double T, double dt) {
  DrivingMeasure nu;
  nu.dt = dt;
  lqg::CircleMeasure m;
  m.is_density = false;
  m.atoms = {{angle, 1.0}};
  std::size_t k = std::size_t(std::ceil(T / dt - 1e-12));
  nu.slices.assign(std::max<std::size_t>(k, 1), m);
  return nu;
}

DrivingMeasure atom_driving(const std::vector<double>& angles, double dt) {
  DrivingMeasure nu;
  nu.dt = dt;
  for (double a : angles) {
    lqg::CircleMeasure m;
    m.is_density = false;
    m.atoms = {{a, 1.0}};
    nu.slices.push_back(m);
  }
  return nu;
}

DrivingMeasure reversed(const DrivingMeasure& nu) {
  DrivingMeasure out = nu;
  std::reverse(out.slices.begin(), out.slices.end());
  return out;
}

Trajectory solve_forward(const DrivingMeasure& nu, const std::vector<cplx>& points, double T,
                         double dt_max, double tol) {
  return solve(nu, points, T, dt_max, tol, 1.0);
}

Trajectory solve_reverse(const DrivingMeasure& nu, const std::vector<cplx>& points, double T,
                         double dt_max, double tol) {
  return solve(nu, points, T, dt_max, tol, -1.0);
}

cplx invert_at(const DrivingMeasure& nu, double t, cplx w, double dt_max, double tol) {
  // Remark: running the reverse ODE with time-reversed driving for time t
  // evaluates g_t^{-1} without any root finding.
  DrivingMeasure rev = nu;
  std::size_t used = std::size_t(std::ceil(t / nu.dt - 1e-12));
  rev.slices.assign(nu.slices.begin(), nu.slices.begin() + std::min(used, nu.slices.size()));
  std::reverse(rev.slices.begin(), rev.slices.end());
  auto traj = solve(rev, {w}, t, dt_max, tol, -1.0);
  return traj.back().z[0];
}

std::vector<cplx> hull_boundary(const DrivingMeasure& nu, double t, int resolution,
                                double probe_eps) {
  std::vector<cplx> out;
  out.resize(std::size_t(resolution));
  DrivingMeasure rev = nu;
  std::size_t used = std::size_t(std::ceil(t / nu.dt - 1e-12));
  rev.slices.assign(nu.slices.begin(), nu.slices.begin() + std::min(used, nu.slices.size()));
  std::reverse(rev.slices.begin(), rev.slices.end());
  std::vector<cplx> probes;
  probes.resize(std::size_t(resolution));
  for (int j = 0; j < resolution; ++j)
    probes[std::size_t(j)] = std::polar(1.0 - probe_eps, kTwoPi * j / resolution);
  auto traj = solve(rev, probes, t, 1e-2, 1e-10, -1.0);
  return traj.back().z;
}

double caratheodory_distance(const DrivingMeasure& a, const DrivingMeasure& b, double r,
                             const std::vector<double>& times, int samples) {
  double tmax = 0.0;
  for (double t : times) tmax = std::max(tmax, t);
  if (r >= std::exp(-tmax))
    throw std::invalid_argument("caratheodory_distance: radius exceeds the conformal radius");
  double d = 0.0;
  for (double t : times) {
    std::vector<cplx> probes;
    probes.resize(std::size_t(samples));
    for (int j = 0; j < samples; ++j)
      probes[std::size_t(j)] = std::polar(r, kTwoPi * j / samples);
    auto make_rev = [&](const DrivingMeasure& nu) {
      DrivingMeasure rev = nu;
      std::size_t used = std::size_t(std::ceil(t / nu.dt - 1e-12));
      rev.slices.assign(nu.slices.begin(),
                        nu.slices.begin() + std::min(used, nu.slices.size()));
      std::reverse(rev.slices.begin(), rev.slices.end());
      return rev;
    };
    auto ta = solve(make_rev(a), probes, t, 1e-2, 1e-11, -1.0);
    auto tb = solve(make_rev(b), probes, t, 1e-2, 1e-11, -1.0);
    for (int j = 0; j < samples; ++j)
      d = std::max(d, std::abs(ta.back().z[std::size_t(j)] - tb.back().z[std::size_t(j)]));
  }
  return d;
}

namespace {

// Slit uniformization: with driving fixed at u over capacity tau the forward
// map is g(z) = u G(e^tau m(conj(u) z)) with m(z) = z/(1+z)^2 and G the
// branch of m^{-1} mapping into the disk.
cplx slit_m(cplx z) { return z / ((1.0 + z) * (1.0 + z)); }

cplx slit_minv(cplx v) {
  if (std::abs(v) < 1e-300) return 0.0;
  cplx s = std::sqrt(1.0 - 4.0 * v);
  cplx z1 = ((1.0 - 2.0 * v) - s) / (2.0 * v);
  cplx z2 = 1.0 / z1;  // the two preimages multiply to 1
  return std::abs(z1) <= std::abs(z2) ? z1 : z2;
}

// Find alpha with m(e^{-i alpha} w) real in (0, 1/4); tau = log(1/(4 m)).
std::pair<double, double> solve_slit(cplx w) {
  double alpha = std::arg(w);
  auto imf = [&](double a) { return slit_m(std::polar(1.0, -a) * w).imag(); };
  bool ok = false;
  for (int it = 0; it < 60; ++it) {
    cplx rw = std::polar(1.0, -alpha) * w;
    cplx q = slit_m(rw);
    cplx dq = (1.0 - rw) / std::pow(1.0 + rw, 3) * (cplx(0.0, -1.0) * rw);
    if (std::abs(q.imag()) < 1e-14) {
      ok = true;
      break;
    }
    if (std::abs(dq.imag()) < 1e-300) break;
    alpha -= q.imag() / dq.imag();
  }
  if (!ok) {
    // bisection fallback around the argument of w
    double lo = std::arg(w) - 1.5, hi = std::arg(w) + 1.5;
    double flo = imf(lo);
    bool found = false;
    const int K = 600;
    for (int i = 1; i <= K; ++i) {
      double x = lo + (hi - lo) * i / K;
      double fx = imf(x);
      if (flo == 0.0 || flo * fx < 0.0) {
        double a = lo + (hi - lo) * (i - 1) / K, b = x;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (a + b);
          if (imf(a) * imf(mid) <= 0.0)
            b = mid;
          else
            a = mid;
        }
        double cand = 0.5 * (a + b);
        double re = slit_m(std::polar(1.0, -cand) * w).real();
        if (re > 0.0 && re < 0.25) {
          alpha = cand;
          found = true;
          break;
        }
      }
      flo = fx;
    }
    if (!found) throw std::invalid_argument("extract_driving: cannot uniformize curve point");
  }
  double q = slit_m(std::polar(1.0, -alpha) * w).real();
  if (!(q > 0.0 && q < 0.25))
    throw std::invalid_argument("extract_driving: curve point outside the slit range");
  return {alpha, std::log(1.0 / (4.0 * q))};
}

bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return d1 * d2 < 0.0 && d3 * d4 < 0.0;
}

}  // namespace

DrivingMeasure extract_driving(const std::vector<cplx>& curve, double dt) {
  if (curve.size() < 2) throw std::invalid_argument("extract_driving: need at least two points");
  if (std::abs(std::abs(curve[0]) - 1.0) > 1e-6)
    throw std::invalid_argument("extract_driving: curve must start on the unit circle");
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (std::abs(curve[i]) >= 1.0)
      throw std::invalid_argument("extract_driving: curve leaves the open disk");
    if (std::abs(curve[i]) < 1e-9)
      throw std::invalid_argument("extract_driving: curve passes through the origin");
  }
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < curve.size(); ++j)
      if (segments_intersect(curve[i], curve[i + 1], curve[j], curve[j + 1]))
        throw std::invalid_argument("extract_driving: curve is self-intersecting");

  std::vector<cplx> mapped(curve.begin() + 1, curve.end());
  std::vector<double> angle_of;  // driving angle per welding step
  std::vector<double> tau_of;
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    auto [alpha, tau] = solve_slit(mapped[k]);
    angle_of.push_back(wrap_angle(alpha));
    tau_of.push_back(tau);
    cplx u = std::polar(1.0, alpha);
    double etau = std::exp(tau);
    for (std::size_t j = k + 1; j < mapped.size(); ++j)
      mapped[j] = u * slit_minv(etau * slit_m(std::conj(u) * mapped[j]));
  }
  double T = 0.0;
  for (double tau : tau_of) T += tau;
  std::size_t n_slices = std::max<std::size_t>(1, std::size_t(std::llround(T / dt)));
  DrivingMeasure nu;
  nu.dt = dt;
  std::size_t k = 0;
  double consumed = 0.0;
  for (std::size_t i = 0; i < n_slices; ++i) {
    double mid = (double(i) + 0.5) * dt;
    while (k + 1 < tau_of.size() && consumed + tau_of[k] < mid) consumed += tau_of[k++];
    lqg::CircleMeasure m;
    m.is_density = false;
    m.atoms = {{angle_of[k], 1.0}};
    nu.slices.push_back(m);
  }
  return nu;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& st : traj)
    for (std::size_t i = 0; i < st.z.size(); ++i)
      rows.push_back({io::format_double(st.t), std::to_string(i),
                      io::format_double(st.z[i].real()), io::format_double(st.z[i].imag()),
                      st.swallowed[i] ? "1" : "0"});
  io::write_csv(path, {"t", "point", "re", "im", "swallowed"}, rows);
}

void write_driving_csv(const DrivingMeasure& nu, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < nu.slices.size(); ++s) {
    const auto& m = nu.slices[s];
    double t = nu.dt * double(s);
    if (m.is_density) {
      for (std::size_t j = 0; j < m.weights.size(); ++j)
        rows.push_back({io::format_double(t), io::format_double(kTwoPi * double(j) / m.grid),
                        io::format_double(m.weights[j])});
    } else {
      for (const auto& [angle, mass] : m.atoms)
        rows.push_back({io::format_double(t), io::format_double(angle), io::format_double(mass)});
    }
  }
  io::write_csv(path, {"t", "angle", "mass"}, rows);
}

void write_polyline_csv(const std::vector<cplx>& pts, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (cplx z : pts)
    rows.push_back({io::format_double(z.real()), io::format_double(z.imag())});
  io::write_csv(path, {"re", "im"}, rows);
}

}  // namespace qlev::loewner
