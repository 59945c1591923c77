#include "qlev/sle.hpp"

#include <cmath>
#include <stdexcept>

namespace qlev::sle {

namespace {

cplx phi(cplx u, cplx z) { return z * (u + z) / (u - z); }

// d/dz of phi(u, z)
cplx phi_z(cplx u, cplx z) {
  return (u + 2.0 * z) / (u - z) + z * (u + z) / ((u - z) * (u - z));
}

double pbar_centered(cplx f) { return std::imag((1.0 + f) / (1.0 - f)); }

// one RK4 step of (g, g') under dg = s phi(u, g), u frozen
void rk4_point(cplx u, double s, double h, cplx& g, cplx& gp) {
  auto dg = [&](cplx x) { return s * phi(u, x); };
  auto dgp = [&](cplx x, cplx xp) { return s * xp * phi_z(u, x); };
  cplx k1 = dg(g), l1 = dgp(g, gp);
  cplx k2 = dg(g + 0.5 * h * k1), l2 = dgp(g + 0.5 * h * k1, gp + 0.5 * h * l1);
  cplx k3 = dg(g + 0.5 * h * k2), l3 = dgp(g + 0.5 * h * k2, gp + 0.5 * h * l2);
  cplx k4 = dg(g + h * k3), l4 = dgp(g + h * k3, gp + h * l3);
  g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  gp += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

// angle ODE of the force point, dV = -phi(U, V) with V = e^{i a}
double force_rate(double theta, double a) {
  cplx u = std::polar(1.0, theta), v = std::polar(1.0, a);
  return -std::imag((u + v) / (u - v));
}

double rk4_force(double theta, double a, double h) {
  double k1 = force_rate(theta, a);
  double k2 = force_rate(theta, a + 0.5 * h * k1);
  double k3 = force_rate(theta, a + 0.5 * h * k2);
  double k4 = force_rate(theta, a + h * k3);
  return a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    s += 0.5 * (y[i - 1] + y[i]) * (t[i] - t[i - 1]);
  return s;
}

}  // namespace

SleRun sample_radial_sle(double kappa, double T, double dt, const std::vector<cplx>& points,
                         std::uint64_t seed, Direction direction,
                         std::optional<double> rho, std::optional<cplx> v0) {
  if (kappa < 0.0) throw std::invalid_argument("sample_radial_sle: kappa < 0");
  if (dt <= 0.0 || T < 0.0) throw std::invalid_argument("sample_radial_sle: bad time grid");
  for (cplx z : points)
    if (std::abs(z) >= 1.0) throw std::invalid_argument("sample_radial_sle: point outside disk");
  if (rho) {
    if (direction != Direction::reverse)
      throw std::invalid_argument("sample_radial_sle: rho variant is a reverse flow");
    if (!v0 || std::abs(std::abs(*v0) - 1.0) > 1e-9 || std::abs(*v0 - 1.0) < 1e-6)
      throw std::invalid_argument("sample_radial_sle: v0 must lie on the circle, away from 1");
  }

  SleRun run;
  run.kappa = kappa;
  run.direction = direction;
  run.points = points;
  run.has_rho = rho.has_value();
  run.rho = rho.value_or(0.0);

  const std::size_t m = points.size();
  const double s = direction == Direction::forward ? 1.0 : -1.0;
  const double sk = std::sqrt(kappa);

  std::vector<cplx> g = points, gp(m, cplx(1.0, 0.0));
  std::vector<bool> frozen(m, false);
  double theta = 0.0;
  double phiv = rho ? std::arg(*v0) : 0.0;
  double gap_prev = rho ? std::remainder(phiv - theta, kTwoPi) : 0.0;

  run.t.push_back(0.0);
  run.w.push_back(0.0);
  run.f.push_back(g);
  run.fp.push_back(gp);
  if (rho) run.v.push_back(*v0);

  int n = T <= 0.0 ? 0 : int(std::ceil(T / dt - 1e-12));
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    double t0 = run.t.back();
    double t1 = std::min(T, t0 + dt);
    double h = t1 - t0;
    cplx u = std::polar(1.0, theta);

    for (std::size_t j = 0; j < m; ++j) {
      if (frozen[j]) continue;
      rk4_point(u, s, h, g[j], gp[j]);
      if (direction == Direction::forward && std::abs(g[j]) >= 1.0 - 1e-6) frozen[j] = true;
    }

    double dbi = rng.normal() * std::sqrt(h);
    double drift = 0.0;
    if (rho) {
      cplx v = std::polar(1.0, phiv);
      drift = 0.5 * *rho * std::imag((v + u) / (v - u));
      phiv = rk4_force(theta, phiv, h);
    }
    theta += sk * dbi + drift * h;

    run.db.push_back(dbi);
    run.t.push_back(t1);
    run.w.push_back(theta);
    if (direction == Direction::reverse) {
      cplx rot = std::polar(1.0, -theta);
      std::vector<cplx> fc(m), fpc(m);
      for (std::size_t j = 0; j < m; ++j) {
        fc[j] = rot * g[j];
        fpc[j] = rot * gp[j];
      }
      run.f.push_back(std::move(fc));
      run.fp.push_back(std::move(fpc));
    } else {
      run.f.push_back(g);
      run.fp.push_back(gp);
    }
    if (rho) {
      double gap = std::remainder(phiv - theta, kTwoPi);
      run.v.push_back(std::polar(1.0, gap));
      // collision: the gap shrinks below tolerance or the discrete step jumps
      // across zero (the gap ODE is stiff near the collision)
      bool crossed = gap * gap_prev < 0.0 && std::abs(gap) + std::abs(gap_prev) < kPi;
      gap_prev = gap;
      if (std::abs(gap) < 1e-2 || crossed) {
        run.truncated = true;
        break;
      }
    }
  }
  return run;
}

double coupling_h(const SleRun& run, cplx z, double t) {
  std::size_t j = run.points.size();
  for (std::size_t k = 0; k < run.points.size(); ++k)
    if (std::abs(run.points[k] - z) < 1e-9) {
      j = k;
      break;
    }
  if (j == run.points.size()) throw std::invalid_argument("coupling_h: z is not a tracked point");
  std::size_t i = run.t.size();
  for (std::size_t k = 0; k < run.t.size(); ++k)
    if (std::abs(run.t[k] - t) < 1e-9) {
      i = k;
      break;
    }
  if (i == run.t.size()) throw std::invalid_argument("coupling_h: t is not a grid time");

  double k = run.kappa;
  if (k <= 0.0) throw std::domain_error("coupling_h: requires kappa > 0");
  cplx f = run.f[i][j], fp = run.fp[i][j];
  if (std::abs(f) < 1e-12 || std::abs(f - 1.0) < 1e-12 || std::abs(fp) < 1e-300)
    throw std::domain_error("coupling_h: singular state");
  double sk = std::sqrt(k);
  double gamma = std::min(sk, std::sqrt(16.0 / k));
  double q = 2.0 / gamma + gamma / 2.0;
  double val = (2.0 / sk) * std::log(std::abs(f - 1.0)) -
               ((k + 6.0 - run.rho) / (2.0 * sk)) * std::log(std::abs(f)) +
               q * std::log(std::abs(fp));
  if (run.has_rho) {
    cplx zc = run.v[i];
    if (std::abs(f - zc) < 1e-12) throw std::domain_error("coupling_h: singular state");
    val -= (run.rho / sk) * std::log(std::abs(f - zc));
  }
  return val;
}

ItoStats verify_fh_ito(double kappa, std::optional<double> rho, cplx z, double T, double dt,
                       int n_runs, std::uint64_t seed, std::optional<cplx> v0) {
  if (kappa <= 0.0) throw std::invalid_argument("verify_fh_ito: kappa <= 0");
  if (std::abs(z) > 0.8) throw std::invalid_argument("verify_fh_ito: |z| > 0.8");
  if (rho && !v0) v0 = cplx(-1.0, 0.0);
  double sk = std::sqrt(kappa);

  std::vector<double> dh(std::size_t(n_runs), 0.0);
  std::vector<double> qv(std::size_t(n_runs), 0.0);
  std::vector<double> drift(std::size_t(n_runs), 0.0);
  for (int r = 0; r < n_runs; ++r) {
    auto run = sample_radial_sle(kappa, T, dt, {z}, seed + 0x9e3779b97f4a7c15ull * std::uint64_t(r),
                                 Direction::reverse, rho, v0);
    dh[std::size_t(r)] = coupling_h(run, z, run.t.back()) - coupling_h(run, z, 0.0);
    std::vector<double> pb2(run.t.size()), dr(run.t.size());
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      double pb = pbar_centered(run.f[i][0]);
      pb2[i] = pb * pb;
      if (rho) {
        cplx a = 0.5 * *rho * (run.v[i] + 1.0) / (run.v[i] - 1.0);
        dr[i] = -std::real((a - 1.0) * (2.0 - *rho)) / (2.0 * sk);
      } else {
        dr[i] = 1.0 / sk;
      }
    }
    qv[std::size_t(r)] = trapezoid(run.t, pb2);
    drift[std::size_t(r)] = trapezoid(run.t, dr);
  }

  ItoStats out;
  out.runs = n_runs;
  out.horizon = T;
  auto sh = summarize(dh);
  out.mean = sh.mean;
  out.mean_se = sh.sem;
  out.variance = sh.var;
  out.variance_se = n_runs > 1 ? sh.var * std::sqrt(2.0 / double(n_runs - 1)) : 0.0;
  out.predicted_mean = summarize(drift).mean;
  out.predicted_qv = summarize(qv).mean;
  return out;
}

PoissonKernels poisson_kernels(cplx z, cplx u) {
  if (std::abs(z) >= 1.0 || std::abs(std::abs(u) - 1.0) > 1e-9)
    throw std::invalid_argument("poisson_kernels: need |z| < 1 and |u| = 1");
  PoissonKernels out;
  cplx psi = (u + z) / (u - z);
  out.p = std::real(psi);
  out.pbar = std::imag(psi);
  out.dpbar_dtheta = std::real(-2.0 * z * u / ((u - z) * (u - z)));
  out.pstar = out.p - 1.0;
  return out;
}

double verify_green_flow(field::GreenKind kind, const std::function<double(double)>& driving,
                         cplx z, cplx w, double T, double dt) {
  if (std::abs(z - w) < 1e-12) throw std::invalid_argument("verify_green_flow: z == w");
  if (T <= 0.0) return 0.0;
  int n = std::max(2, int(std::llround(T / dt)));
  double h = T / n;

  std::vector<cplx> pts;
  if (kind == field::GreenKind::dirichlet) {
    pts = {z, w};
  } else {
    for (double b : {0.35, 0.41, 0.29}) {
      pts = {z * std::polar(1.0, b), z * std::polar(1.0, -b), w * std::polar(1.0, b),
             w * std::polar(1.0, -b)};
      bool ok = true;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          ok &= std::abs(pts[i] - pts[j]) > 1e-9;
      if (ok) break;
    }
  }

  std::vector<cplx> psi = pts;
  std::vector<double> gval(std::size_t(n) + 1), pred(std::size_t(n) + 1);
  for (int k = 0; k <= n; ++k) {
    double tk = k * h;
    cplx uk = std::polar(1.0, driving(tk));
    if (kind == field::GreenKind::dirichlet) {
      gval[std::size_t(k)] = field::green_disk(psi[0], psi[1], field::GreenKind::dirichlet);
      cplx p0 = (uk + psi[0]) / (uk - psi[0]), p1 = (uk + psi[1]) / (uk - psi[1]);
      pred[std::size_t(k)] = std::real(p0) * std::real(p1);
    } else {
      auto gn = [](cplx a, cplx b) { return field::green_disk(a, b, field::GreenKind::neumann); };
      gval[std::size_t(k)] = gn(psi[0], psi[2]) - gn(psi[0], psi[3]) - gn(psi[1], psi[2]) +
                             gn(psi[1], psi[3]);
      cplx rot = std::conj(uk);
      double dz = pbar_centered(rot * psi[0]) - pbar_centered(rot * psi[1]);
      double dw = pbar_centered(rot * psi[2]) - pbar_centered(rot * psi[3]);
      pred[std::size_t(k)] = -dz * dw;
    }
    if (k == n) break;
    // RK4 with the driving evaluated at the stage times
    for (std::size_t j = 0; j < psi.size(); ++j) {
      cplx x = psi[j];
      cplx um = std::polar(1.0, driving(tk + 0.5 * h));
      cplx ue = std::polar(1.0, driving(tk + h));
      cplx k1 = -phi(uk, x);
      cplx k2 = -phi(um, x + 0.5 * h * k1);
      cplx k3 = -phi(um, x + 0.5 * h * k2);
      cplx k4 = -phi(ue, x + h * k3);
      psi[j] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  double dev = 0.0;
  for (int k = 1; k < n; ++k) {
    double num = (gval[std::size_t(k) + 1] - gval[std::size_t(k) - 1]) / (2.0 * h);
    dev = std::max(dev, std::abs(num - pred[std::size_t(k)]));
  }
  return dev;
}

}  // namespace qlev::sle
