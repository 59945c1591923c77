#include "qlev/qle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "qlev/io.hpp"
#include "qlev/sle.hpp"

namespace qlev::qle {

namespace {

double quantum_q(double kappa) {
  double gamma = std::min(std::sqrt(kappa), std::sqrt(16.0 / kappa));
  return 2.0 / gamma + gamma / 2.0;
}

cplx phi(cplx u, cplx z) { return z * (u + z) / (u - z); }

cplx phi_z(cplx u, cplx z) {
  return (u + 2.0 * z) / (u - z) + z * (u + z) / ((u - z) * (u - z));
}

// one RK4 step of (f, f') under df = -phi(u, f), u frozen
void rk4_point(cplx u, double h, cplx& f, cplx& fp) {
  auto df = [&](cplx x) { return -phi(u, x); };
  auto dfp = [&](cplx x, cplx xp) { return -xp * phi_z(u, x); };
  cplx k1 = df(f), l1 = dfp(f, fp);
  cplx k2 = df(f + 0.5 * h * k1), l2 = dfp(f + 0.5 * h * k1, fp + 0.5 * h * l1);
  cplx k3 = df(f + 0.5 * h * k2), l3 = dfp(f + 0.5 * h * k2, fp + 0.5 * h * l2);
  cplx k4 = df(f + h * k3), l4 = dfp(f + h * k3, fp + h * l3);
  f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  fp += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
}

const field::Singularity* find_boundary_atom(const field::HarmonicDiskField& h) {
  for (const auto& s : h.singularities)
    if (std::abs(s.location) > 1.0 - 1e-9) return &s;
  return nullptr;
}

double origin_strength(const field::HarmonicDiskField& h) {
  double s = 0.0;
  for (const auto& sg : h.singularities)
    if (std::abs(sg.location) == 0.0) s += sg.strength;
  return s;
}

// Move the boundary log from u_old to u_new without changing the field:
// log|z - u| for |u| = 1 expands as sum_k Re[(-conj(u)^k / k) z^k] after
// pinning, so the difference of the two expansions is absorbed into the
// coefficients (truncated at the working degree).
void relabel_atom(field::HarmonicDiskField& h, cplx u_new) {
  for (auto& s : h.singularities) {
    if (std::abs(s.location) <= 1.0 - 1e-9) continue;
    cplx co = std::conj(s.location), cn = std::conj(u_new);
    cplx po = 1.0, pn = 1.0;
    for (int k = 1; k <= h.degree; ++k) {
      po *= co;
      pn *= cn;
      cplx diff = s.strength * (pn - po) / double(k);  // c_old - c_new
      h.a[std::size_t(k - 1)] += diff.real();
      h.b[std::size_t(k - 1)] -= diff.imag();
    }
    s.location = u_new;
    return;
  }
  throw std::logic_error("relabel_atom: no boundary singularity");
}

}  // namespace

QleState qle_init(double kappa, int degree, std::uint64_t seed) {
  if (kappa <= 1.0) throw std::out_of_range("qle_init: kappa must exceed 1");
  if (degree < 0) throw std::invalid_argument("qle_init: degree < 0");
  QleState st;
  st.kappa = kappa;
  st.degree = degree;
  Rng rng(seed);
  double sk = std::sqrt(kappa);
  cplx u = std::polar(1.0, rng.uniform(0.0, kTwoPi));
  std::vector<field::Singularity> sings = {{-(kappa + 6.0) / (2.0 * sk), cplx(0.0, 0.0)},
                                           {2.0 / sk, u}};
  st.h = field::sample_harmonic_fbgff(degree, sings, rng.bits());
  st.atom = u;
  st.last_sampled = u;
  return st;
}

QleState qle_block_with_paths(const QleState& state, double delta, double dt,
                              const std::vector<double>& b,
                              const std::vector<double>& dbp) {
  if (dt <= 0.0 || delta < dt)
    throw std::invalid_argument("qle_block_with_paths: need delta >= dt > 0");
  const std::size_t n = std::size_t(std::llround(delta / dt));
  const double h = delta / double(n);
  if (b.size() != n + 1 || b[0] != 0.0)
    throw std::invalid_argument("qle_block_with_paths: driving path must have steps+1 entries starting at 0");
  if (dbp.size() != n)
    throw std::invalid_argument("qle_block_with_paths: noise increments must have one entry per step");

  const double kappa = state.kappa;
  const double sk = std::sqrt(kappa);
  const double c = (kappa + 6.0) / (2.0 * sk);
  const double q = quantum_q(kappa);
  const cplx u = state.atom;
  const double s_origin = origin_strength(state.h);
  const field::Singularity* atom_sing = find_boundary_atom(state.h);
  if (!atom_sing) throw std::logic_error("qle_block_with_paths: state has no boundary atom");
  const double s_atom = atom_sing->strength;

  // evaluation lattice: fitting ring plus an interior validation ring
  const int m1 = std::max(128, 4 * state.degree);
  const int m2 = 32;
  const double r1 = 0.9, r2 = 0.45;
  std::vector<cplx> pts;
  pts.reserve(std::size_t(m1 + m2));
  for (int i = 0; i < m1; ++i) pts.push_back(std::polar(r1, kTwoPi * i / m1));
  for (int i = 0; i < m2; ++i) pts.push_back(std::polar(r2, kTwoPi * i / m2));

  const cplx u_next = u * std::polar(1.0, sk * b[n]);

  std::vector<double> value(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    cplx f = pts[j], fp(1.0, 0.0);
    double noise = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cplx v = u * std::polar(1.0, sk * b[n - k]);  // reverse-time driving
      double pstar = std::real((v + f) / (v - f)) - 1.0;
      noise += pstar * dbp[k];
      rk4_point(v, h, f, fp);
    }
    // exact pushforward of the harmonic part (expansion plus boundary log),
    // with the origin log transported through the capacity change
    double val = field::eval_regular(state.h, f, cplx(0.0, 0.0));
    val += s_origin * (std::log(std::abs(f)) - std::log(std::abs(pts[j])));
    val += q * std::log(std::abs(fp));
    val += noise;
    value[j] = val;
  }

  // subtract the singular terms of the updated field, then refit the
  // expansion on the outer ring (orthogonal trigonometric projection)
  // value already carries the origin log only through the capacity ratio
  // log|f/z|, so just the relocated boundary log is removed here
  std::vector<double> target(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j)
    target[j] = value[j] - s_atom * std::log(std::abs(pts[j] - u_next));
  QleState out = state;
  double a0 = 0.0;
  for (int i = 0; i < m1; ++i) a0 += target[std::size_t(i)];
  a0 /= double(m1);
  double rk = 1.0;
  for (int k = 1; k <= state.degree; ++k) {
    rk *= r1;
    double ca = 0.0, cb = 0.0;
    for (int i = 0; i < m1; ++i) {
      double th = kTwoPi * i / m1;
      ca += target[std::size_t(i)] * std::cos(k * th);
      cb += target[std::size_t(i)] * std::sin(k * th);
    }
    out.h.a[std::size_t(k - 1)] = 2.0 * ca / (double(m1) * rk);
    out.h.b[std::size_t(k - 1)] = 2.0 * cb / (double(m1) * rk);
  }

  auto ring_rms = [&](std::size_t off, int m) {
    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
      cplx z = pts[off + std::size_t(i)];
      double fit = a0;
      cplx zk = 1.0;
      for (int k = 1; k <= state.degree; ++k) {
        zk *= z;
        fit += out.h.a[std::size_t(k - 1)] * zk.real() + out.h.b[std::size_t(k - 1)] * zk.imag();
      }
      double d = target[off + std::size_t(i)] - fit;
      ss += d * d;
    }
    return std::sqrt(ss / m);
  };
  // the outer-ring misfit is dominated by the deliberate degree-N truncation
  // of the boundary structure; the inner ring cross-validates the fit itself
  out.last_residual = ring_rms(std::size_t(m1), m2);
  out.degraded = state.degraded || out.last_residual > 1e-3;

  for (auto& sg : out.h.singularities)
    if (std::abs(sg.location) > 1.0 - 1e-9) sg.location = u_next;
  out.atom = u_next;
  out.t = state.t + delta;
  out.block = state.block + 1;

  if (out.nu.slices.empty()) out.nu.dt = h;
  else if (std::abs(out.nu.dt - h) > 1e-12)
    throw std::invalid_argument("qle_block_with_paths: slice width differs from accumulated driving");
  // right-endpoint slice atoms: reversing the slice order then reproduces the
  // block's internal reverse-flow discretization exactly, and the last slice
  // coincides with the new anchor
  for (std::size_t k = 0; k < n; ++k) {
    lqg::CircleMeasure atom;
    atom.is_density = false;
    atom.atoms = {{wrap_angle(std::arg(u) + sk * b[k + 1]), 1.0}};
    atom.cdf = {1.0};
    out.nu.slices.push_back(std::move(atom));
  }
  return out;
}

QleState qle_block(const QleState& state, double delta, double dt, std::uint64_t seed) {
  Rng rng(seed);
  auto measure = lqg::boundary_measure_truncated(state.h, -1.0 / std::sqrt(state.kappa),
                                                 state.degree, 4096);
  cplx u_new = std::polar(1.0, lqg::sample_circle(measure, rng));
  QleState st = state;
  relabel_atom(st.h, u_new);
  st.atom = u_new;
  st.last_sampled = u_new;

  const std::size_t n = std::size_t(std::llround(delta / dt));
  const double h = delta / double(n);
  std::vector<double> b(n + 1, 0.0), dbp(n);
  for (std::size_t k = 0; k < n; ++k) {
    b[k + 1] = b[k] + rng.normal() * std::sqrt(h);
    dbp[k] = rng.normal() * std::sqrt(h);
  }
  return qle_block_with_paths(st, delta, dt, b, dbp);
}

QleTrajectory qle_run(double kappa, double delta, double T, int degree, double dt,
                      std::uint64_t seed) {
  if (delta <= 0.0 || T < 0.0) throw std::invalid_argument("qle_run: bad time parameters");
  QleTrajectory traj;
  traj.kappa = kappa;
  traj.delta = delta;
  traj.dt = dt;
  traj.degree = degree;
  traj.seed = seed;
  QleState st = qle_init(kappa, degree, seed);
  traj.states.push_back(st);
  int blocks = int(std::llround(T / delta));
  for (int l = 0; l < blocks; ++l) {
    traj.nu_snapshots.push_back(lqg::boundary_measure_truncated(
        st.h, -1.0 / std::sqrt(kappa), degree, 4096));
    st = qle_block(st, delta, dt, seed ^ splitmix64(0x71c9u + std::uint64_t(l)));
    traj.states.push_back(st);
    traj.atoms.push_back(st.last_sampled);
  }
  return traj;
}

DriftSigma qle_drift(const field::HarmonicDiskField& h, cplx z, cplx u, double kappa) {
  if (std::abs(z) >= 1.0) throw std::invalid_argument("qle_drift: z must be in the open disk");
  auto k = sle::poisson_kernels(z, u);
  DriftSigma out;
  out.sigma = k.pstar;
  // the origin log rides along with the Pstar term, so strip it before
  // taking the gradient
  field::HarmonicDiskField stripped = h;
  stripped.singularities.clear();
  for (const auto& s : h.singularities)
    if (std::abs(s.location) > 0.0) stripped.singularities.push_back(s);
  auto grad = field::eval_gradient(stripped, z);
  cplx vel = phi(u, z);
  out.drift = -(grad[0] * vel.real() + grad[1] * vel.imag()) +
              (1.0 / std::sqrt(kappa)) * k.pstar + quantum_q(kappa) * k.dpbar_dtheta;
  return out;
}

void export_qle_trajectory(const QleTrajectory& traj, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<std::string> header = {"block", "t", "atom_re", "atom_im", "residual", "degraded"};
  for (int k = 1; k <= traj.degree; ++k) {
    header.push_back("a" + std::to_string(k));
    header.push_back("b" + std::to_string(k));
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& st : traj.states) {
    std::vector<std::string> row = {std::to_string(st.block), io::format_double(st.t),
                                    io::format_double(st.atom.real()),
                                    io::format_double(st.atom.imag()),
                                    io::format_double(st.last_residual),
                                    st.degraded ? "1" : "0"};
    for (int k = 1; k <= traj.degree; ++k) {
      row.push_back(io::format_double(st.h.a[std::size_t(k - 1)]));
      row.push_back(io::format_double(st.h.b[std::size_t(k - 1)]));
    }
    rows.push_back(std::move(row));
  }
  io::write_csv(dir + "/states.csv", header, rows);

  rows.clear();
  const auto& nu = traj.states.back().nu;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    auto poly = loewner::hull_boundary(nu, traj.states[i].t, 64);
    for (std::size_t j = 0; j < poly.size(); ++j)
      rows.push_back({std::to_string(traj.states[i].block), std::to_string(j),
                      io::format_double(poly[j].real()), io::format_double(poly[j].imag())});
  }
  io::write_csv(dir + "/hulls.csv", {"block", "index", "re", "im"}, rows);

  rows.clear();
  for (std::size_t i = 0; i < traj.atoms.size(); ++i)
    rows.push_back({std::to_string(i + 1), io::format_double(wrap_angle(std::arg(traj.atoms[i])))});
  io::write_csv(dir + "/atoms.csv", {"block", "angle"}, rows);

  rows.clear();
  for (std::size_t i = 0; i < traj.nu_snapshots.size(); ++i) {
    const auto& m = traj.nu_snapshots[i];
    for (std::size_t j = 0; j < m.weights.size(); ++j)
      rows.push_back({std::to_string(i), std::to_string(j), io::format_double(m.weights[j])});
  }
  io::write_csv(dir + "/nu_snapshots.csv", {"block", "cell", "weight"}, rows);

  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("export_qle_trajectory: cannot open manifest");
  out << "{\n"
      << "  \"kappa\": " << io::format_double(traj.kappa) << ",\n"
      << "  \"delta\": " << io::format_double(traj.delta) << ",\n"
      << "  \"degree\": " << traj.degree << ",\n"
      << "  \"dt\": " << io::format_double(traj.dt) << ",\n"
      << "  \"seed\": " << traj.seed << ",\n"
      << "  \"blocks\": " << traj.atoms.size() << ",\n"
      << "  \"version\": \"1.0\"\n"
      << "}\n";
}

}  // namespace qlev::qle
