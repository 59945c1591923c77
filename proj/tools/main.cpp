#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qlev/acceptance.hpp"
#include "qlev/common.hpp"
#include "qlev/field.hpp"
#include "qlev/growth.hpp"
#include "qlev/io.hpp"
#include "qlev/loewner.hpp"
#include "qlev/lqg.hpp"
#include "qlev/maps.hpp"
#include "qlev/qle.hpp"
#include "qlev/scaling.hpp"
#include "qlev/sle.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using qlev::cplx;
using qlev::io::format_double;

struct RunContext {
  std::string subcommand;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string format = "csv";
  int jobs = 1;
  std::map<std::string, std::string> params;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string path(const std::string& name) {
    std::filesystem::create_directories(out_dir);
    outputs.push_back(name);
    return out_dir + "/" + name;
  }

  void set(const std::string& key, const std::string& value) { params[key] = value; }
  void set(const std::string& key, double value) { params[key] = format_double(value); }
  void set(const std::string& key, long value) { params[key] = std::to_string(value); }
  void set(const std::string& key, int value) { params[key] = std::to_string(value); }

  void write_manifest() {
    nlohmann::json j;
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["seed"] = seed;
    j["format"] = format;
    j["jobs"] = jobs;
    j["params"] = params;
    j["outputs"] = outputs;
    j["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/manifest.json");
    os << j.dump(2) << "\n";
  }
};

// CSV always; a JSON copy of the same table when --format json is selected.
void write_table(RunContext& ctx, const std::string& name,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  qlev::io::write_csv(ctx.path(name + ".csv"), header, rows);
  if (ctx.format == "json") {
    nlohmann::json j;
    j["header"] = header;
    j["rows"] = rows;
    std::ofstream os(ctx.path(name + ".json"));
    os << j.dump() << "\n";
  }
}

bool want_image(const RunContext& ctx) { return ctx.format == "ppm"; }

// ---------------------------------------------------------------------------

void render_lattice_ppm(const qlev::field::LatticeField& f, const std::string& path) {
  double lo = f.values[0], hi = f.values[0];
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi > lo ? hi - lo : 1.0;
  std::vector<std::uint8_t> px(std::size_t(f.n) * std::size_t(f.n) * 3);
  for (int y = 0; y < f.n; ++y)
    for (int x = 0; x < f.n; ++x) {
      std::uint8_t rgb[3];
      qlev::io::rainbow((f.at(x, y) - lo) / span, rgb);
      std::size_t o = (std::size_t(y) * std::size_t(f.n) + std::size_t(x)) * 3;
      px[o] = rgb[0];
      px[o + 1] = rgb[1];
      px[o + 2] = rgb[2];
    }
  qlev::io::write_ppm(path, f.n, f.n, px);
}

int cmd_gff_sample(RunContext& ctx, int n, const std::string& bc) {
  auto kind = bc == "free" ? qlev::field::Bc::free : qlev::field::Bc::zero;
  auto f = qlev::field::sample_dgff(n, kind, ctx.seed);
  std::vector<std::vector<std::string>> rows;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      rows.push_back({std::to_string(x), std::to_string(y), format_double(f.at(x, y))});
  write_table(ctx, "field", {"x", "y", "value"}, rows);
  qlev::field::save_lattice(f, ctx.path("field.bin"), ctx.seed);
  if (want_image(ctx)) render_lattice_ppm(f, ctx.path("field.ppm"));
  std::cout << "sampled " << n << "x" << n << " field (" << bc << " boundary)\n";
  return 0;
}

int cmd_lqg_tile(RunContext& ctx, int n, double gamma, double delta) {
  auto f = qlev::field::sample_dgff(n, qlev::field::Bc::zero, ctx.seed);
  auto mass = qlev::lqg::lqg_mass(f, gamma);
  auto t = qlev::lqg::square_decompose(mass, delta);
  qlev::lqg::write_tiling_csv(t, ctx.path("tiles.csv"));
  if (want_image(ctx)) qlev::lqg::render_tiling_ppm(t, ctx.path("tiles.ppm"));
  std::cout << "tiling with " << t.leaves.size() << " leaves at delta " << format_double(delta)
            << "\n";
  return 0;
}

int cmd_grow(RunContext& ctx, const std::string& model, double eta, const std::string& clock,
             const std::string& sampler, int width, int height, long steps) {
  if (model == "eden") eta = 0.0;
  if (model == "dla") eta = 1.0;
  int seed_vertex = (height / 2) * width + width / 2;
  auto g = qlev::growth::grid_graph(width, height, seed_vertex, 0, true);
  auto ck = clock == "capacity" ? qlev::growth::Clock::capacity : qlev::growth::Clock::steps;
  auto sp = sampler == "walk" ? qlev::growth::Sampler::walk : qlev::growth::Sampler::exact;
  auto c = qlev::growth::grow_dbm(g, eta, steps, ck, sp, ctx.seed);
  qlev::growth::write_cluster_csv(c, ctx.path("cluster.csv"));
  if (want_image(ctx))
    qlev::growth::render_grid_growth_ppm(c, width, height, ctx.path("growth.ppm"));
  std::cout << model << " cluster: " << c.steps.size() << " growth steps\n";
  return 0;
}

int cmd_fpp(RunContext& ctx, int width, int height, double rate, double horizon,
            long max_vertices) {
  int seed_vertex = (height / 2) * width + width / 2;
  auto g = qlev::growth::grid_graph(width, height, seed_vertex, 0, false);
  auto c = qlev::growth::fpp_ball(g, rate, horizon, max_vertices, ctx.seed);
  qlev::growth::write_cluster_csv(c, ctx.path("cluster.csv"));
  if (want_image(ctx))
    qlev::growth::render_grid_growth_ppm(c, width, height, ctx.path("growth.ppm"));
  long absorbed = 0;
  for (bool b : c.in_cluster) absorbed += b ? 1 : 0;
  std::cout << "first-passage ball with " << absorbed << " vertices\n";
  return 0;
}

// refine the swallow time of probe z: bisect the first crossing of the
// swallow threshold, then extrapolate the remaining gap to the unit circle
double refine_swallow(const qlev::loewner::DrivingMeasure& nu, cplx z, double t_coarse,
                      double dt_max) {
  auto radius_at = [&](double s) {
    auto tr = qlev::loewner::solve_forward(nu, {z}, s, dt_max, 1e-10);
    if (tr.back().swallowed[0]) return 1.0;
    return std::abs(tr.back().z[0]);
  };
  // bisect the crossing of a radius the slice quadrature still resolves, then
  // extrapolate the remaining gap linearly in log|g_t(z)| (exact when the
  // radius grows exponentially, second-order accurate otherwise)
  const double thr = 0.95;
  double hi = std::min(t_coarse + 1e-9, nu.horizon());
  double lo = std::max(0.0, hi - 2.0 * dt_max - nu.dt);
  while (lo > 0.0 && radius_at(lo) >= thr) lo = std::max(0.0, lo - 2.0 * dt_max);
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (radius_at(mid) >= thr)
      hi = mid;
    else
      lo = mid;
  }
  double d = 1e-2;
  double r1 = radius_at(std::max(0.0, lo - d));
  double r2 = radius_at(lo);
  if (r1 <= 0.0 || r2 <= r1) return lo;
  double rate_log = (std::log(r2) - std::log(r1)) / d;
  return lo - std::log(r2) / rate_log;
}

qlev::loewner::DrivingMeasure make_driving(bool uniform, double atom, double T, double dt) {
  if (uniform) return qlev::loewner::uniform_driving(T, dt);
  return qlev::loewner::constant_atom_driving(atom, T, dt);
}

int cmd_loewner_forward(RunContext& ctx, bool uniform, double atom, double T, double dt,
                        double dt_max, std::vector<double> probe, bool reverse) {
  cplx z(probe.empty() ? 0.5 : probe[0], probe.size() > 1 ? probe[1] : 0.0);
  auto nu = make_driving(uniform, atom, T, dt);
  auto traj = reverse ? qlev::loewner::solve_reverse(nu, {z}, T, dt_max, 1e-10)
                      : qlev::loewner::solve_forward(nu, {z}, T, dt_max, 1e-10);
  qlev::loewner::write_trajectory_csv(traj, ctx.path("trajectory.csv"));
  const auto& fin = traj.back();
  std::cout << "image " << format_double(fin.z[0].real()) << " "
            << format_double(fin.z[0].imag()) << "\n";
  std::cout << "swallowed=" << (fin.swallowed[0] ? "true" : "false") << "\n";
  if (fin.swallowed[0] && !reverse) {
    double tau = refine_swallow(nu, z, fin.swallow_time[0], dt_max);
    std::cout << "swallow_time " << format_double(tau) << "\n";
  }
  std::cout << "deriv0 " << format_double(fin.deriv0) << "\n";
  return 0;
}

int cmd_loewner_extract(RunContext& ctx, const std::string& curve_file, double dt) {
  std::ifstream in(curve_file);
  if (!in) throw std::invalid_argument("loewner extract: cannot open " + curve_file);
  std::vector<cplx> curve;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double re, im;
    if (ls >> re >> im) curve.push_back(cplx(re, im));
  }
  auto nu = qlev::loewner::extract_driving(curve, dt);
  qlev::loewner::write_driving_csv(nu, ctx.path("driving.csv"));
  std::cout << "extracted " << nu.slices.size() << " slices, horizon "
            << format_double(nu.horizon()) << "\n";
  return 0;
}

int cmd_sle_run(RunContext& ctx, double kappa, double T, double dt, std::vector<double> probe,
                const std::string& direction) {
  cplx z(probe.empty() ? 0.3 : probe[0], probe.size() > 1 ? probe[1] : 0.0);
  auto dir = direction == "forward" ? qlev::sle::Direction::forward
                                    : qlev::sle::Direction::reverse;
  auto run = qlev::sle::sample_radial_sle(kappa, T, dt, {z}, ctx.seed, dir);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < run.t.size(); ++i)
    rows.push_back({format_double(run.t[i]), format_double(run.w[i]),
                    format_double(run.f[i][0].real()), format_double(run.f[i][0].imag()),
                    format_double(run.fp[i][0].real()), format_double(run.fp[i][0].imag())});
  write_table(ctx, "run", {"t", "w", "f_re", "f_im", "fp_re", "fp_im"}, rows);
  std::cout << "final state " << format_double(run.f.back()[0].real()) << " "
            << format_double(run.f.back()[0].imag()) << "\n";
  return 0;
}

int cmd_sle_verify_ito(RunContext& ctx, double kappa, double rho, bool has_rho, double z,
                       double T, double dt, int runs) {
  auto st = qlev::sle::verify_fh_ito(kappa, has_rho ? std::optional<double>(rho) : std::nullopt,
                                     cplx(z, 0.0), T, dt, runs, ctx.seed);
  if (!std::isfinite(st.mean) || !std::isfinite(st.variance))
    throw std::runtime_error("verify-ito produced non-finite statistics");
  write_table(ctx, "ito",
              {"runs", "mean", "mean_se", "predicted_mean", "variance", "variance_se",
               "predicted_qv"},
              {{std::to_string(st.runs), format_double(st.mean), format_double(st.mean_se),
                format_double(st.predicted_mean), format_double(st.variance),
                format_double(st.variance_se), format_double(st.predicted_qv)}});
  std::cout << "mean " << format_double(st.mean) << " +- " << format_double(st.mean_se)
            << " (predicted " << format_double(st.predicted_mean) << ")\n";
  std::cout << "variance " << format_double(st.variance) << " (predicted qv "
            << format_double(st.predicted_qv) << ")\n";
  return 0;
}

int cmd_sle_verify_green(RunContext& ctx, const std::string& kind, double T, double dt,
                         double amp, double freq) {
  auto gk = kind == "neumann" ? qlev::field::GreenKind::neumann
                              : qlev::field::GreenKind::dirichlet;
  auto driving = [amp, freq](double t) { return amp * std::sin(freq * t); };
  double dev = qlev::sle::verify_green_flow(gk, driving, cplx(0.3, 0.0), cplx(0.0, -0.2), T, dt);
  write_table(ctx, "green", {"kind", "deviation"}, {{kind, format_double(dev)}});
  std::cout << "max deviation " << format_double(dev) << "\n";
  return 0;
}

void write_qle_state_table(RunContext& ctx, const qlev::qle::QleState& st) {
  std::vector<std::vector<std::string>> rows;
  for (int k = 1; k <= st.degree; ++k)
    rows.push_back({"mode", std::to_string(k), format_double(st.h.a[std::size_t(k - 1)]),
                    format_double(st.h.b[std::size_t(k - 1)])});
  for (const auto& s : st.h.singularities)
    rows.push_back({"singularity", format_double(s.strength), format_double(s.location.real()),
                    format_double(s.location.imag())});
  write_table(ctx, "state", {"kind", "index_or_strength", "a_or_re", "b_or_im"}, rows);
}

int cmd_qle_init(RunContext& ctx, double kappa, int degree) {
  auto st = qlev::qle::qle_init(kappa, degree, ctx.seed);
  write_qle_state_table(ctx, st);
  std::cout << "atom angle " << format_double(std::arg(st.atom)) << "\n";
  return 0;
}

int cmd_qle_run(RunContext& ctx, double kappa, double delta, double T, int degree, double dt) {
  auto traj = qlev::qle::qle_run(kappa, delta, T, degree, dt, ctx.seed);
  std::string sub = ctx.out_dir + "/trajectory";
  qlev::qle::export_qle_trajectory(traj, sub);
  for (const char* f :
       {"trajectory/states.csv", "trajectory/hulls.csv", "trajectory/atoms.csv",
        "trajectory/nu_snapshots.csv", "trajectory/manifest.json"})
    ctx.outputs.push_back(f);
  const auto& fin = traj.states.back();
  std::cout << fin.block << " blocks, capacity time " << format_double(fin.t)
            << ", degraded=" << (fin.degraded ? "true" : "false") << "\n";
  return 0;
}

std::string event_name(qlev::maps::PeelEvent e) {
  switch (e) {
    case qlev::maps::PeelEvent::terminate: return "terminate";
    case qlev::maps::PeelEvent::new_vertex: return "new_vertex";
    default: return "split";
  }
}

void write_necklaces(RunContext& ctx, const std::vector<qlev::maps::NecklaceRecord>& recs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : recs)
    rows.push_back({event_name(r.event), std::to_string(r.direction), std::to_string(r.m1),
                    std::to_string(r.n1), std::to_string(r.m2), std::to_string(r.n2),
                    std::to_string(r.target_region), std::to_string(r.bubble_m),
                    std::to_string(r.bubble_n), std::to_string(r.outer_boundary),
                    std::to_string(r.offset), std::to_string(r.triangles)});
  write_table(ctx, "necklaces",
              {"event", "direction", "m1", "n1", "m2", "n2", "target_region", "bubble_m",
               "bubble_n", "outer_boundary", "offset", "triangles"},
              rows);
}

int cmd_maps_phi(RunContext& ctx, long n, long m) {
  auto v = qlev::maps::phi(n, m);
  std::cout << v.str() << "\n";
  write_table(ctx, "phi", {"n", "m", "count"}, {{std::to_string(n), std::to_string(m), v.str()}});
  return 0;
}

int cmd_maps_explore(RunContext& ctx, long m, long n, const std::string& mode, bool reshuffle,
                     bool single_step) {
  qlev::Rng rng(ctx.seed);
  qlev::maps::PeelingState st;
  if (single_step) {
    st.m = m;
    st.n = n;
    st = qlev::maps::peel_step(std::move(st), mode, rng);
  } else {
    st = qlev::maps::explore_until_target(m, n, mode, rng);
  }
  if (reshuffle) qlev::maps::reshuffle_necklaces(st.necklaces, rng);
  write_necklaces(ctx, st.necklaces);
  std::cout << st.steps << " steps, final (m,n) = (" << st.m << "," << st.n << ")"
            << (st.terminated ? ", terminated" : "") << "\n";
  return 0;
}

int cmd_maps_mullin(RunContext& ctx, int edges) {
  qlev::Rng rng(ctx.seed);
  auto walk = qlev::maps::sample_mullin_walk(edges, rng);
  auto map = qlev::maps::mullin(walk);
  const char* names[] = {"x+", "x-", "y+", "y-"};
  std::vector<std::vector<std::string>> wrows;
  for (std::size_t i = 0; i < walk.steps.size(); ++i)
    wrows.push_back({std::to_string(i), names[int(walk.steps[i])]});
  write_table(ctx, "walk", {"index", "step"}, wrows);
  std::vector<std::vector<std::string>> mrows;
  for (int h = 0; h < 2 * map.num_edges(); ++h)
    mrows.push_back({std::to_string(h), std::to_string(map.vertex_of[std::size_t(h)]),
                     std::to_string(map.twin(h)),
                     map.tree[std::size_t(h / 2)] ? "1" : "0"});
  write_table(ctx, "map", {"half_edge", "vertex", "twin", "tree"}, mrows);
  std::cout << map.num_vertices() << " vertices, " << map.num_edges() << " edges, "
            << map.num_faces() << " faces\n";
  return 0;
}

int cmd_maps_wilson(RunContext& ctx, int width, int height) {
  qlev::maps::AdjGraph g(std::size_t(width) * std::size_t(height));
  auto id = [&](int x, int y) { return y * width + x; };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) {
        g[std::size_t(id(x, y))].push_back(id(x + 1, y));
        g[std::size_t(id(x + 1, y))].push_back(id(x, y));
      }
      if (y + 1 < height) {
        g[std::size_t(id(x, y))].push_back(id(x, y + 1));
        g[std::size_t(id(x, y + 1))].push_back(id(x, y));
      }
    }
  qlev::Rng rng(ctx.seed);
  auto parent = qlev::maps::wilson_ust(g, 0, rng);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t v = 0; v < parent.size(); ++v)
    rows.push_back({std::to_string(v), std::to_string(parent[v])});
  write_table(ctx, "tree", {"vertex", "parent"}, rows);
  std::cout << "spanning tree on " << parent.size() << " vertices\n";
  return 0;
}

int cmd_maps_compare(RunContext& ctx, int edges, int k, long samples) {
  qlev::Rng rng(ctx.seed);
  auto stats = qlev::maps::compare_dla_lerw(edges, k, samples, rng);
  std::vector<std::vector<std::string>> rows;
  auto dump = [&](const char* stat, const char* kind, const std::map<int, long>& h) {
    for (const auto& [key, cnt] : h)
      rows.push_back({stat, kind, std::to_string(key), std::to_string(cnt)});
  };
  dump("edges", "lerw", stats.lerw_edges);
  dump("edges", "dla", stats.dla_edges);
  dump("kstep", "lerw", stats.lerw_kstep);
  dump("kstep", "dla", stats.dla_kstep);
  write_table(ctx, "histograms", {"statistic", "kind", "key", "count"}, rows);
  auto tv = [](const std::map<int, long>& a, const std::map<int, long>& b) {
    std::set<int> keys;
    for (auto& [key, v] : a) keys.insert(key);
    for (auto& [key, v] : b) keys.insert(key);
    std::vector<double> p, q;
    for (int key : keys) {
      p.push_back(double(a.count(key) ? a.at(key) : 0));
      q.push_back(double(b.count(key) ? b.at(key) : 0));
    }
    return qlev::total_variation(p, q);
  };
  std::cout << "edge-count TV " << format_double(tv(stats.lerw_edges, stats.dla_edges)) << "\n";
  std::cout << "k-step TV " << format_double(tv(stats.lerw_kstep, stats.dla_kstep)) << "\n";
  return 0;
}

int cmd_scaling(RunContext& ctx, bool table) {
  std::vector<std::vector<std::string>> rows;
  if (table) {
    for (int j = 1; j <= 96; ++j) {
      double gsq = double(j) / 24.0;
      for (const char* curve : {"upper", "middle"}) {
        auto r = qlev::scaling::make_record(gsq, curve);
        rows.push_back({format_double(gsq), curve, format_double(r.kappa), format_double(r.Q),
                        format_double(r.alpha), format_double(r.beta), format_double(r.eta),
                        format_double(r.d), format_double(r.delta_bar)});
      }
    }
    write_table(ctx, "records",
                {"gamma_sq", "curve", "kappa", "Q", "alpha", "beta", "eta", "d", "delta_bar"},
                rows);
  } else {
    for (int j = 1; j <= 96; ++j) {
      double gsq = double(j) / 24.0;
      auto c = qlev::scaling::eta_curves(gsq);
      rows.push_back({format_double(gsq), format_double(c.upper), format_double(c.middle),
                      format_double(-1.0)});
    }
    write_table(ctx, "curves", {"gamma_sq", "upper", "middle", "trivial"}, rows);
  }
  std::cout << "wrote " << rows.size() << " rows\n";
  return 0;
}

int cmd_selftest(RunContext& ctx, bool full) {
  auto results = qlev::acceptance::run_criteria(!full, std::cout);
  std::vector<std::vector<std::string>> rows;
  int failures = 0;
  for (const auto& r : results) {
    rows.push_back({std::to_string(r.id), r.name, r.pass ? "pass" : "fail",
                    format_double(r.seconds), r.detail});
    if (!r.pass) ++failures;
  }
  write_table(ctx, "selftest", {"id", "name", "status", "seconds", "detail"}, rows);
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 3;
  }
  std::cout << "all criteria passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for conformal growth models"};
  app.fallthrough();
  app.set_config("--config", "", "flat key=value configuration file");

  RunContext ctx;
  app.add_option("--seed", ctx.seed, "master random seed")->capture_default_str();
  app.add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", ctx.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "ppm", "png"}))
      ->capture_default_str();
  app.add_option("--jobs", ctx.jobs, "worker count (runs are sequenced deterministically)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.require_subcommand(1);

  // gff-sample
  auto* gff = app.add_subcommand("gff-sample", "sample a lattice Gaussian field");
  int gff_n = 65;
  std::string gff_bc = "zero";
  gff->add_option("--n", gff_n, "grid side length")->check(CLI::Range(3, 4097));
  gff->add_option("--bc", gff_bc, "boundary condition")->check(CLI::IsMember({"zero", "free"}));

  // lqg-tile
  auto* tile = app.add_subcommand("lqg-tile", "quantum-mass square tiling of a sampled field");
  int tile_n = 128;
  double tile_gamma = 1.0, tile_delta = 1e-3;
  tile->add_option("--n", tile_n, "grid side length")->check(CLI::Range(3, 4097));
  tile->add_option("--gamma", tile_gamma, "mass exponent");
  tile->add_option("--delta", tile_delta, "mass threshold per tile")->check(CLI::PositiveNumber);

  // grow
  auto* grow = app.add_subcommand("grow", "harmonic-measure-driven cluster growth on a grid");
  std::string grow_model = "eden", grow_clock = "steps", grow_sampler = "exact";
  double grow_eta = 1.0;
  int grow_w = 33, grow_h = 33;
  long grow_steps = 150;
  grow->add_option("model", grow_model, "growth model")
      ->check(CLI::IsMember({"eden", "dla", "dbm"}));
  grow->add_option("--eta", grow_eta, "harmonic measure exponent (dbm only)");
  grow->add_option("--clock", grow_clock, "time parameterization")
      ->check(CLI::IsMember({"steps", "capacity"}));
  grow->add_option("--sampler", grow_sampler, "harmonic measure sampler")
      ->check(CLI::IsMember({"exact", "walk"}));
  grow->add_option("--width", grow_w)->check(CLI::Range(3, 1025));
  grow->add_option("--height", grow_h)->check(CLI::Range(3, 1025));
  grow->add_option("--steps", grow_steps)->check(CLI::PositiveNumber);

  // fpp
  auto* fpp = app.add_subcommand("fpp", "first-passage percolation ball on a grid");
  int fpp_w = 33, fpp_h = 33;
  double fpp_rate = 1.0, fpp_horizon = 3.0;
  long fpp_max = 0;
  fpp->add_option("--width", fpp_w)->check(CLI::Range(3, 1025));
  fpp->add_option("--height", fpp_h)->check(CLI::Range(3, 1025));
  fpp->add_option("--rate", fpp_rate, "exponential passage rate (<= 0 uses edge weights)");
  fpp->add_option("--horizon", fpp_horizon, "passage-time horizon");
  fpp->add_option("--max-vertices", fpp_max, "stop after this many vertices (0 = no cap)");

  // loewner
  auto* loewner = app.add_subcommand("loewner", "disk Loewner flows and driving extraction");
  loewner->require_subcommand(1);
  bool lw_uniform = false;
  double lw_atom = 0.0, lw_T = 1.0, lw_dt = 0.05, lw_dtmax = 1e-2;
  std::vector<double> lw_probe;
  std::string lw_curve;
  double lw_extract_dt = 1e-3;
  auto* lw_fwd = loewner->add_subcommand("forward", "forward flow of a probe point");
  auto* lw_rev = loewner->add_subcommand("reverse", "reverse flow of a probe point");
  for (auto* sc : {lw_fwd, lw_rev}) {
    sc->add_flag("--uniform", lw_uniform, "uniform driving measure");
    sc->add_option("--atom", lw_atom, "constant point-mass driving angle");
    sc->add_option("--T", lw_T, "capacity horizon")->check(CLI::PositiveNumber);
    sc->add_option("--dt", lw_dt, "driving slice width")->check(CLI::PositiveNumber);
    sc->add_option("--dt-max", lw_dtmax, "integrator step cap")->check(CLI::PositiveNumber);
    sc->add_option("--probe", lw_probe, "probe point (re [im])")->expected(1, 2);
  }
  auto* lw_ext = loewner->add_subcommand("extract", "driving extraction from a curve file");
  lw_ext->add_option("--curve", lw_curve, "two-column curve file (re,im per row)")->required();
  lw_ext->add_option("--dt", lw_extract_dt, "output slice width")->check(CLI::PositiveNumber);

  // sle
  auto* sle = app.add_subcommand("sle", "radial stochastic Loewner runs and checks");
  sle->require_subcommand(1);
  double sle_kappa = 6.0, sle_run_T = 0.25, sle_run_dt = 1e-3, sle_z = 0.3, sle_rho = 0.0;
  double ito_T = 0.1, ito_dt = 2e-4, green_T = 0.05, green_dt = 2.5e-4;
  double sle_amp = 0.5, sle_freq = 3.0;
  int sle_runs = 10000;
  std::vector<double> sle_probe;
  std::string sle_dir = "reverse", sle_kind = "dirichlet";
  auto* sle_run = sle->add_subcommand("run", "sample one driven run");
  sle_run->add_option("--kappa", sle_kappa)->check(CLI::NonNegativeNumber);
  sle_run->add_option("--T", sle_run_T)->check(CLI::PositiveNumber);
  sle_run->add_option("--dt", sle_run_dt)->check(CLI::PositiveNumber);
  sle_run->add_option("--probe", sle_probe, "tracked point (re [im])")->expected(1, 2);
  sle_run->add_option("--direction", sle_dir)->check(CLI::IsMember({"forward", "reverse"}));
  auto* sle_ito = sle->add_subcommand("verify-ito", "drift and quadratic variation check");
  auto* rho_opt = sle_ito->add_option("--rho", sle_rho, "force-point weight");
  sle_ito->add_option("--kappa", sle_kappa)->check(CLI::PositiveNumber);
  sle_ito->add_option("--z", sle_z, "probe point on the real axis");
  sle_ito->add_option("--T", ito_T)->check(CLI::PositiveNumber);
  sle_ito->add_option("--dt", ito_dt)->check(CLI::PositiveNumber);
  sle_ito->add_option("--runs", sle_runs)->check(CLI::PositiveNumber);
  auto* sle_green = sle->add_subcommand("verify-green", "Green function flow check");
  sle_green->add_option("--kind", sle_kind)->check(CLI::IsMember({"dirichlet", "neumann"}));
  sle_green->add_option("--T", green_T)->check(CLI::PositiveNumber);
  sle_green->add_option("--dt", green_dt)->check(CLI::PositiveNumber);
  sle_green->add_option("--amp", sle_amp, "driving amplitude");
  sle_green->add_option("--freq", sle_freq, "driving frequency");

  // qle
  auto* qle = app.add_subcommand("qle", "block-resampled growth chain");
  qle->require_subcommand(1);
  double qle_kappa = 6.0, qle_delta = 0.05, qle_T = 0.25, qle_dt = 2.5e-3;
  int qle_degree = 32;
  auto* qle_init = qle->add_subcommand("init", "sample an initial chain state");
  qle_init->add_option("--kappa", qle_kappa);
  qle_init->add_option("--degree", qle_degree)->check(CLI::NonNegativeNumber);
  auto* qle_run = qle->add_subcommand("run", "run the chain and export the trajectory");
  qle_run->add_option("--kappa", qle_kappa);
  qle_run->add_option("--delta", qle_delta, "block capacity")->check(CLI::PositiveNumber);
  qle_run->add_option("--T", qle_T, "total capacity horizon")->check(CLI::NonNegativeNumber);
  qle_run->add_option("--degree", qle_degree)->check(CLI::NonNegativeNumber);
  qle_run->add_option("--dt", qle_dt, "block integrator step")->check(CLI::PositiveNumber);

  // maps
  auto* maps = app.add_subcommand("maps", "random planar map combinatorics");
  maps->require_subcommand(1);
  long maps_n = 0, maps_m = 0, maps_samples = 20000;
  int maps_edges = 6, maps_k = 2, maps_w = 8, maps_h = 8;
  std::string maps_mode = "percolation";
  auto* mp_phi = maps->add_subcommand("phi", "exact triangulation count");
  mp_phi->add_option("--n", maps_n, "interior vertices")->check(CLI::NonNegativeNumber);
  mp_phi->add_option("--m", maps_m, "boundary length minus 2")->check(CLI::NonNegativeNumber);
  auto* mp_peel = maps->add_subcommand("peel", "one peeling step");
  auto* mp_explore = maps->add_subcommand("explore", "peel until the target edge");
  auto* mp_resh = maps->add_subcommand("reshuffle", "explore, then re-randomize gluing offsets");
  for (auto* sc : {mp_peel, mp_explore, mp_resh}) {
    sc->add_option("--m", maps_m)->check(CLI::NonNegativeNumber);
    sc->add_option("--n", maps_n)->check(CLI::NonNegativeNumber);
    sc->add_option("--mode", maps_mode)->check(CLI::IsMember({"percolation", "eden"}));
  }
  auto* mp_mullin = maps->add_subcommand("mullin", "sample a tree-decorated map");
  mp_mullin->add_option("--edges", maps_edges)->check(CLI::Range(0, 64));
  auto* mp_wilson = maps->add_subcommand("wilson", "uniform spanning tree of a grid");
  mp_wilson->add_option("--width", maps_w)->check(CLI::Range(2, 256));
  mp_wilson->add_option("--height", maps_h)->check(CLI::Range(2, 256));
  auto* mp_cmp = maps->add_subcommand("compare-dla-lerw", "growth vs loop-erased walk laws");
  mp_cmp->add_option("--edges", maps_edges)->check(CLI::Range(1, 16));
  mp_cmp->add_option("--k", maps_k)->check(CLI::PositiveNumber);
  mp_cmp->add_option("--samples", maps_samples)->check(CLI::PositiveNumber);

  // scaling
  auto* scaling = app.add_subcommand("scaling", "exponent tables and curves");
  scaling->require_subcommand(1);
  auto* sc_table = scaling->add_subcommand("table", "full exponent records");
  auto* sc_curves = scaling->add_subcommand("curves", "the two eta curves and the trivial line");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "acceptance suite at reduced sample counts");
  bool st_full = false;
  selftest->add_flag("--full", st_full, "run the full-size acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (ctx.format == "png") {
    std::cerr << "PNG output is not built in; use --format ppm\n";
    return 1;
  }

  try {
    int rc = 0;
    if (gff->parsed()) {
      ctx.subcommand = "gff-sample";
      ctx.set("n", gff_n);
      ctx.set("bc", gff_bc);
      rc = cmd_gff_sample(ctx, gff_n, gff_bc);
    } else if (tile->parsed()) {
      ctx.subcommand = "lqg-tile";
      ctx.set("n", tile_n);
      ctx.set("gamma", tile_gamma);
      ctx.set("delta", tile_delta);
      rc = cmd_lqg_tile(ctx, tile_n, tile_gamma, tile_delta);
    } else if (grow->parsed()) {
      ctx.subcommand = "grow";
      ctx.set("model", grow_model);
      ctx.set("eta", grow_eta);
      ctx.set("clock", grow_clock);
      ctx.set("sampler", grow_sampler);
      ctx.set("width", grow_w);
      ctx.set("height", grow_h);
      ctx.set("steps", grow_steps);
      rc = cmd_grow(ctx, grow_model, grow_eta, grow_clock, grow_sampler, grow_w, grow_h,
                    grow_steps);
    } else if (fpp->parsed()) {
      ctx.subcommand = "fpp";
      ctx.set("width", fpp_w);
      ctx.set("height", fpp_h);
      ctx.set("rate", fpp_rate);
      ctx.set("horizon", fpp_horizon);
      ctx.set("max_vertices", fpp_max);
      rc = cmd_fpp(ctx, fpp_w, fpp_h, fpp_rate, fpp_horizon, fpp_max);
    } else if (loewner->parsed()) {
      if (lw_ext->parsed()) {
        ctx.subcommand = "loewner extract";
        ctx.set("curve", lw_curve);
        ctx.set("dt", lw_extract_dt);
        rc = cmd_loewner_extract(ctx, lw_curve, lw_extract_dt);
      } else {
        bool rev = lw_rev->parsed();
        ctx.subcommand = rev ? "loewner reverse" : "loewner forward";
        ctx.set("uniform", lw_uniform ? "true" : "false");
        ctx.set("atom", lw_atom);
        ctx.set("T", lw_T);
        ctx.set("dt", lw_dt);
        ctx.set("dt_max", lw_dtmax);
        ctx.set("probe_re", lw_probe.empty() ? 0.5 : lw_probe[0]);
        ctx.set("probe_im", lw_probe.size() > 1 ? lw_probe[1] : 0.0);
        rc = cmd_loewner_forward(ctx, lw_uniform, lw_atom, lw_T, lw_dt, lw_dtmax, lw_probe, rev);
      }
    } else if (sle->parsed()) {
      if (sle_run->parsed()) {
        ctx.subcommand = "sle run";
        ctx.set("kappa", sle_kappa);
        ctx.set("T", sle_run_T);
        ctx.set("dt", sle_run_dt);
        ctx.set("direction", sle_dir);
        rc = cmd_sle_run(ctx, sle_kappa, sle_run_T, sle_run_dt, sle_probe, sle_dir);
      } else if (sle_ito->parsed()) {
        ctx.subcommand = "sle verify-ito";
        ctx.set("kappa", sle_kappa);
        if (!rho_opt->empty()) ctx.set("rho", sle_rho);
        ctx.set("z", sle_z);
        ctx.set("T", ito_T);
        ctx.set("dt", ito_dt);
        ctx.set("runs", sle_runs);
        rc = cmd_sle_verify_ito(ctx, sle_kappa, sle_rho, !rho_opt->empty(), sle_z, ito_T, ito_dt,
                                sle_runs);
      } else {
        ctx.subcommand = "sle verify-green";
        ctx.set("kind", sle_kind);
        ctx.set("T", green_T);
        ctx.set("dt", green_dt);
        ctx.set("amp", sle_amp);
        ctx.set("freq", sle_freq);
        rc = cmd_sle_verify_green(ctx, sle_kind, green_T, green_dt, sle_amp, sle_freq);
      }
    } else if (qle->parsed()) {
      if (qle_init->parsed()) {
        ctx.subcommand = "qle init";
        ctx.set("kappa", qle_kappa);
        ctx.set("degree", qle_degree);
        rc = cmd_qle_init(ctx, qle_kappa, qle_degree);
      } else {
        ctx.subcommand = "qle run";
        ctx.set("kappa", qle_kappa);
        ctx.set("delta", qle_delta);
        ctx.set("T", qle_T);
        ctx.set("degree", qle_degree);
        ctx.set("dt", qle_dt);
        rc = cmd_qle_run(ctx, qle_kappa, qle_delta, qle_T, qle_degree, qle_dt);
      }
    } else if (maps->parsed()) {
      if (mp_phi->parsed()) {
        ctx.subcommand = "maps phi";
        ctx.set("n", maps_n);
        ctx.set("m", maps_m);
        rc = cmd_maps_phi(ctx, maps_n, maps_m);
      } else if (mp_peel->parsed() || mp_explore->parsed() || mp_resh->parsed()) {
        bool resh = mp_resh->parsed();
        bool single = mp_peel->parsed();
        ctx.subcommand = single ? "maps peel" : (resh ? "maps reshuffle" : "maps explore");
        ctx.set("m", maps_m);
        ctx.set("n", maps_n);
        ctx.set("mode", resh ? "percolation" : maps_mode);
        rc = cmd_maps_explore(ctx, maps_m, maps_n, resh ? "percolation" : maps_mode, resh,
                              single);
      } else if (mp_mullin->parsed()) {
        ctx.subcommand = "maps mullin";
        ctx.set("edges", maps_edges);
        rc = cmd_maps_mullin(ctx, maps_edges);
      } else if (mp_wilson->parsed()) {
        ctx.subcommand = "maps wilson";
        ctx.set("width", maps_w);
        ctx.set("height", maps_h);
        rc = cmd_maps_wilson(ctx, maps_w, maps_h);
      } else {
        ctx.subcommand = "maps compare-dla-lerw";
        ctx.set("edges", maps_edges);
        ctx.set("k", maps_k);
        ctx.set("samples", maps_samples);
        rc = cmd_maps_compare(ctx, maps_edges, maps_k, maps_samples);
      }
    } else if (scaling->parsed()) {
      bool table = sc_table->parsed();
      ctx.subcommand = table ? "scaling table" : "scaling curves";
      rc = cmd_scaling(ctx, table);
      (void)sc_curves;
    } else if (selftest->parsed()) {
      ctx.subcommand = "selftest";
      ctx.set("full", st_full ? "true" : "false");
      rc = cmd_selftest(ctx, st_full);
    }
    ctx.write_manifest();
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
