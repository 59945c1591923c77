#include "qlev/growth.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "qlev/io.hpp"

namespace qlev::growth {

GrowthGraph grid_graph(int w, int h, int seed_vertex, int target_vertex, bool to_infinity) {
  GrowthGraph g;
  g.n = w * h + (to_infinity ? 1 : 0);
  g.adj.resize(std::size_t(g.n));
  auto id = [&](int x, int y) { return y * w + x; };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.add_edge(id(x, y), id(x + 1, y));
      if (y + 1 < h) g.add_edge(id(x, y), id(x, y + 1));
    }
  g.seed = seed_vertex;
  if (to_infinity) {
    int inf = w * h;
    for (int x = 0; x < w; ++x) {
      g.add_edge(id(x, 0), inf);
      if (h > 1) g.add_edge(id(x, h - 1), inf);
    }
    for (int y = 1; y + 1 < h; ++y) {
      g.add_edge(id(0, y), inf);
      if (w > 1) g.add_edge(id(w - 1, y), inf);
    }
    g.target = inf;
  } else {
    g.target = target_vertex;
  }
  return g;
}

GrowthGraph tiling_graph(const lqg::SquareTiling& t, int seed_x, int seed_y) {
  GrowthGraph g;
  int L = int(t.leaves.size());
  g.n = L + 1;  // super-vertex for the outer edge
  g.adj.resize(std::size_t(g.n));
  g.target = L;
  g.seed = -1;
  for (int i = 0; i < L; ++i) {
    const auto& a = t.nodes[std::size_t(t.leaves[std::size_t(i)])];
    if (seed_x >= a.x && seed_x < a.x + a.size && seed_y >= a.y && seed_y < a.y + a.size)
      g.seed = i;
    if (a.x == 0 || a.y == 0 || a.x + a.size == t.n || a.y + a.size == t.n)
      g.add_edge(i, L);
    for (int j = i + 1; j < L; ++j) {
      const auto& b = t.nodes[std::size_t(t.leaves[std::size_t(j)])];
      bool horiz = (a.x + a.size == b.x || b.x + b.size == a.x) &&
                   std::max(a.y, b.y) < std::min(a.y + a.size, b.y + b.size);
      bool vert = (a.y + a.size == b.y || b.y + b.size == a.y) &&
                  std::max(a.x, b.x) < std::min(a.x + a.size, b.x + b.size);
      if (horiz || vert) g.add_edge(i, j);
    }
  }
  if (g.seed < 0) throw std::invalid_argument("tiling_graph: seed site not covered by a leaf");
  return g;
}

std::vector<MeasuredEdge> harmonic_measure_exact(const GrowthGraph& g,
                                                 const std::vector<bool>& cluster,
                                                 int target) {
  if (cluster[std::size_t(target)])
    throw std::invalid_argument("harmonic_measure_exact: target absorbed by the cluster");
  // unknowns: free vertices other than the target
  std::vector<int> idx(std::size_t(g.n), -1);
  std::vector<int> free_v;
  for (int v = 0; v < g.n; ++v)
    if (!cluster[std::size_t(v)] && v != target) {
      idx[std::size_t(v)] = int(free_v.size());
      free_v.push_back(v);
    }
  int F = int(free_v.size());
  Eigen::VectorXd phi_free(F);
  if (F > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(F);
    for (int i = 0; i < F; ++i) {
      int u = free_v[std::size_t(i)];
      double deg = 0.0;
      for (const auto& [v, w] : g.adj[std::size_t(u)]) {
        deg += w;
        if (v == target)
          rhs(i) += w;
        else if (idx[std::size_t(v)] >= 0)
          trip.push_back({i, idx[std::size_t(v)], -w});
      }
      trip.push_back({i, i, deg});
    }
    Eigen::SparseMatrix<double> A(F, F);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("harmonic_measure_exact: singular Dirichlet system");
    phi_free = solver.solve(rhs);
  }
  auto phi = [&](int v) -> double {
    if (v == target) return 1.0;
    if (cluster[std::size_t(v)]) return 0.0;
    return phi_free(idx[std::size_t(v)]);
  };
  std::vector<MeasuredEdge> edges;
  double total = 0.0;
  for (int u = 0; u < g.n; ++u) {
    if (cluster[std::size_t(u)]) continue;
    for (const auto& [v, w] : g.adj[std::size_t(u)]) {
      if (!cluster[std::size_t(v)]) continue;
      double q = w * phi(u);
      edges.push_back({u, v, q});
      total += q;
    }
  }
  if (edges.empty() || total <= 0.0)
    throw std::runtime_error("harmonic_measure_exact: degenerate domain, target cut off");
  for (auto& e : edges) e.prob /= total;
  return edges;
}

MeasuredEdge harmonic_measure_walk(const GrowthGraph& g, const std::vector<bool>& cluster,
                                   int target, Rng& rng) {
  if (cluster[std::size_t(target)])
    throw std::invalid_argument("harmonic_measure_walk: target absorbed by the cluster");
  int at = target;
  for (;;) {
    const auto& nb = g.adj[std::size_t(at)];
    double deg = 0.0;
    for (const auto& [v, w] : nb) deg += w;
    double r = rng.uniform() * deg;
    int next = nb.back().first;
    for (const auto& [v, w] : nb) {
      r -= w;
      if (r <= 0.0) {
        next = v;
        break;
      }
    }
    if (cluster[std::size_t(next)]) return {at, next, 1.0};
    at = next;
  }
}

namespace {

std::vector<std::pair<int, int>> cluster_boundary_edges(const GrowthGraph& g,
                                                        const std::vector<bool>& cluster) {
  std::vector<std::pair<int, int>> out;  // (free, cluster)
  for (int u = 0; u < g.n; ++u) {
    if (cluster[std::size_t(u)]) continue;
    for (const auto& [v, w] : g.adj[std::size_t(u)])
      if (cluster[std::size_t(v)]) out.push_back({u, v});
  }
  return out;
}

std::size_t weighted_pick(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (double x : w) total += x;
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r -= w[i];
    if (r <= 0.0) return i;
  }
  return w.size() - 1;
}

}  // namespace

GrowthCluster grow_dbm(const GrowthGraph& g, double eta, long steps, Clock clock,
                       Sampler sampler, std::uint64_t seed) {
  if (eta < 0.0) throw std::invalid_argument("grow_dbm: eta must be >= 0");
  GrowthCluster c;
  c.in_cluster.assign(std::size_t(g.n), false);
  c.in_cluster[std::size_t(g.seed)] = true;
  c.clock = clock;
  Rng rng(seed);
  double clockval = 0.0;
  for (long s = 0; s < steps; ++s) {
    int from = -1, to = -1;
    double weight = 0.0;
    if (eta == 0.0 && clock == Clock::steps) {
      auto cand = cluster_boundary_edges(g, c.in_cluster);
      if (cand.empty()) {
        c.exhausted = true;
        break;
      }
      auto [u, cl] = cand[rng.index(cand.size())];
      from = cl;
      to = u;
      weight = 1.0 / double(cand.size());
      clockval += 1.0;
    } else if (sampler == Sampler::walk && eta == 1.0 && clock == Clock::steps) {
      if (c.in_cluster[std::size_t(g.target)]) {
        c.exhausted = true;
        break;
      }
      auto e = harmonic_measure_walk(g, c.in_cluster, g.target, rng);
      from = e.to;
      to = e.from;
      clockval += 1.0;
    } else {
      std::vector<MeasuredEdge> edges;
      try {
        edges = harmonic_measure_exact(g, c.in_cluster, g.target);
      } catch (const std::exception&) {
        c.exhausted = true;
        break;
      }
      if (clock == Clock::capacity) {
        std::vector<double> propose(edges.size());
        double bmin = 1.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
          propose[i] = std::pow(edges[i].prob, 2.0 + eta);
          if (edges[i].prob > 0.0) bmin = std::min(bmin, edges[i].prob);
        }
        for (;;) {
          std::size_t i = weighted_pick(propose, rng);
          double b = edges[i].prob;
          double accept = (bmin / b) * (bmin / b);
          if (rng.uniform() <= accept) {
            from = edges[i].to;
            to = edges[i].from;
            weight = b;
            clockval += b * b;
            break;
          }
        }
      } else {
        std::vector<double> w(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i)
          w[i] = eta == 0.0 ? 1.0 : std::pow(edges[i].prob, eta);
        std::size_t i = weighted_pick(w, rng);
        from = edges[i].to;
        to = edges[i].from;
        weight = edges[i].prob;
        clockval += 1.0;
      }
    }
    c.in_cluster[std::size_t(to)] = true;
    c.steps.push_back({s, from, to, weight, clockval});
    if (to == g.target) {
      c.exhausted = true;
      break;
    }
  }
  return c;
}

GrowthCluster fpp_ball(const GrowthGraph& g, double rate, double time_horizon,
                       long max_vertices, std::uint64_t seed) {
  GrowthCluster c;
  c.in_cluster.assign(std::size_t(g.n), false);
  c.clock = Clock::steps;
  Rng rng(seed);
  // one passage time per undirected edge, sampled in a fixed order
  std::unordered_map<std::uint64_t, double> ptime;
  if (rate > 0.0)
    for (int u = 0; u < g.n; ++u)
      for (const auto& [v, w] : g.adj[std::size_t(u)])
        if (u < v) ptime[std::uint64_t(u) * std::uint64_t(g.n) + std::uint64_t(v)] =
            rng.exponential(rate);
  auto edge_time = [&](int u, int v, double w) {
    if (rate <= 0.0) return w;
    if (u > v) std::swap(u, v);
    return ptime[std::uint64_t(u) * std::uint64_t(g.n) + std::uint64_t(v)];
  };
  std::vector<double> dist(std::size_t(g.n), 1e300);
  std::vector<int> parent(std::size_t(g.n), -1);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  dist[std::size_t(g.seed)] = 0.0;
  pq.push({0.0, g.seed});
  long count = 0;
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (c.in_cluster[std::size_t(u)] || d > dist[std::size_t(u)]) continue;
    if (time_horizon > 0.0 && d > time_horizon) break;
    c.in_cluster[std::size_t(u)] = true;
    if (u != g.seed)
      c.steps.push_back({count - 1, parent[std::size_t(u)], u, d - dist[std::size_t(parent[std::size_t(u)])], d});
    ++count;
    if (max_vertices > 0 && count >= max_vertices) break;
    for (const auto& [v, w] : g.adj[std::size_t(u)]) {
      if (c.in_cluster[std::size_t(v)]) continue;
      double nd = d + edge_time(u, v, w);
      if (nd < dist[std::size_t(v)] ||
          (nd == dist[std::size_t(v)] && u < parent[std::size_t(v)])) {
        dist[std::size_t(v)] = nd;
        parent[std::size_t(v)] = u;
        pq.push({nd, v});
      }
    }
  }
  if (pq.empty()) c.exhausted = true;
  return c;
}

void write_cluster_csv(const GrowthCluster& c, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : c.steps)
    rows.push_back({std::to_string(s.step), std::to_string(s.from), std::to_string(s.to),
                    io::format_double(s.weight), io::format_double(s.clock)});
  io::write_csv(path, {"step", "from", "to", "weight", "clock"}, rows);
}

void render_grid_growth_ppm(const GrowthCluster& c, int w, int h, const std::string& path) {
  std::vector<std::uint8_t> px(std::size_t(w) * std::size_t(h) * 3, 0);
  double maxstep = std::max<double>(1.0, double(c.steps.size()));
  auto paint = [&](int v, double t) {
    if (v < 0 || v >= w * h) return;
    std::uint8_t rgb[3];
    io::rainbow(t, rgb);
    std::size_t o = (std::size_t(h - 1 - v / w) * std::size_t(w) + std::size_t(v % w)) * 3;
    px[o] = rgb[0];
    px[o + 1] = rgb[1];
    px[o + 2] = rgb[2];
  };
  for (std::size_t i = 0; i < c.in_cluster.size(); ++i)
    if (c.in_cluster[i]) paint(int(i), 0.0);
  for (std::size_t i = 0; i < c.steps.size(); ++i)
    paint(c.steps[i].to, double(i + 1) / maxstep);
  io::write_ppm(path, w, h, px);
}

void render_tiling_growth_ppm(const lqg::SquareTiling& t, const GrowthCluster& c,
                              const std::string& path) {
  std::vector<std::uint8_t> px(std::size_t(t.n) * std::size_t(t.n) * 3, 0);
  double maxstep = std::max<double>(1.0, double(c.steps.size()));
  auto paint = [&](int leaf, double v) {
    if (leaf < 0 || leaf >= int(t.leaves.size())) return;
    const auto& nd = t.nodes[std::size_t(t.leaves[std::size_t(leaf)])];
    std::uint8_t rgb[3];
    io::rainbow(v, rgb);
    for (int y = nd.y; y < nd.y + nd.size; ++y)
      for (int x = nd.x; x < nd.x + nd.size; ++x) {
        std::size_t o = (std::size_t(t.n - 1 - y) * std::size_t(t.n) + std::size_t(x)) * 3;
        px[o] = rgb[0];
        px[o + 1] = rgb[1];
        px[o + 2] = rgb[2];
      }
  };
  for (std::size_t i = 0; i < c.steps.size(); ++i)
    paint(c.steps[i].to, double(i + 1) / maxstep);
  io::write_ppm(path, t.n, t.n, px);
}

}  // namespace qlev::growth
