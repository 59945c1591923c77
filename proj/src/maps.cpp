#include "qlev/maps.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace qlev::maps {

namespace {

bigint factorial(long k) {
  bigint f = 1;
  for (long i = 2; i <= k; ++i) f *= i;
  return f;
}

bigint pow2(long k) {
  bigint p = 1;
  p <<= k;
  return p;
}

// Uniform bigint in [0, n) by rejection on fixed-width random blocks.
bigint uniform_below(const bigint& n, Rng& rng) {
  if (n <= 1) return 0;
  unsigned bits = unsigned(boost::multiprecision::msb(n)) + 1;
  for (;;) {
    bigint x = 0;
    unsigned got = 0;
    while (got < bits) {
      x <<= 64;
      x |= bigint(rng.bits());
      got += 64;
    }
    x >>= (got - bits);
    if (x < n) return x;
  }
}

}  // namespace

bigint phi(long n, long m) {
  if (n < 0 || m < 0) throw std::invalid_argument("phi: negative arguments");
  bigint num = pow2(n + 1) * factorial(2 * m + 1) * factorial(2 * m + 3 * n);
  bigint den = factorial(m) * factorial(m) * factorial(n) * factorial(2 * m + 2 * n + 2);
  bigint q, r;
  boost::multiprecision::divide_qr(num, den, q, r);
  if (r != 0) throw std::logic_error("phi: non-integer value");
  return q;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of rooted type II triangulations.

namespace {

struct Region {
  std::vector<int> cycle;  // boundary vertices; root edge = (cycle[0], cycle[1])
  long n;                  // interior vertices still to place
};

struct Triangle {
  int a, b, c;
};

void enumerate_rec(std::vector<Region> regions, int next_label,
                   std::vector<Triangle>& tris, std::uint64_t& count) {
  if (regions.empty()) {
    ++count;
    return;
  }
  Region r = regions.back();
  regions.pop_back();
  long m = long(r.cycle.size()) - 2;
  if (m == 0 && r.n == 0) {
    // 2-gon with nothing inside: glue the two boundary edges together
    enumerate_rec(regions, next_label, tris, count);
    return;
  }
  int c0 = r.cycle[0], c1 = r.cycle[1];
  if (r.n >= 1) {
    // apex is a fresh interior vertex
    int v = next_label;
    tris.push_back({c0, c1, v});
    Region sub;
    sub.cycle.reserve(r.cycle.size() + 1);
    sub.cycle.push_back(c0);
    sub.cycle.push_back(v);
    for (std::size_t i = 1; i < r.cycle.size(); ++i) sub.cycle.push_back(r.cycle[i]);
    sub.n = r.n - 1;
    auto regs = regions;
    regs.push_back(sub);
    enumerate_rec(regs, next_label + 1, tris, count);
    tris.pop_back();
  }
  // apex is a boundary vertex c_j, j >= 2 (no loops in type II)
  for (std::size_t j = 2; j < r.cycle.size(); ++j) {
    int cj = r.cycle[j];
    Region r1, r2;
    for (std::size_t i = 1; i <= j; ++i) r1.cycle.push_back(r.cycle[i]);
    for (std::size_t i = j; i < r.cycle.size(); ++i) r2.cycle.push_back(r.cycle[i]);
    r2.cycle.push_back(c0);
    long m1 = long(r1.cycle.size()) - 2;
    long m2 = long(r2.cycle.size()) - 2;
    if (m1 < 0 || m2 < 0) continue;
    for (long n1 = 0; n1 <= r.n; ++n1) {
      tris.push_back({c0, c1, cj});
      r1.n = n1;
      r2.n = r.n - n1;
      auto regs = regions;
      regs.push_back(r1);
      regs.push_back(r2);
      enumerate_rec(regs, next_label, tris, count);
      tris.pop_back();
    }
  }
}

}  // namespace

std::uint64_t enumerate_triangulations(long m, long n) {
  if (m < 0 || n < 0) throw std::invalid_argument("enumerate_triangulations: negative");
  if (m + n > 6) throw std::invalid_argument("enumerate_triangulations: m + n > 6");
  Region root;
  for (long i = 0; i < m + 2; ++i) root.cycle.push_back(int(i));
  root.n = n;
  std::vector<Triangle> tris;
  std::uint64_t count = 0;
  enumerate_rec({root}, int(m + 2), tris, count);
  return count;
}

// ---------------------------------------------------------------------------
// Peeling kernel. Terminate with probability 1/(m+2+3n); conditioned on not
// terminating, a new-vertex step has probability phi(n-1,m+1)/phi(n,m) and a
// split into ordered regions (m1,n1),(m2,n2) has probability
// phi(n1,m1)phi(n2,m2)/phi(n,m); the region containing the target is region i
// with probability (m_i+2+3n_i)/(m+3+3n). The published region normalizer
// (m+1+3n) does not make the two choices sum to 1; (m+3+3n) is the sum of the
// published numerators and is the unique normalizer keeping them as stated.

std::vector<KernelEntry> peel_kernel_row(long m, long n, const std::string& mode) {
  if (mode != "percolation" && mode != "eden")
    throw std::invalid_argument("peel_kernel_row: unknown mode");
  // mode affects only the necklace bookkeeping; the (m,n) kernel is shared
  std::vector<KernelEntry> row;
  if (m == 0 && n == 0) {
    // glued 2-gon: no revealable face remains, so the target face must be
    // the one incident to the seed
    row.push_back({PeelEvent::terminate, -1, -1, -1, -1, bigrat(1)});
    return row;
  }
  bigrat total_edges(m + 2 + 3 * n);
  bigrat p_term = 1 / total_edges;
  row.push_back({PeelEvent::terminate, -1, -1, -1, -1, p_term});
  bigrat cont = 1 - p_term;
  bigint phimn = phi(n, m);
  if (n >= 1) {
    bigrat p_nv = cont * bigrat(phi(n - 1, m + 1)) / bigrat(phimn);
    row.push_back({PeelEvent::new_vertex, m + 1, n - 1, -1, -1, p_nv});
  }
  if (m >= 1) {
    bigrat region_norm(m + 3 + 3 * n);
    for (long m1 = 0; m1 <= m - 1; ++m1) {
      long m2 = m - 1 - m1;
      for (long n1 = 0; n1 <= n; ++n1) {
        long n2 = n - n1;
        bigrat p_split = cont * bigrat(phi(n1, m1) * phi(n2, m2)) / bigrat(phimn);
        if (p_split == 0) continue;
        bigrat w1 = bigrat(m1 + 2 + 3 * n1) / region_norm;
        bigrat w2 = bigrat(m2 + 2 + 3 * n2) / region_norm;
        // two entries: target in region 1 / in region 2
        KernelEntry e1{PeelEvent::split, m1, n1, m2, n2, p_split * w1};
        KernelEntry e2{PeelEvent::split, m2, n2, m1, n1, p_split * w2};
        // convention: (m1,n1) of the entry is the region containing the target
        row.push_back(e1);
        row.push_back(e2);
      }
    }
  }
  return row;
}

namespace {

struct CachedRow {
  std::vector<KernelEntry> entries;
  std::vector<bigint> cumulative;  // integer weights over common denominator
  bigint total;
};

const CachedRow& cached_kernel_row(long m, long n) {
  static std::map<std::pair<long, long>, CachedRow> cache;
  auto key = std::make_pair(m, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CachedRow row;
  row.entries = peel_kernel_row(m, n, "percolation");
  bigint den = 1;
  for (const auto& e : row.entries)
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(e.prob));
  bigint cum = 0;
  for (const auto& e : row.entries) {
    cum += boost::multiprecision::numerator(e.prob) *
           (den / boost::multiprecision::denominator(e.prob));
    row.cumulative.push_back(cum);
  }
  row.total = den;
  if (cum != den) throw std::logic_error("peel kernel row does not sum to 1");
  return cache.emplace(key, std::move(row)).first->second;
}

}  // namespace

PeelingState peel_step(PeelingState state, const std::string& mode, Rng& rng) {
  if (mode != "percolation" && mode != "eden")
    throw std::invalid_argument("peel_step: unknown mode");
  if (state.terminated) throw std::logic_error("peel_step: terminal state");
  const CachedRow& row = cached_kernel_row(state.m, state.n);
  bigint u = uniform_below(row.total, rng);
  std::size_t idx = 0;
  while (u >= row.cumulative[idx]) ++idx;
  const KernelEntry& e = row.entries[idx];
  NecklaceRecord rec;
  rec.event = e.event;
  switch (e.event) {
    case PeelEvent::terminate:
      state.terminated = true;
      rec.triangles = 0;
      break;
    case PeelEvent::new_vertex:
      rec.direction = int(rng.bits() & 1u);
      state.m = e.m1;
      state.n = e.n1;
      rec.triangles = 1;
      break;
    case PeelEvent::split:
      rec.m1 = e.m1;
      rec.n1 = e.n1;
      rec.m2 = e.m2;
      rec.n2 = e.n2;
      rec.target_region = 1;
      rec.bubble_m = e.m2;
      rec.bubble_n = e.n2;
      rec.triangles = 1 + e.m2 + 2 * e.n2;  // revealed triangle plus the bubble fill
      state.m = e.m1;
      state.n = e.n1;
      break;
  }
  rec.outer_boundary = state.m + 2;
  rec.offset = (mode == "eden") ? long(rng.index(std::size_t(rec.outer_boundary))) : 0;
  state.necklaces.push_back(rec);
  ++state.steps;
  return state;
}

PeelingState explore_until_target(long m0, long n0, const std::string& mode, Rng& rng) {
  PeelingState st;
  st.m = m0;
  st.n = n0;
  while (!st.terminated) st = peel_step(std::move(st), mode, rng);
  return st;
}

void reshuffle_necklaces(std::vector<NecklaceRecord>& log, Rng& rng) {
  for (auto& rec : log)
    rec.offset = long(rng.index(std::size_t(rec.outer_boundary)));
}

// ---------------------------------------------------------------------------
// Mullin bijection.

bool MullinWalk::valid() const {
  long x = 0, y = 0;
  for (WalkStep s : steps) {
    switch (s) {
      case WalkStep::xp: ++x; break;
      case WalkStep::xm: --x; break;
      case WalkStep::yp: ++y; break;
      case WalkStep::ym: --y; break;
    }
    if (x < 0 || y < 0) return false;
  }
  return x == 0 && y == 0;
}

int DecoratedMap::rot_next(int h) const {
  const auto& rot = rotation[vertex_of[h]];
  for (std::size_t i = 0; i < rot.size(); ++i)
    if (rot[i] == h) return rot[(i + 1) % rot.size()];
  throw std::logic_error("rot_next: half-edge not in its vertex rotation");
}

int DecoratedMap::num_faces() const {
  std::size_t H = vertex_of.size();
  if (H == 0) return 1;
  std::vector<bool> seen(H, false);
  int faces = 0;
  for (std::size_t h0 = 0; h0 < H; ++h0) {
    if (seen[h0]) continue;
    ++faces;
    int h = int(h0);
    do {
      seen[std::size_t(h)] = true;
      h = rot_next(twin(h));
    } while (h != int(h0));
  }
  return faces;
}

int DecoratedMap::euler_characteristic() const {
  return num_vertices() - num_edges() + num_faces();
}

DecoratedMap mullin(const MullinWalk& walk) {
  if (!walk.valid()) throw std::invalid_argument("mullin: invalid walk");
  DecoratedMap m;
  m.rotation.emplace_back();  // root vertex
  m.root_vertex = 0;
  int v = 0;
  std::vector<std::pair<int, int>> tree_stack;   // (parent vertex, down half-edge)
  std::vector<int> pending;                      // open non-tree closing halves
  for (WalkStep s : walk.steps) {
    switch (s) {
      case WalkStep::xp: {
        int h = int(m.vertex_of.size());
        int w = int(m.rotation.size());
        m.vertex_of.push_back(v);
        m.vertex_of.push_back(w);
        m.rotation[v].push_back(h);
        m.rotation.emplace_back();
        m.rotation[w].push_back(h + 1);
        m.tree.push_back(true);
        if (m.root_half_edge < 0) m.root_half_edge = h;
        tree_stack.push_back({v, h});
        v = w;
        break;
      }
      case WalkStep::xm: {
        if (tree_stack.empty()) throw std::invalid_argument("mullin: unbalanced x");
        v = tree_stack.back().first;
        tree_stack.pop_back();
        break;
      }
      case WalkStep::yp: {
        int h = int(m.vertex_of.size());
        m.vertex_of.push_back(v);
        m.vertex_of.push_back(-1);  // endpoint set at the closing step
        m.rotation[v].push_back(h);
        m.tree.push_back(false);
        if (m.root_half_edge < 0) m.root_half_edge = h;
        pending.push_back(h + 1);
        break;
      }
      case WalkStep::ym: {
        if (pending.empty()) throw std::invalid_argument("mullin: unbalanced y");
        int h2 = pending.back();
        pending.pop_back();
        m.vertex_of[h2] = v;
        m.rotation[v].push_back(h2);
        break;
      }
    }
  }
  if (!tree_stack.empty() || !pending.empty())
    throw std::invalid_argument("mullin: unbalanced walk");
  return m;
}

MullinWalk mullin_inverse(const DecoratedMap& map) {
  MullinWalk walk;
  std::size_t H = map.vertex_of.size();
  if (H == 0) return walk;
  std::vector<bool> seen(H, false);
  // each frame sweeps a vertex rotation cyclically starting just after the
  // arrival half-edge; reaching the arrival half-edge again emits the return
  // step (the root has no arrival and simply finishes its sweep)
  struct Frame {
    int vertex;
    std::size_t start;
    std::size_t i = 0;
    int arrival = -1;
  };
  std::vector<Frame> stack;
  stack.push_back({map.root_vertex, 0, 0, -1});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& rot = map.rotation[std::size_t(f.vertex)];
    if (f.i >= rot.size()) {
      stack.pop_back();
      continue;
    }
    int h = rot[(f.start + f.i) % rot.size()];
    if (h == f.arrival) {
      walk.steps.push_back(WalkStep::xm);
      stack.pop_back();
      continue;
    }
    ++f.i;
    int e2 = h ^ 1;
    bool edge_seen = seen[std::size_t(h)] || seen[std::size_t(e2)];
    seen[std::size_t(h)] = true;
    if (map.tree[std::size_t(h / 2)]) {
      if (edge_seen) throw std::logic_error("mullin_inverse: tree edge revisited");
      walk.steps.push_back(WalkStep::xp);
      seen[std::size_t(e2)] = true;
      int w = map.vertex_of[std::size_t(e2)];
      const auto& wrot = map.rotation[std::size_t(w)];
      std::size_t at = 0;
      for (std::size_t i = 0; i < wrot.size(); ++i)
        if (wrot[i] == e2) at = i;
      stack.push_back({w, (at + 1) % wrot.size(), 0, e2});
    } else {
      walk.steps.push_back(edge_seen ? WalkStep::ym : WalkStep::yp);
    }
  }
  return walk;
}

MullinWalk sample_mullin_walk(int n, Rng& rng) {
  // choose m with weight C(2n,2m) Cat_m Cat_{n-m}, then interleave two
  // uniform Dyck words
  auto binom = [](int a, int b) {
    bigint r = 1;
    for (int i = 0; i < b; ++i) {
      r *= (a - i);
      r /= (i + 1);
    }
    return r;
  };
  auto catalan = [&](int k) { return binom(2 * k, k) / (k + 1); };
  std::vector<bigint> w(std::size_t(n) + 1);
  bigint total = 0;
  for (int m = 0; m <= n; ++m) {
    w[std::size_t(m)] = binom(2 * n, 2 * m) * catalan(m) * catalan(n - m);
    total += w[std::size_t(m)];
  }
  bigint u = uniform_below(total, rng);
  int m = 0;
  bigint cum = 0;
  for (; m <= n; ++m) {
    cum += w[std::size_t(m)];
    if (u < cum) break;
  }
  auto dyck = [&](int k) {
    // cycle lemma: uniform word with k+1 ups / k downs cycled to the unique
    // rotation whose strict prefix sums stay positive, then drop the first up
    std::vector<int> word(2 * std::size_t(k) + 1, -1);
    std::vector<std::size_t> idx(word.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (int i = 0; i < k + 1; ++i) {
      std::size_t j = rng.index(idx.size());
      word[idx[j]] = +1;
      idx.erase(idx.begin() + long(j));
    }
    // rotate to start just after the last prefix minimum (cycle lemma)
    std::size_t best = 0;
    long sum = 0, min_sum = 0;
    for (std::size_t i = 0; i < word.size(); ++i) {
      sum += word[i];
      if (sum <= min_sum) {
        min_sum = sum;
        best = i + 1;
      }
    }
    std::vector<int> out;
    for (std::size_t i = 1; i < word.size(); ++i)
      out.push_back(word[(best + i) % word.size()]);
    return out;
  };
  std::vector<int> xw = dyck(m), yw = dyck(n - m);
  // choose positions of the 2m x-steps uniformly among 2n slots
  std::vector<bool> is_x(2 * std::size_t(n), false);
  std::vector<std::size_t> slots(2 * std::size_t(n));
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  for (int i = 0; i < 2 * m; ++i) {
    std::size_t j = rng.index(slots.size());
    is_x[slots[j]] = true;
    slots.erase(slots.begin() + long(j));
  }
  MullinWalk walk;
  std::size_t xi = 0, yi = 0;
  for (std::size_t i = 0; i < 2 * std::size_t(n); ++i) {
    if (is_x[i])
      walk.steps.push_back(xw[xi++] > 0 ? WalkStep::xp : WalkStep::xm);
    else
      walk.steps.push_back(yw[yi++] > 0 ? WalkStep::yp : WalkStep::ym);
  }
  return walk;
}

std::vector<MullinWalk> all_mullin_walks(int n) {
  std::vector<MullinWalk> out;
  MullinWalk cur;
  std::vector<WalkStep> opts = {WalkStep::xp, WalkStep::xm, WalkStep::yp, WalkStep::ym};
  struct Rec {
    long x = 0, y = 0;
  };
  auto rec = [&](auto&& self, Rec st) -> void {
    if (cur.steps.size() == 2 * std::size_t(n)) {
      if (st.x == 0 && st.y == 0) out.push_back(cur);
      return;
    }
    long rem = 2 * long(n) - long(cur.steps.size());
    if (st.x + st.y > rem) return;
    for (WalkStep s : opts) {
      Rec nx = st;
      switch (s) {
        case WalkStep::xp: ++nx.x; break;
        case WalkStep::xm: --nx.x; break;
        case WalkStep::yp: ++nx.y; break;
        case WalkStep::ym: --nx.y; break;
      }
      if (nx.x < 0 || nx.y < 0) continue;
      cur.steps.push_back(s);
      self(self, nx);
      cur.steps.pop_back();
    }
  };
  rec(rec, Rec{});
  return out;
}

// ---------------------------------------------------------------------------
// Wilson's algorithm and LERW.

std::vector<int> lerw(const AdjGraph& g, int a, int b, Rng& rng) {
  std::vector<int> path;
  std::vector<int> pos(g.size(), -1);
  path.push_back(a);
  pos[std::size_t(a)] = 0;
  int v = a;
  while (v != b) {
    const auto& nb = g[std::size_t(v)];
    int w = nb[rng.index(nb.size())];
    if (pos[std::size_t(w)] >= 0) {
      // erase the loop
      for (std::size_t i = std::size_t(pos[std::size_t(w)]) + 1; i < path.size(); ++i)
        pos[std::size_t(path[i])] = -1;
      path.resize(std::size_t(pos[std::size_t(w)]) + 1);
    } else {
      pos[std::size_t(w)] = int(path.size());
      path.push_back(w);
    }
    v = w;
  }
  return path;
}

std::vector<int> wilson_ust(const AdjGraph& g, int root, Rng& rng) {
  std::vector<int> parent(g.size(), -2);
  parent[std::size_t(root)] = -1;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (parent[s] != -2) continue;
    // random walk from s until the current tree is hit, with loop erasure
    std::vector<int> path;
    std::vector<int> pos(g.size(), -1);
    int v = int(s);
    path.push_back(v);
    pos[s] = 0;
    while (parent[std::size_t(v)] == -2) {
      const auto& nb = g[std::size_t(v)];
      int w = nb[rng.index(nb.size())];
      if (pos[std::size_t(w)] >= 0) {
        for (std::size_t i = std::size_t(pos[std::size_t(w)]) + 1; i < path.size(); ++i)
          pos[std::size_t(path[i])] = -1;
        path.resize(std::size_t(pos[std::size_t(w)]) + 1);
      } else {
        pos[std::size_t(w)] = int(path.size());
        path.push_back(w);
      }
      v = w;
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      parent[std::size_t(path[i])] = path[i + 1];
  }
  return parent;
}

// ---------------------------------------------------------------------------
// DLA vs reshuffled LERW.

namespace {

// Mutable cut-map used by the unzipping procedures.
struct CutMap {
  std::vector<int> vertex_of;
  std::vector<std::vector<int>> rotation;
  std::vector<bool> on_polygon;
  int tip = -1;
  int corner_a = -1, corner_b = -1;  // grey corner at the tip: rot_next(a) == b
  int grey_handle = -1;
  bool started = false;

  explicit CutMap(const DecoratedMap& m)
      : vertex_of(m.vertex_of), rotation(m.rotation),
        on_polygon(m.rotation.size(), false) {}

  int twin(int h) const { return h ^ 1; }

  int rot_next(int h) const {
    const auto& rot = rotation[std::size_t(vertex_of[std::size_t(h)])];
    for (std::size_t i = 0; i < rot.size(); ++i)
      if (rot[i] == h) return rot[(i + 1) % rot.size()];
    throw std::logic_error("CutMap::rot_next");
  }

  // Unzips the edge whose tip-side half-edge is h (vertex_of[h] must be the
  // tip, or the seed on the first step).
  void unzip(int h) {
    int t = vertex_of[std::size_t(h)];
    int hp = twin(h);
    int w = vertex_of[std::size_t(hp)];
    if (!started) {
      // double the edge into a 2-gon
      int k = int(vertex_of.size());
      vertex_of.push_back(t);
      vertex_of.push_back(w);
      auto& rt = rotation[std::size_t(t)];
      rt.insert(std::find(rt.begin(), rt.end(), h), k);
      auto& rw = rotation[std::size_t(w)];
      rw.insert(std::next(std::find(rw.begin(), rw.end(), hp)), k + 1);
      on_polygon[std::size_t(t)] = true;
      on_polygon[std::size_t(w)] = true;
      tip = w;
      corner_a = hp;
      corner_b = k + 1;
      grey_handle = h;
      started = true;
      return;
    }
    if (!on_polygon[std::size_t(t)]) throw std::logic_error("unzip: edge not on the polygon");
    // locate the unique grey corner at t (every polygon vertex has exactly
    // one: freshly attached endpoints are never already on the polygon)
    {
      int found = 0;
      int x = grey_handle;
      do {
        int nxt = rot_next(twin(x));
        if (vertex_of[std::size_t(nxt)] == t) {
          corner_a = twin(x);
          corner_b = nxt;
          ++found;
        }
        x = nxt;
      } while (x != grey_handle);
      if (found != 1) throw std::logic_error("unzip: grey corner not unique");
    }
    auto& rt = rotation[std::size_t(t)];
    std::vector<int> seq;
    std::size_t ib = 0;
    for (std::size_t i = 0; i < rt.size(); ++i)
      if (rt[i] == corner_b) ib = i;
    for (std::size_t i = 0; i < rt.size(); ++i) seq.push_back(rt[(ib + i) % rt.size()]);
    std::size_t p = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
      if (seq[i] == h) p = i;
    if (seq.back() != corner_a) throw std::logic_error("unzip: corner mismatch");
    int g = int(vertex_of.size());   // new pair: g at t, g+1 at w
    int t_new = int(rotation.size());
    vertex_of.push_back(t);
    vertex_of.push_back(w);
    std::vector<int> rot_new(seq.begin(), seq.begin() + long(p));  // arc b..pred(h)
    rot_new.push_back(h);
    std::vector<int> rot_old;
    rot_old.push_back(g);
    for (std::size_t i = p + 1; i < seq.size(); ++i) rot_old.push_back(seq[i]);
    rotation.push_back(rot_new);
    rotation[std::size_t(t)] = rot_old;
    for (int x : rot_new) vertex_of[std::size_t(x)] = t_new;
    vertex_of[std::size_t(h)] = t_new;
    on_polygon.push_back(true);
    auto& rw = rotation[std::size_t(w)];
    rw.insert(std::find(rw.begin(), rw.end(), hp), g + 1);
    on_polygon[std::size_t(w)] = true;
    tip = w;
    corner_a = g + 1;
    corner_b = hp;
    grey_handle = g;
    assert(euler() == 2);
  }

  // statistic of the unzipped map: tip degree and summed degree along the
  // grey face boundary
  int kstep_statistic() const {
    long tip_deg = long(rotation[std::size_t(tip)].size());
    long bsum = 0;
    int h = grey_handle;
    do {
      bsum += long(rotation[std::size_t(vertex_of[std::size_t(h)])].size());
      h = rot_next(twin(h));
    } while (h != grey_handle);
    return int(tip_deg * 1000 + bsum);
  }

  int num_faces() const {
    std::vector<bool> seen(vertex_of.size(), false);
    int faces = 0;
    for (std::size_t h0 = 0; h0 < vertex_of.size(); ++h0) {
      if (seen[h0]) continue;
      ++faces;
      int h = int(h0);
      do {
        seen[std::size_t(h)] = true;
        h = rot_next(twin(h));
      } while (h != int(h0));
    }
    return faces;
  }

  int euler() const {
    return int(rotation.size()) - int(vertex_of.size()) / 2 + num_faces();
  }
};

}  // namespace

DlaLerwStats compare_dla_lerw(int n_edges, int k, long samples, Rng& rng) {
  DlaLerwStats stats;
  stats.k = k;
  for (long s = 0; s < samples; ++s) {
    DecoratedMap map;
    do {
      map = mullin(sample_mullin_walk(n_edges, rng));
    } while (map.num_vertices() < 2);
    int V = map.num_vertices();
    int seed = int(rng.index(std::size_t(V)));
    int target = int(rng.index(std::size_t(V - 1)));
    if (target >= seed) ++target;

    // tree path from seed to target (the decorating tree's branch has the
    // law of a LERW between them)
    std::vector<int> parent_h(std::size_t(V), -1);  // half-edge toward parent
    {
      std::vector<int> order;
      std::vector<bool> vis(std::size_t(V), false);
      order.push_back(seed);
      vis[std::size_t(seed)] = true;
      for (std::size_t qi = 0; qi < order.size(); ++qi) {
        int v = order[qi];
        for (int h : map.rotation[std::size_t(v)]) {
          if (!map.tree[std::size_t(h / 2)]) continue;
          int w = map.vertex_of[std::size_t(map.twin(h))];
          if (vis[std::size_t(w)]) continue;
          vis[std::size_t(w)] = true;
          parent_h[std::size_t(w)] = map.twin(h);  // half-edge at w toward v
          order.push_back(w);
        }
      }
    }
    std::vector<int> path_halves;  // tip-side half-edges along seed -> target
    for (int v = target; v != seed; v = map.vertex_of[std::size_t(map.twin(parent_h[std::size_t(v)]))])
      path_halves.push_back(map.twin(parent_h[std::size_t(v)]));
    std::reverse(path_halves.begin(), path_halves.end());
    int lerw_len = int(path_halves.size());
    stats.lerw_edges[lerw_len]++;

    {
      CutMap cm(map);
      int stat = -1;
      // k unzips happen only when the process has not yet reached the target,
      // i.e. when the path is strictly longer than k edges
      if (lerw_len > k) {
        for (int i = 0; i < k; ++i) cm.unzip(path_halves[std::size_t(i)]);
        stat = cm.kstep_statistic();
      }
      stats.lerw_kstep[stat]++;
    }

    // DLA: tip resampled by harmonic measure from the target at every step
    {
      CutMap cm(map);
      int steps = 0;
      int stat = -1;
      bool done = false;
      while (!done) {
        // random walk from target until the polygon (or seed) is first hit
        int v = target;
        int last_h = -1;
        for (;;) {
          const auto& nb = cm.rotation[std::size_t(v)];
          int h = nb[rng.index(nb.size())];
          int w = cm.vertex_of[std::size_t(cm.twin(h))];
          bool hit = cm.started ? cm.on_polygon[std::size_t(w)] : (w == seed);
          if (hit) {
            last_h = cm.twin(h);  // polygon-side half-edge of the crossed edge
            break;
          }
          v = w;
        }
        int far = cm.vertex_of[std::size_t(cm.twin(last_h))];
        ++steps;
        if (far == target) {
          done = true;
        } else {
          cm.unzip(last_h);
        }
        if (steps == k && !done) stat = cm.kstep_statistic();
        if (done && steps < k) stat = -1;
      }
      stats.dla_edges[steps]++;
      stats.dla_kstep[stat]++;
    }
  }
  return stats;
}

}  // namespace qlev::maps
