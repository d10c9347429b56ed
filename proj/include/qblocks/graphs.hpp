#pragma once

// Trivalent colored graphs and admissible colorings.
//
// Colors at level p are the even integers 0, 2, ..., p-3.  A triple (a,b,c)
// is admissible when it satisfies the triangle inequalities and the
// truncation a+b+c <= 2p-4.  Block dimensions are counts of admissible edge
// colorings of a trivalent spine graph with genus-many independent cycles
// and one leg per marked point.

#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "qblocks/cyclotomic.hpp"

namespace qblocks {

inline bool is_valid_color(int p, int a) {
  return a >= 0 && a <= p - 3 && a % 2 == 0;
}

inline void check_color(int p, int a) {
  if (!is_valid_color(p, a))
    throw std::invalid_argument("invalid color " + std::to_string(a) +
                                " at level " + std::to_string(p) +
                                " (need even, 0.." + std::to_string(p - 3) + ")");
}

inline std::vector<int> colors(int p) {
  check_level(p);
  std::vector<int> out;
  for (int a = 0; a <= p - 3; a += 2) out.push_back(a);
  return out;
}

inline bool admissible(int p, int a, int b, int c) {
  check_color(p, a);
  check_color(p, b);
  check_color(p, c);
  if (c < std::abs(a - b) || c > a + b) return false;
  return a + b + c <= 2 * p - 4;
}

// admissibility without the validity throw, for inner enumeration loops
// where colors come from colors(p) by construction
inline bool adm_fast(int p, int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b && a + b + c <= 2 * p - 4;
}

// A trivalent spine graph.  Edges join vertices (loops allowed, u == v); the
// single vertexless circle is encoded as one edge with u = v = -1.  Legs are
// colored univalent stubs attached to vertices.
struct ColoredGraph {
  struct Edge {
    int u, v;
    std::string name;
  };
  struct Leg {
    int vertex;
    int color;
    std::string name;
  };

  int num_vertices = 0;
  std::vector<Edge> edges;
  std::vector<Leg> legs;

  // first Betti number (independent cycles)
  int genus() const {
    if (num_vertices == 0) return static_cast<int>(edges.size());
    // union-find over vertices to count components
    std::vector<int> parent(static_cast<std::size_t>(num_vertices));
    for (int i = 0; i < num_vertices; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (const Edge& e : edges) {
      if (e.u < 0) continue;
      int ru = find(e.u), rv = find(e.v);
      if (ru != rv) parent[static_cast<std::size_t>(ru)] = rv;
    }
    int comps = 0;
    for (int i = 0; i < num_vertices; ++i)
      if (find(i) == i) ++comps;
    return static_cast<int>(edges.size()) - num_vertices + comps;
  }

  // structural checks: vertex degrees are exactly 3 (loops count twice),
  // leg colors are valid, indices in range
  void validate(int p) const {
    if (num_vertices == 0) {
      if (edges.size() != 1 || edges[0].u != -1 || edges[0].v != -1 ||
          !legs.empty())
        throw std::invalid_argument(
            "vertexless graph must be a single bare circle");
      return;
    }
    std::vector<int> deg(static_cast<std::size_t>(num_vertices), 0);
    for (const Edge& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= num_vertices || e.v >= num_vertices)
        throw std::invalid_argument("edge endpoint out of range");
      ++deg[static_cast<std::size_t>(e.u)];
      ++deg[static_cast<std::size_t>(e.v)];
    }
    for (const Leg& l : legs) {
      if (l.vertex < 0 || l.vertex >= num_vertices)
        throw std::invalid_argument("leg vertex out of range");
      check_color(p, l.color);
      ++deg[static_cast<std::size_t>(l.vertex)];
    }
    for (int i = 0; i < num_vertices; ++i)
      if (deg[static_cast<std::size_t>(i)] != 3)
        throw std::invalid_argument("vertex " + std::to_string(i) +
                                    " has degree " +
                                    std::to_string(deg[static_cast<std::size_t>(i)]) +
                                    ", want 3");
  }
};

// A coloring is one color per edge, aligned with ColoredGraph::edges.
using Coloring = std::vector<int>;

// Caterpillar spine for genus g with leg colors `labels` (up to two legs):
// a chain of handle loops a, c, d, ..., b joined through stem edges, with the
// legs inserted on the stem before the last handle.  Edge order is the
// enumeration order (chosen so vertex constraints close early).
inline ColoredGraph standard_graph(int g, const std::vector<int>& labels) {
  if (g < 1 || g > 4)
    throw std::invalid_argument("standard_graph supports genus 1..4");
  if (labels.size() > 2)
    throw std::invalid_argument("standard_graph supports at most two legs");
  const int r = static_cast<int>(labels.size());
  ColoredGraph G;
  auto E = [&](int u, int v, const std::string& n) {
    G.edges.push_back({u, v, n});
  };
  auto L = [&](int vtx, int color, const std::string& n) {
    G.legs.push_back({vtx, color, n});
  };
  if (g == 1) {
    if (r == 0) {
      G.num_vertices = 0;
      E(-1, -1, "a");
    } else if (r == 1) {
      G.num_vertices = 1;
      E(0, 0, "a");
      L(0, labels[0], "k");
    } else {
      G.num_vertices = 2;
      E(0, 1, "m1");
      E(0, 1, "m2");
      L(0, labels[0], "i");
      L(1, labels[1], "j");
    }
  } else if (g == 2) {
    if (r == 0) {
      G.num_vertices = 2;
      E(0, 0, "a");
      E(0, 1, "m");
      E(1, 1, "b");
    } else if (r == 1) {
      G.num_vertices = 3;
      E(0, 0, "a");
      E(0, 1, "m1");
      E(1, 2, "m2");
      E(2, 2, "b");
      L(1, labels[0], "k");
    } else {
      G.num_vertices = 4;
      E(0, 0, "a");
      E(0, 1, "m1");
      E(1, 2, "m2");
      E(2, 3, "m3");
      E(3, 3, "b");
      L(1, labels[0], "i");
      L(2, labels[1], "j");
    }
  } else if (g == 3) {
    // handles a, c, b around a central trivalent stem vertex
    if (r == 0) {
      G.num_vertices = 4;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t");
      E(2, 2, "c");
      E(3, 3, "b");
    } else if (r == 1) {
      G.num_vertices = 5;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t");
      E(2, 2, "c");
      E(3, 4, "s3");
      E(4, 4, "b");
      L(3, labels[0], "k");
    } else {
      G.num_vertices = 6;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t");
      E(2, 2, "c");
      E(3, 4, "s3");
      E(4, 5, "s4");
      E(5, 5, "b");
      L(3, labels[0], "i");
      L(4, labels[1], "j");
    }
  } else {
    if (r == 0) {
      G.num_vertices = 6;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t1");
      E(2, 2, "c");
      E(3, 5, "s3");
      E(3, 4, "t2");
      E(4, 4, "d");
      E(5, 5, "b");
    } else if (r == 1) {
      G.num_vertices = 7;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t1");
      E(2, 2, "c");
      E(3, 5, "s3");
      E(3, 4, "t2");
      E(4, 4, "d");
      E(5, 6, "s4");
      E(6, 6, "b");
      L(5, labels[0], "k");
    } else {
      G.num_vertices = 8;
      E(0, 0, "a");
      E(0, 1, "s1");
      E(1, 3, "s2");
      E(1, 2, "t1");
      E(2, 2, "c");
      E(3, 5, "s3");
      E(3, 4, "t2");
      E(4, 4, "d");
      E(5, 6, "s4");
      E(6, 7, "s5");
      E(7, 7, "b");
      L(5, labels[0], "i");
      L(6, labels[1], "j");
    }
  }
  return G;
}

namespace detail {

// per-vertex constraint: three slots, each an edge index or a fixed color
struct VertexSlot {
  int kind[3];   // 0: edge index in val[], 1: fixed color
  int value[3];  // edge index or color
  int ready_at;  // max edge index among slots; check fires once it is set
};

inline std::vector<VertexSlot> vertex_slots(int p, const ColoredGraph& G) {
  G.validate(p);
  std::vector<VertexSlot> vs(static_cast<std::size_t>(G.num_vertices));
  std::vector<int> fill(static_cast<std::size_t>(G.num_vertices), 0);
  auto put = [&](int vtx, int kind, int value) {
    VertexSlot& s = vs[static_cast<std::size_t>(vtx)];
    s.kind[fill[static_cast<std::size_t>(vtx)]] = kind;
    s.value[fill[static_cast<std::size_t>(vtx)]] = value;
    ++fill[static_cast<std::size_t>(vtx)];
  };
  for (std::size_t i = 0; i < G.edges.size(); ++i) {
    const auto& e = G.edges[i];
    if (e.u < 0) continue;
    put(e.u, 0, static_cast<int>(i));
    put(e.v, 0, static_cast<int>(i));
  }
  for (const auto& l : G.legs) put(l.vertex, 1, l.color);
  for (auto& s : vs) {
    s.ready_at = -1;
    for (int j = 0; j < 3; ++j)
      if (s.kind[j] == 0) s.ready_at = std::max(s.ready_at, s.value[j]);
  }
  return vs;
}

template <class F>
void dfs_colorings(int p, const ColoredGraph& G, F&& fn) {
  const auto pal = colors(p);
  const auto vs = vertex_slots(p, G);
  const int ne = static_cast<int>(G.edges.size());
  // vertices whose constraint closes when edge i receives its color
  std::vector<std::vector<int>> fire(static_cast<std::size_t>(ne));
  for (std::size_t v = 0; v < vs.size(); ++v)
    if (vs[v].ready_at >= 0)
      fire[static_cast<std::size_t>(vs[v].ready_at)].push_back(static_cast<int>(v));
  Coloring val(static_cast<std::size_t>(ne), -1);
  auto slot_color = [&](const VertexSlot& s, int j) {
    return s.kind[j] == 1 ? s.value[j] : val[static_cast<std::size_t>(s.value[j])];
  };
  auto rec = [&](auto&& self, int i) -> void {
    if (i == ne) {
      fn(static_cast<const Coloring&>(val));
      return;
    }
    for (int c : pal) {
      val[static_cast<std::size_t>(i)] = c;
      bool ok = true;
      for (int v : fire[static_cast<std::size_t>(i)]) {
        const VertexSlot& s = vs[static_cast<std::size_t>(v)];
        if (!adm_fast(p, slot_color(s, 0), slot_color(s, 1), slot_color(s, 2))) {
          ok = false;
          break;
        }
      }
      if (ok) self(self, i + 1);
    }
    val[static_cast<std::size_t>(i)] = -1;
  };
  rec(rec, 0);
}

}  // namespace detail

// all admissible colorings in lexicographic order over the edge list
inline std::vector<Coloring> enumerate_colorings(int p, const ColoredGraph& G) {
  std::vector<Coloring> out;
  detail::dfs_colorings(p, G, [&](const Coloring& c) { out.push_back(c); });
  return out;
}

// count without storing (same traversal)
inline mpz_class count_colorings(int p, const ColoredGraph& G) {
  long long n = 0;
  detail::dfs_colorings(p, G, [&](const Coloring&) { ++n; });
  return mpz_class(static_cast<long>(n));
}

}  // namespace qblocks
