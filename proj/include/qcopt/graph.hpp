#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcopt/errors.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

/// Directed communication topology. Edges are stored as (receiver, sender)
/// pairs; every node additionally carries an implicit self-loop that is never
/// counted in degrees or path lengths. Immutable after construction, so a
/// graph can be shared read-only across concurrent runs. Strong connectivity
/// and the diameter are computed once at construction.
class Digraph {
 public:
  Digraph(int node_count, std::vector<std::pair<int, int>> receiver_sender_edges)
      : n_(node_count), out_(node_count), in_(node_count) {
    if (node_count < 1) throw Error("digraph needs at least one node");
    auto& edges = receiver_sender_edges;
    for (auto [r, s] : edges) {
      if (r < 0 || r >= n_ || s < 0 || s >= n_)
        throw Error("edge endpoint out of range: (" + std::to_string(r) + ", " + std::to_string(s) + ")");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [r, s] : edges) {
      if (r == s) continue;  // self-loops are implicit
      out_[s].push_back(r);
      in_[r].push_back(s);
      ++m_;
    }
    for (auto& v : out_) std::sort(v.begin(), v.end());
    for (auto& v : in_) std::sort(v.begin(), v.end());
    analyze();
  }

  int node_count() const { return n_; }

  /// Directed edge count, implicit self-loops excluded.
  std::size_t edge_count() const { return m_; }

  const std::vector<int>& out_neighbors(int v) const { return out_[v]; }
  const std::vector<int>& in_neighbors(int v) const { return in_[v]; }
  int out_degree(int v) const { return static_cast<int>(out_[v].size()); }
  int in_degree(int v) const { return static_cast<int>(in_[v].size()); }

  bool strongly_connected() const { return strongly_connected_; }

  /// Longest shortest directed path over ordered node pairs; 0 for a single
  /// node. Throws when the graph is not strongly connected.
  int diameter() const {
    if (!strongly_connected_)
      throw NotStronglyConnected("diameter undefined: digraph is not strongly connected");
    return diameter_;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> result;
    result.reserve(m_);
    for (int s = 0; s < n_; ++s)
      for (int r : out_[s]) result.emplace_back(r, s);
    std::sort(result.begin(), result.end());
    return result;
  }

 private:
  void analyze() {
    strongly_connected_ = true;
    diameter_ = 0;
    std::vector<int> dist(n_);
    std::vector<int> queue(n_);
    for (int src = 0; src < n_; ++src) {
      std::fill(dist.begin(), dist.end(), -1);
      dist[src] = 0;
      int head = 0, tail = 0;
      queue[tail++] = src;
      int reached = 1;
      while (head < tail) {
        const int u = queue[head++];
        for (int v : out_[u]) {
          if (dist[v] >= 0) continue;
          dist[v] = dist[u] + 1;
          diameter_ = std::max(diameter_, dist[v]);
          queue[tail++] = v;
          ++reached;
        }
      }
      if (reached != n_) {
        strongly_connected_ = false;
        diameter_ = 0;
        return;
      }
    }
  }

  int n_;
  std::vector<std::vector<int>> out_, in_;
  std::size_t m_ = 0;
  bool strongly_connected_ = false;
  int diameter_ = 0;
};

inline bool is_strongly_connected(const Digraph& g) { return g.strongly_connected(); }
inline int diameter(const Digraph& g) { return g.diameter(); }

inline Digraph reverse(const Digraph& g) {
  std::vector<std::pair<int, int>> flipped;
  flipped.reserve(g.edge_count());
  for (auto [r, s] : g.edges()) flipped.emplace_back(s, r);
  return Digraph(g.node_count(), std::move(flipped));
}

/// Random digraph satisfying strong connectivity by construction: a random
/// permutation Hamiltonian cycle plus each remaining ordered pair included
/// independently with probability p. Deterministic for a fixed seed.
inline Digraph random_strongly_connected(int n, double p, std::uint64_t seed) {
  if (n < 1) throw Error("digraph needs at least one node");
  if (p < 0.0 || p > 1.0) throw Error("edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> cycle_target(n, -1);
  std::vector<std::pair<int, int>> edges;
  if (n > 1) {
    for (int t = 0; t < n; ++t) {
      const int sender = perm[t];
      const int receiver = perm[(t + 1) % n];
      cycle_target[sender] = receiver;
      edges.emplace_back(receiver, sender);
    }
  }
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      if (r == s || cycle_target[s] == r) continue;
      if (rng.unit() < p) edges.emplace_back(r, s);
    }
  }
  return Digraph(n, std::move(edges));
}

/// Edge-list text format: '#' comments, a header line "n=<count>", then one
/// "receiver sender" pair per line, 0-indexed.
inline Digraph read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    std::string body = line.substr(begin, end - begin + 1);
    if (n < 0) {
      if (body.rfind("n=", 0) != 0) throw Error("edge list must start with an 'n=<count>' header");
      n = std::stoi(body.substr(2));
      continue;
    }
    std::istringstream row(body);
    int r = 0, s = 0;
    if (!(row >> r >> s)) throw Error("malformed edge line: '" + body + "'");
    edges.emplace_back(r, s);
  }
  if (n < 0) throw Error("edge list missing 'n=<count>' header");
  return Digraph(n, std::move(edges));
}

inline void write_edge_list(std::ostream& out, const Digraph& g) {
  out << "# receiver sender, 0-indexed; self-loops implicit\n";
  out << "n=" << g.node_count() << "\n";
  for (auto [r, s] : g.edges()) out << r << " " << s << "\n";
}

}  // namespace qcopt
