#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qcopt/graph.hpp"

using namespace qcopt;

namespace {

Digraph directed_cycle(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back((i + 1) % n, i);
  return Digraph(n, std::move(edges));
}

Digraph complete_digraph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      if (r != s) edges.emplace_back(r, s);
  return Digraph(n, std::move(edges));
}

}  // namespace

TEST_CASE("strong connectivity on canonical digraphs") {
  CHECK(is_strongly_connected(directed_cycle(3)));
  CHECK(is_strongly_connected(complete_digraph(5)));

  // one-way pair: 0 -> 1 with no return path
  Digraph one_way(2, {{1, 0}});
  CHECK_FALSE(is_strongly_connected(one_way));
}

TEST_CASE("diameter on canonical digraphs") {
  CHECK(diameter(directed_cycle(6)) == 5);
  CHECK(diameter(complete_digraph(20)) == 1);

  // 0 -> 1 -> 2 -> 3 with a closing edge 3 -> 0: the longest shortest path is
  // the full chain.
  Digraph ring4(4, {{1, 0}, {2, 1}, {3, 2}, {0, 3}});
  CHECK(diameter(ring4) == 3);

  Digraph disconnected(2, {{1, 0}});
  CHECK_THROWS_AS(diameter(disconnected), NotStronglyConnected);
}

TEST_CASE("single node is strongly connected with diameter zero") {
  Digraph g(1, {});
  CHECK(is_strongly_connected(g));
  CHECK(diameter(g) == 0);
  CHECK(g.edge_count() == 0);
  CHECK(g.out_degree(0) == 0);
}

TEST_CASE("self-loops and duplicate edges are normalized away") {
  Digraph g(3, {{1, 0}, {1, 0}, {0, 0}, {2, 1}, {0, 2}});
  CHECK(g.edge_count() == 3);
  CHECK(g.out_degree(0) == 1);
  CHECK(g.in_neighbors(1) == std::vector<int>{0});
}

TEST_CASE("generator: degenerate parameters") {
  Digraph single = random_strongly_connected(1, 0.0, 7);
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);
  CHECK(is_strongly_connected(single));

  Digraph bare_cycle = random_strongly_connected(20, 0.0, 3);
  CHECK(is_strongly_connected(bare_cycle));
  CHECK(bare_cycle.edge_count() == 20);
  CHECK(diameter(bare_cycle) == 19);
}

TEST_CASE("generator: always strongly connected, diameter bounded") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 17);
    const double p = (seed % 5) * 0.2;
    Digraph g = random_strongly_connected(n, p, seed);
    CHECK(is_strongly_connected(g));
    CHECK(diameter(g) <= n - 1);
    CHECK(diameter(g) >= 1);
  }
}

TEST_CASE("generator: deterministic per seed") {
  Digraph a = random_strongly_connected(20, 0.3, 42);
  Digraph b = random_strongly_connected(20, 0.3, 42);
  CHECK(a.edges() == b.edges());
  Digraph c = random_strongly_connected(20, 0.3, 43);
  CHECK(a.edges() != c.edges());
  CHECK(is_strongly_connected(a));
}

TEST_CASE("edge reversal preserves strong connectivity") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    Digraph g = random_strongly_connected(2 + static_cast<int>(seed % 9), 0.25, seed);
    Digraph r = reverse(g);
    CHECK(is_strongly_connected(r));
    CHECK(r.edge_count() == g.edge_count());
    CHECK(diameter(reverse(r)) == diameter(g));
  }
}

TEST_CASE("edge-list round-trip is exact") {
  Digraph g = random_strongly_connected(11, 0.35, 5);
  std::stringstream buffer;
  write_edge_list(buffer, g);
  Digraph back = read_edge_list(buffer);
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("edge-list parsing: comments, header, malformed input") {
  std::stringstream ok("# comment line\nn=3\n1 0\n2 1  # inline note\n0 2\n");
  Digraph g = read_edge_list(ok);
  CHECK(g.node_count() == 3);
  CHECK(is_strongly_connected(g));

  std::stringstream missing_header("1 0\n");
  CHECK_THROWS_AS(read_edge_list(missing_header), Error);

  std::stringstream bad_row("n=2\n1\n");
  CHECK_THROWS_AS(read_edge_list(bad_row), Error);

  std::stringstream out_of_range("n=2\n5 0\n");
  CHECK_THROWS_AS(read_edge_list(out_of_range), Error);
}
