#include "ptn/embedding.hpp"
#include "ptn/network.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace ptn;
using testutil::open_label;

namespace {

// Exhaustive minimum over vertex bipartitions with E1 holders on one side and
// E2 holders on the other.
double brute_mincut(const TensorNetwork& g, const std::vector<Label>& e1, const std::vector<Label>& e2) {
  std::vector<int> ids = g.vertex_ids();
  const int n = ids.size();
  auto edges = g.edges();
  std::set<int> must_in, must_out;
  for (Label l : e1) must_in.insert(edges.at(l).u);
  for (Label l : e2) must_out.insert(edges.at(l).u);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      bool in = mask >> i & 1u;
      if (in && must_out.count(ids[i])) ok = false;
      if (!in && must_in.count(ids[i])) ok = false;
    }
    if (!ok) continue;
    double w = 0;
    for (const auto& [l, e] : edges)
      if (!e.dangling()) {
        int iu = std::find(ids.begin(), ids.end(), e.u) - ids.begin();
        int iv = std::find(ids.begin(), ids.end(), e.v) - ids.begin();
        if ((mask >> iu & 1u) != (mask >> iv & 1u)) w += std::log(double(e.size));
      }
    best = std::min(best, w);
  }
  return best;
}

double cut_weight(const TensorNetwork& g, const std::vector<int>& left) {
  double w = 0;
  for (const auto& [l, e] : g.edges())
    if (!e.dangling()) {
      bool a = std::count(left.begin(), left.end(), e.u) > 0, b = std::count(left.begin(), left.end(), e.v) > 0;
      if (a != b) w += std::log(double(e.size));
    }
  return w;
}

// Largest prefix cut along an ordering.
double cutwidth(const TensorNetwork& g, const std::vector<int>& order) {
  double worst = 0;
  for (std::size_t k = 1; k < order.size(); ++k)
    worst = std::max(worst, cut_weight(g, std::vector<int>(order.begin(), order.begin() + k)));
  return worst;
}

TensorNetwork path(int n, Dim d, bool ends_open) {
  testutil::Spec s;
  s.n = n;
  for (int i = 0; i + 1 < n; ++i) s.edges.emplace_back(i, i + 1, d);
  if (ends_open) {
    s.open.emplace_back(0, 2);
    s.open.emplace_back(n - 1, 2);
  }
  std::mt19937_64 rng(0);
  return testutil::build(s, rng);
}

}  // namespace

TEST(Network, EdgesAndDangling) {
  TensorNetwork g = path(3, 2, true);
  auto e = g.edges();
  EXPECT_EQ(e.size(), 4u);
  EXPECT_FALSE(e.at(1).dangling());
  EXPECT_TRUE(e.at(open_label(0)).dangling());
  EXPECT_EQ(g.dangling(), (std::vector<Label>{open_label(0), open_label(1)}));
}

TEST(Network, RejectsMismatchedSizes) {
  TensorNetwork g;
  g.put(0, Tensor({1}, {2}));
  g.put(1, Tensor({1}, {3}));
  EXPECT_THROW(g.validate(), Error);
}

TEST(Network, RejectsLabelOnThreeTensors) {
  TensorNetwork g;
  for (int i = 0; i < 3; ++i) g.put(i, Tensor({1}, {2}));
  EXPECT_THROW(g.validate(), Error);
}

TEST(Network, ContractMatchesPairwise) {
  std::mt19937_64 rng(1);
  testutil::Spec s = testutil::random_spec(5, 3, 2, 3, rng);
  TensorNetwork g = testutil::build(s, rng);
  Tensor all = g.contract();
  Tensor seq = g.at(0);
  for (int v = 1; v < 5; ++v) seq = contract(seq, g.at(v));
  EXPECT_LE(testutil::rel_diff(all, seq), 1e-10);
}

TEST(EdgeWeight, Examples) {
  EXPECT_DOUBLE_EQ(edge_weight_sum(std::vector<Dim>{2, 2}), std::log(4.0));
  EXPECT_DOUBLE_EQ(edge_weight_sum(std::vector<Dim>{}), 0.0);
  EXPECT_NEAR(edge_weight_sum(std::vector<Dim>{3, 5}), std::log(15.0), 1e-15);
  EXPECT_NEAR(std::exp(edge_weight_sum(std::vector<Dim>{3, 5, 7})), 105.0, 1e-12);
}

TEST(Mincut, PathSeparatesOnOneEdge) {
  TensorNetwork g = path(3, 2, true);
  Cut c = mincut(g, {open_label(0)}, {open_label(1)});
  EXPECT_NEAR(c.value, std::log(2.0), 1e-12);
  EXPECT_TRUE(std::count(c.left.begin(), c.left.end(), 0));
  EXPECT_TRUE(std::count(c.right.begin(), c.right.end(), 2));
}

TEST(Mincut, SingleVertexBothSides) {
  TensorNetwork g;
  g.put(0, Tensor({1, 2}, {2, 2}));
  Cut c = mincut(g, {1}, {2});
  EXPECT_EQ(c.value, 0.0);
  EXPECT_EQ(c.left.size() + c.right.size(), 1u);
}

TEST(Mincut, GridLeftAgainstRight) {
  // 2x2 grid: 0 1 / 2 3, left column holds E1, right column E2.
  testutil::Spec s;
  s.n = 4;
  s.edges = {{0, 1, 2}, {2, 3, 2}, {0, 2, 2}, {1, 3, 2}};
  s.open = {{0, 2}, {2, 2}, {1, 2}, {3, 2}};
  std::mt19937_64 rng(2);
  TensorNetwork g = testutil::build(s, rng);
  std::vector<Label> e1 = {open_label(0), open_label(1)}, e2 = {open_label(2), open_label(3)};
  Cut c = mincut(g, e1, e2);
  EXPECT_NEAR(c.value, std::log(4.0), 1e-12);
  EXPECT_NEAR(c.value, brute_mincut(g, e1, e2), 1e-12);
}

TEST(Mincut, OverlapThrows) {
  TensorNetwork g = path(3, 2, true);
  EXPECT_THROW(mincut(g, {open_label(0)}, {open_label(0)}), Error);
}

TEST(Mincut, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 11;
    testutil::Spec s = testutil::random_spec(n, n, 0, 4, rng);
    // Dangling edges on two disjoint vertex groups.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k1 = 1 + rng() % std::max(1, n / 2), k2 = 1 + rng() % std::max(1, n - k1);
    for (int i = 0; i < k1; ++i) s.open.emplace_back(perm[i], 2);
    for (int i = 0; i < k2; ++i) s.open.emplace_back(perm[k1 + i], 2);
    TensorNetwork g = testutil::build(s, rng);
    std::vector<Label> e1, e2;
    for (int i = 0; i < k1; ++i) e1.push_back(open_label(i));
    for (int i = 0; i < k2; ++i) e2.push_back(open_label(k1 + i));
    Cut c = mincut(g, e1, e2);
    ASSERT_NEAR(c.value, brute_mincut(g, e1, e2), 1e-9) << "trial " << trial;
    EXPECT_NEAR(c.value, cut_weight(g, c.left), 1e-9);
    EXPECT_EQ(c.left.size() + c.right.size(), static_cast<std::size_t>(n));
  }
}

TEST(LinearOrdering, PathAttainsMinimumCutwidth) {
  TensorNetwork g = path(4, 2, false);
  std::vector<int> ord = linear_ordering(g, g.vertex_ids());
  std::vector<int> p = {0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do best = std::min(best, cutwidth(g, p));
  while (std::next_permutation(p.begin(), p.end()));
  EXPECT_NEAR(cutwidth(g, ord), best, 1e-12);
  EXPECT_TRUE(ord == (std::vector<int>{0, 1, 2, 3}) || ord == (std::vector<int>{3, 2, 1, 0}));
}

TEST(LinearOrdering, SingleItem) {
  TensorNetwork g;
  g.put(7, Tensor({1}, {2}));
  EXPECT_EQ(linear_ordering(g, {7}), (std::vector<int>{7}));
}

TEST(LinearOrdering, DisconnectedPairsStayTogether) {
  testutil::Spec s;
  s.n = 4;
  s.edges = {{0, 2, 3}, {1, 3, 3}};
  std::mt19937_64 rng(4);
  TensorNetwork g = testutil::build(s, rng);
  std::vector<int> ord = linear_ordering(g, g.vertex_ids());
  auto pos = [&](int v) { return std::find(ord.begin(), ord.end(), v) - ord.begin(); };
  EXPECT_EQ(std::abs(pos(0) - pos(2)), 1);
  EXPECT_EQ(std::abs(pos(1) - pos(3)), 1);
}

TEST(LinearOrdering, IsPermutationAndDeterministic) {
  std::mt19937_64 rng(5);
  for (int n : {5, 12, 20, 30}) {
    testutil::Spec s = testutil::random_spec(n, n, 0, 3, rng);
    TensorNetwork g = testutil::build(s, rng);
    std::vector<int> a = linear_ordering(g, g.vertex_ids(), 11);
    std::vector<int> b = linear_ordering(g, g.vertex_ids(), 11);
    EXPECT_EQ(a, b);
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, g.vertex_ids());
  }
}

TEST(LinearOrdering, FollowsOrderPreservingRelabeling) {
  std::mt19937_64 rng(6);
  testutil::Spec s = testutil::random_spec(10, 8, 0, 3, rng);
  TensorNetwork g = testutil::build(s, rng);
  TensorNetwork h;
  for (const auto& [id, t] : g.tensors()) h.put(3 * id + 5, t);
  std::vector<int> a = linear_ordering(g, g.vertex_ids(), 2);
  std::vector<int> b = linear_ordering(h, h.vertex_ids(), 2);
  for (int& v : a) v = 3 * v + 5;
  EXPECT_EQ(a, b);
}

TEST(OrderEdgeSets, FollowsVertexOrderOnPath) {
  TensorNetwork g = path(4, 2, true);
  // Set {open at vertex 3} vs {open at vertex 0}: the two must end up at opposite ends.
  std::vector<int> ord = order_edge_sets(g, g.vertex_ids(), {{open_label(1)}, {2}, {open_label(0)}});
  ASSERT_EQ(ord.size(), 3u);
  EXPECT_EQ(ord[1], 1);
}

TEST(TreeEmbedding, SingleTensorMapsToRoot) {
  TensorNetwork g;
  g.put(0, Tensor({1, 2}, {2, 3}));
  EmbeddingTree t = mps_tree({1, 2});
  Embedding e = tree_embedding(g, t);
  EXPECT_EQ(e.identities, 0);
  EXPECT_EQ(e.phi.at(0), t.root);
}

TEST(TreeEmbedding, MpsMapsSiteToLeafParent) {
  testutil::Spec s;
  s.n = 4;
  for (int i = 0; i < 3; ++i) s.edges.emplace_back(i, i + 1, 2);
  for (int i = 0; i < 4; ++i) s.open.emplace_back(i, 2);
  std::mt19937_64 rng(7);
  TensorNetwork g = testutil::build(s, rng);
  EmbeddingTree t = mps_tree({open_label(0), open_label(1), open_label(2), open_label(3)});
  Embedding e = tree_embedding(g, t);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(e.phi.at(i), t.leaf_parent[i]) << "site " << i;
  // Every tree node is occupied.
  std::set<int> used;
  for (auto [v, node] : e.phi) used.insert(node);
  EXPECT_EQ(used.size(), t.nodes.size());
}

TEST(TreeEmbedding, PepsEveryNodeNonempty) {
  testutil::Spec s;
  s.n = 4;
  s.edges = {{0, 1, 2}, {2, 3, 2}, {0, 2, 2}, {1, 3, 2}};
  s.open = {{0, 2}, {1, 2}, {2, 2}, {3, 2}};
  std::mt19937_64 rng(8);
  TensorNetwork g = testutil::build(s, rng);
  EmbeddingTree t = mps_tree({open_label(0), open_label(1), open_label(2), open_label(3)});
  Embedding e = tree_embedding(g, t);
  std::set<int> used;
  for (auto [v, node] : e.phi) used.insert(node);
  EXPECT_EQ(used.size(), t.nodes.size());
  EXPECT_LE(testutil::rel_diff(g.contract(), e.g.contract()), 1e-10);
}

TEST(TreeEmbedding, VertexHostingLeavesOfBothSubtrees) {
  // Vertex 0 holds one leaf of each comb branch.
  testutil::Spec s;
  s.n = 3;
  s.edges = {{0, 1, 2}, {0, 2, 2}};
  s.open = {{0, 2}, {0, 2}, {1, 2}, {2, 2}};
  std::mt19937_64 rng(10);
  TensorNetwork g = testutil::build(s, rng);
  EmbeddingTree t =
      build_embedding_tree({{open_label(3), open_label(1)}, {open_label(0), open_label(2)}}, Ansatz::Comb);
  Embedding e = tree_embedding(g, t);
  auto edges = e.g.edges();
  for (std::size_t i = 0; i < t.leaves.size(); ++i) EXPECT_EQ(e.phi.at(edges.at(t.leaves[i]).u), t.leaf_parent[i]);
  EXPECT_LE(testutil::rel_diff(g.contract(), e.g.contract()), 1e-10);
}

TEST(TreeEmbedding, RejectsLeafMismatch) {
  TensorNetwork g = path(3, 2, true);
  EXPECT_THROW(tree_embedding(g, mps_tree({open_label(0), 77})), Error);
}

TEST(TreeEmbedding, CoversAndPreservesContraction) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 8;
    testutil::Spec s = testutil::random_spec(n, trial % 3, 2 + trial % 4, 3, rng);
    TensorNetwork g = testutil::build(s, rng);
    std::vector<Label> open = g.dangling();
    std::shuffle(open.begin(), open.end(), rng);
    EmbeddingTree t = trial % 2 ? mps_tree(open)
                                : build_embedding_tree({std::vector<Label>(open.begin(), open.begin() + 1),
                                                        std::vector<Label>(open.begin() + 1, open.end())},
                                                       Ansatz::Comb);
    Embedding e = tree_embedding(g, t);
    // Every vertex of the extended network is placed exactly once.
    ASSERT_EQ(e.phi.size(), e.g.num_vertices());
    for (int v : g.vertex_ids()) EXPECT_TRUE(e.phi.count(v));
    std::set<int> used;
    for (auto [v, node] : e.phi) {
      EXPECT_GE(node, 0);
      EXPECT_LT(node, static_cast<int>(t.nodes.size()));
      used.insert(node);
    }
    EXPECT_EQ(used.size(), t.nodes.size()) << "trial " << trial;
    // Each dangling edge sits at its leaf's parent.
    auto edges = e.g.edges();
    for (std::size_t i = 0; i < t.leaves.size(); ++i) EXPECT_EQ(e.phi.at(edges.at(t.leaves[i]).u), t.leaf_parent[i]);
    // Contracting per tree node then across nodes reproduces the network.
    std::map<int, std::vector<Tensor>> groups;
    for (auto [v, node] : e.phi) groups[node].push_back(e.g.at(v));
    std::vector<Tensor> parts;
    for (auto& [node, ts] : groups) parts.push_back(contract_all(ts));
    EXPECT_LE(testutil::rel_diff(g.contract(), contract_all(parts)), 1e-10) << "trial " << trial;
  }
}
