#include "ptn/embedding.hpp"

#include <algorithm>
#include <set>

namespace ptn {

namespace {

class Embedder {
 public:
  Embedder(const TensorNetwork& g, const EmbeddingTree& t) : g_(g), t_(t) {
    for (const auto& [l, e] : g.edges())
      if (e.dangling()) host_[l] = e.u;
  }

  void run(const std::vector<int>& vs, int node, std::map<int, int>& phi) {
    if (vs.empty()) return;
    const auto& ch = t_.nodes[node].children;
    if (ch.size() == 1) {
      for (int v : vs) phi[v] = node;
      if (!ch[0].leaf) run({}, ch[0].index, phi);
      return;
    }
    const auto left = ch[0], right = ch[1];
    std::vector<Label> el = hosted(under(left), vs), er = hosted(under(right), vs);
    std::vector<int> sl, sr;
    if (left.leaf) {
      sr = vs;
    } else {
      split(vs, el, er, sl, sr);
      run(sl, left.index, phi);
    }
    std::vector<Label> el2 = left.leaf ? el : crossing(sl, sr);
    std::vector<int> mid, rest;
    if (right.leaf) {
      mid = sr;
    } else {
      // A vertex hosting leaves of both subtrees may have gone left.
      split(sr, el2, hosted(under(right), sr), mid, rest);
      run(rest, right.index, phi);
    }
    for (int v : mid) phi[v] = node;
  }

 private:
  std::vector<Label> under(EmbeddingTree::Child c) const {
    if (c.leaf) return {t_.leaves[c.index]};
    return t_.leaves_under(c.index);
  }

  std::vector<Label> hosted(const std::vector<Label>& es, const std::vector<int>& vs) const {
    std::set<int> in(vs.begin(), vs.end());
    std::vector<Label> out;
    for (Label l : es)
      if (in.count(host_.at(l))) out.push_back(l);
    return out;
  }

  std::vector<Label> crossing(const std::vector<int>& a, const std::vector<int>& b) const {
    std::set<Label> la;
    for (int v : a)
      for (Label l : g_.at(v).labels()) la.insert(l);
    std::vector<Label> out;
    for (int v : b)
      for (Label l : g_.at(v).labels())
        if (la.count(l)) out.push_back(l);
    return out;
  }

  // Terminal sets may be empty: nothing is pulled to that side.
  void split(const std::vector<int>& vs, const std::vector<Label>& e1, const std::vector<Label>& e2,
             std::vector<int>& s1, std::vector<int>& s2) const {
    if (e1.empty()) {
      s2 = vs;
      return;
    }
    if (e2.empty()) {
      s1 = vs;
      return;
    }
    Cut c = mincut(g_, vs, e1, e2);
    s1 = c.left;
    s2 = c.right;
  }

  const TensorNetwork& g_;
  const EmbeddingTree& t_;
  std::map<Label, int> host_;
};

bool on_path(const EmbeddingTree& t, int a, int b, int n) {
  // n strictly between a and b on the tree path.
  std::vector<int> pa, pb;
  for (int x = a; x >= 0; x = t.nodes[x].parent) pa.push_back(x);
  for (int x = b; x >= 0; x = t.nodes[x].parent) pb.push_back(x);
  while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
    pa.pop_back();
    pb.pop_back();
  }
  if (n == a || n == b) return false;
  return std::find(pa.begin(), pa.end(), n) != pa.end() || std::find(pb.begin(), pb.end(), n) != pb.end();
}

}  // namespace

Embedding tree_embedding(const TensorNetwork& g, const EmbeddingTree& t) {
  auto edges = g.edges();
  std::set<Label> open;
  for (const auto& [l, e] : edges)
    if (e.dangling()) open.insert(l);
  std::set<Label> leaves(t.leaves.begin(), t.leaves.end());
  if (open != leaves || leaves.size() != t.leaves.size())
    throw Error("tree_embedding: tree leaves do not match the network's dangling edges");

  Embedding out;
  out.g = g;
  if (g.num_vertices() > 0) Embedder(g, t).run(g.vertex_ids(), t.root, out.phi);

  // Dangling edges must sit on a vertex at their parent node.
  for (std::size_t i = 0; i < t.leaves.size(); ++i) {
    const Label l = t.leaves[i];
    const int p = t.leaf_parent[i];
    const int x = edges.at(l).u;
    if (out.phi.at(x) == p) continue;
    const Label inner = fresh_label();
    out.g.at(x) = out.g.at(x).relabeled({{l, inner}});
    int id = out.g.add(identity_tensor(inner, l, edges.at(l).size));
    out.phi[id] = p;
    ++out.identities;
  }

  // Empty nodes receive an identity on an edge routed through them.
  std::vector<int> count(t.nodes.size(), 0);
  for (const auto& [v, n] : out.phi) ++count[n];
  for (std::size_t n = 0; n < t.nodes.size(); ++n) {
    if (count[n]) continue;
    auto cur = out.g.edges();
    Label best = 0;
    Dim best_size = 0;
    for (const auto& [l, e] : cur) {
      if (e.dangling()) continue;
      if (!on_path(t, out.phi.at(e.u), out.phi.at(e.v), n)) continue;
      if (best_size == 0 || e.size < best_size) {
        best = l;
        best_size = e.size;
      }
    }
    int id;
    if (best_size) {
      const int x = cur.at(best).u;
      const Label inner = fresh_label();
      out.g.at(x) = out.g.at(x).relabeled({{best, inner}});
      id = out.g.add(identity_tensor(inner, best, best_size));
    } else {
      id = out.g.add(Tensor::scalar(1.0));
    }
    out.phi[id] = n;
    ++count[n];
    ++out.identities;
  }
  return out;
}

}  // namespace ptn
