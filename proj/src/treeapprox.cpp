#include "ptn/treeapprox.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>

namespace ptn {

std::vector<Label> shared_labels(const Tensor& a, const Tensor& b) {
  std::vector<Label> out;
  for (Label l : a.labels())
    if (b.has(l)) out.push_back(l);
  return out;
}

std::map<int, std::vector<int>> tree_neighbors(const TensorNetwork& g) {
  std::map<int, std::vector<int>> nb;
  for (int id : g.vertex_ids()) nb[id];
  std::set<std::pair<int, int>> seen;
  for (const auto& [l, e] : g.edges()) {
    if (e.dangling()) continue;
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) continue;
    nb[e.u].push_back(e.v);
    nb[e.v].push_back(e.u);
  }
  std::size_t links = seen.size();
  if (!nb.empty() && links + 1 != nb.size()) throw Error("network is not a tree");
  // Connectedness.
  if (!nb.empty()) {
    std::set<int> reach{nb.begin()->first};
    std::vector<int> stack{nb.begin()->first};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : nb[x])
        if (reach.insert(y).second) stack.push_back(y);
    }
    if (reach.size() != nb.size()) throw Error("network is not a tree");
  }
  return nb;
}

namespace {

std::map<int, int> parents_from(const std::map<int, std::vector<int>>& nb, int root, std::vector<int>* pre) {
  std::map<int, int> par{{root, -1}};
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (pre) pre->push_back(x);
    const auto& ns = nb.at(x);
    for (auto it = ns.rbegin(); it != ns.rend(); ++it)
      if (!par.count(*it)) {
        par[*it] = x;
        stack.push_back(*it);
      }
  }
  return par;
}

std::vector<int> postorder_from(const std::map<int, std::vector<int>>& nb, int root) {
  std::map<int, int> par{{root, -1}};
  std::vector<int> out;
  std::vector<std::pair<int, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [x, done] = stack.back();
    stack.pop_back();
    if (done) {
      out.push_back(x);
      continue;
    }
    stack.push_back({x, true});
    const auto& ns = nb.at(x);
    for (auto it = ns.rbegin(); it != ns.rend(); ++it)
      if (!par.count(*it)) {
        par[*it] = x;
        stack.push_back({*it, false});
      }
  }
  return out;
}

// Moves the non-orthogonal part of x into its neighbor y.
void push_gauge(TensorNetwork& g, int x, int y) {
  const Tensor& tx = g.at(x);
  std::vector<Label> bond = shared_labels(tx, g.at(y));
  std::vector<Label> rows;
  for (Label l : tx.labels())
    if (std::find(bond.begin(), bond.end(), l) == bond.end()) rows.push_back(l);
  Matricized m = matricize(tx, rows);
  QrResult f = qr(m.m);
  const Label q = fresh_label();
  const Dim k = f.q.cols();
  Tensor r = tensorize(f.r, {q}, {k}, m.col_labels, m.col_dims);
  g.at(x) = tensorize(f.q, m.row_labels, m.row_dims, {q}, {k});
  g.at(y) = contract(r, g.at(y));
}

std::vector<int> tree_path(const std::map<int, int>& par, int a, int b) {
  std::vector<int> pa, pb;
  for (int x = a; x >= 0; x = par.at(x)) pa.push_back(x);
  for (int x = b; x >= 0; x = par.at(x)) pb.push_back(x);
  while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
    pa.pop_back();
    pb.pop_back();
  }
  pb.pop_back();
  pa.insert(pa.end(), pb.rbegin(), pb.rend());
  return pa;
}

}  // namespace

std::map<int, int> tree_parents(const TreeTensorNetwork& t) {
  return parents_from(tree_neighbors(t.net), t.root, nullptr);
}

std::vector<int> tree_postorder(const TreeTensorNetwork& t) { return postorder_from(tree_neighbors(t.net), t.root); }

bool is_orthogonal(const Tensor& t, const std::vector<Label>& toward, double tol) {
  std::vector<Label> rows;
  for (Label l : t.labels())
    if (std::find(toward.begin(), toward.end(), l) == toward.end()) rows.push_back(l);
  Matricized m = matricize(t, rows);
  Matrix g = m.m.transpose() * m.m;
  return (g - Matrix::Identity(g.rows(), g.cols())).norm() <= tol * std::max<double>(1.0, std::sqrt(g.rows()));
}

CanonicalForm canonical_form(const TreeTensorNetwork& t, int u, int v) {
  auto nb = tree_neighbors(t.net);
  if (!nb.count(u) || std::find(nb[u].begin(), nb[u].end(), v) == nb[u].end())
    throw Error("canonical_form: vertices are not adjacent");
  CanonicalForm out;
  out.t = t;
  TensorNetwork& g = out.t.net;
  // Side of u: drop the edge to v and sweep toward u.
  auto side = nb;
  side[u].erase(std::find(side[u].begin(), side[u].end(), v));
  std::vector<int> order = postorder_from(side, u);
  auto par = parents_from(side, u, nullptr);
  for (int x : order)
    if (x != u) push_gauge(g, x, par.at(x));
  const Tensor& tu = g.at(u);
  std::vector<Label> bond = shared_labels(tu, g.at(v));
  std::vector<Label> rows;
  for (Label l : tu.labels())
    if (std::find(bond.begin(), bond.end(), l) == bond.end()) rows.push_back(l);
  Matricized m = matricize(tu, rows);
  QrResult f = qr(m.m);
  const Label q = fresh_label();
  const Dim k = f.q.cols();
  g.at(u) = tensorize(f.q, m.row_labels, m.row_dims, {q}, {k});
  out.r = f.r;
  out.core = g.add(tensorize(f.r, {q}, {k}, m.col_labels, m.col_dims));
  return out;
}

TreeTensorNetwork truncate_tree_canonical(const TreeTensorNetwork& t, Dim chi) {
  if (chi < 1) throw Error("chi must be positive");
  TreeTensorNetwork out = t;
  auto nb = tree_neighbors(t.net);
  auto par = parents_from(nb, t.root, nullptr);
  std::vector<int> post = postorder_from(nb, t.root);
  post.pop_back();
  if (post.empty()) return out;
  TensorNetwork& g = out.net;
  // Initial gauge: everything orthogonal toward the first vertex.
  int center = post[0];
  auto toward = parents_from(nb, center, nullptr);
  for (int x : postorder_from(nb, center))
    if (x != center) push_gauge(g, x, toward.at(x));
  for (int v : post) {
    std::vector<int> path = tree_path(par, center, v);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) push_gauge(g, path[i], path[i + 1]);
    const int u = par.at(v);
    const Tensor& tv = g.at(v);
    std::vector<Label> bond = shared_labels(tv, g.at(u));
    std::vector<Label> rows;
    for (Label l : tv.labels())
      if (std::find(bond.begin(), bond.end(), l) == bond.end()) rows.push_back(l);
    Matricized m = matricize(tv, rows);
    FactorResult f = truncated_factor(m.m, chi);
    const Label b = fresh_label();
    const Dim k = f.u.cols();
    Tensor s = tensorize(f.s, {b}, {k}, m.col_labels, m.col_dims);
    g.at(v) = tensorize(f.u, m.row_labels, m.row_dims, {b}, {k});
    g.at(u) = contract(s, g.at(u));
    center = u;
  }
  return out;
}

namespace {

bool is_bra(Label l) { return l >= kBraOffset; }

Matrix square(const Tensor& t, const std::vector<Label>& rows, const std::vector<Dim>&) {
  return paired_matrix(t, rows);
}

// Operands for contract_all: borrowed or owned, in insertion order.
struct Pieces {
  std::deque<Tensor> owned;
  std::vector<const Tensor*> ptrs;
  void ref(const Tensor& t) { ptrs.push_back(&t); }
  void add(Tensor t) {
    owned.push_back(std::move(t));
    ptrs.push_back(&owned.back());
  }
};

class DmState {
 public:
  DmState(const Embedding& e, const EmbeddingTree& t, DmStats* stats)
      : t_(t), stats_(stats), content_(t.nodes.size()), alive_(t.nodes.size(), true) {
    for (const auto& [id, node] : e.phi) content_[node].push_back(e.g.at(id));
    for (Label l : t.leaves) open_.insert(l);
  }

  std::vector<int> neighbors(int x) const {
    std::vector<int> out;
    if (t_.nodes[x].parent >= 0) out.push_back(t_.nodes[x].parent);
    for (const auto& c : t_.nodes[x].children)
      if (!c.leaf && alive_[c.index]) out.push_back(c.index);
    return out;
  }

  Tensor bra(const Tensor& a, bool all) const {
    std::map<Label, Label> m;
    for (Label l : a.labels())
      if (all || !open_.count(l)) m[l] = bra_label(l);
    return a.relabeled(m);
  }

  // Region on x's side of the tree edge (x, y), squared, with crossing edges open.
  const Tensor& region(int x, int y) {
    auto key = std::make_pair(x, y);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      if (stats_) ++stats_->cache_hits;
      return it->second;
    }
    Pieces ts;
    for (const Tensor& a : content_[x]) {
      ts.ref(a);
      ts.add(bra(a, false));
    }
    for (int w : neighbors(x))
      if (w != y) ts.ref(region(w, x));
    Tensor r = contract_all(ts.ptrs);
    if (stats_) ++stats_->computed[key];
    return cache_.emplace(key, std::move(r)).first->second;
  }

  // Pieces of region(p, v) left uncontracted, so the density matrix can be
  // contracted in one go with a better order.
  Pieces environment(int p, int v) {
    Pieces ts;
    for (const Tensor& a : content_[p]) {
      ts.ref(a);
      ts.add(bra(a, false));
    }
    for (int w : neighbors(p))
      if (w != v) ts.ref(region(w, p));
    return ts;
  }

  // Density matrix of v over its open (dangling) labels.
  Tensor open_matrix(int v, std::vector<Label>& rows, std::vector<Dim>& dims) {
    rows.clear();
    dims.clear();
    Pieces ts;
    for (const Tensor& a : content_[v]) {
      for (int i = 0; i < a.order(); ++i)
        if (open_.count(a.labels()[i])) {
          rows.push_back(a.labels()[i]);
          dims.push_back(a.dims()[i]);
        }
      ts.ref(a);
      ts.add(bra(a, true));
    }
    for (int w : neighbors(v)) ts.ref(region(w, v));
    return contract_all(ts.ptrs);
  }

  // Replaces node v by its projection onto the leading subspace.
  Tensor absorb(int v, Dim chi) {
    const int p = t_.nodes[v].parent;
    Tensor m = contract_all(content_[v]);
    std::vector<Label> a, b;
    std::vector<Dim> da, db;
    for (int i = 0; i < m.order(); ++i) {
      Label l = m.labels()[i];
      (open_.count(l) ? a : b).push_back(l);
      (open_.count(l) ? da : db).push_back(m.dims()[i]);
    }
    Matrix u;
    if (edge_weight_sum(da) <= edge_weight_sum(db)) {
      if (stats_) ++stats_->dm_branch;
      Pieces ts = environment(p, v);
      for (const Tensor& x : content_[v]) {
        ts.ref(x);
        ts.add(bra(x, true));
      }
      Tensor lv = contract_all(ts.ptrs);
      u = truncated_eig(square(lv, a, da), chi).u;
    } else {
      if (stats_) ++stats_->qr_branch;
      Matricized mm = matricize(m, a);
      QrResult f = qr(mm.m);
      const Label q = fresh_label();
      const Dim k = f.q.cols();
      Tensor r = tensorize(f.r, {q}, {k}, mm.col_labels, mm.col_dims);
      Pieces ts = environment(p, v);
      ts.ref(r);
      ts.add(bra(r, true));
      Tensor rl = contract_all(ts.ptrs);
      Matrix small = truncated_eig(square(rl, {q}, {k}), chi).u;
      u = f.q * small;
      charge_flops(static_cast<std::uint64_t>(f.q.rows()) * f.q.cols() * small.cols());
    }
    const Label bond = fresh_label();
    Tensor ut = tensorize(u, a, da, {bond}, {static_cast<Dim>(u.cols())});
    content_[p].push_back(contract(ut, m));
    for (Label l : a) open_.erase(l);
    open_.insert(bond);
    alive_[v] = false;
    content_[v].clear();
    for (auto it = cache_.begin(); it != cache_.end();) {
      if (contains(it->first, v) || contains(it->first, p))
        it = cache_.erase(it);
      else
        ++it;
    }
    return ut;
  }

  Tensor root_tensor(int r) { return contract_all(content_[r]); }

 private:
  bool in_subtree(int q, int x) const {
    for (int y = q; y >= 0; y = t_.nodes[y].parent)
      if (y == x) return true;
    return false;
  }

  bool contains(std::pair<int, int> key, int q) const {
    auto [x, y] = key;
    if (t_.nodes[x].parent == y) return in_subtree(q, x);
    return !in_subtree(q, y);
  }

  const EmbeddingTree& t_;
  DmStats* stats_;
  std::vector<std::vector<Tensor>> content_;
  std::vector<bool> alive_;
  std::set<Label> open_;
  std::map<std::pair<int, int>, Tensor> cache_;
};

}  // namespace

DensityMatrix density_matrix(const Embedding& e, const EmbeddingTree& t, int v, int z) {
  DmState st(e, t, nullptr);
  DensityMatrix out;
  if (z < 0) {
    Tensor full = st.open_matrix(v, out.labels, out.dims);
    out.m = square(full, out.labels, out.dims);
    return out;
  }
  const Tensor& r = st.region(v, z);
  for (int i = 0; i < r.order(); ++i)
    if (!is_bra(r.labels()[i])) {
      out.labels.push_back(r.labels()[i]);
      out.dims.push_back(r.dims()[i]);
    }
  out.m = square(r, out.labels, out.dims);
  return out;
}

TreeTensorNetwork density_matrix_alg(const TensorNetwork& g, const EmbeddingTree& t, Dim chi, DmStats* stats) {
  if (chi < 1) throw Error("chi must be positive");
  auto t0 = std::chrono::steady_clock::now();
  Embedding e = tree_embedding(g, t);
  if (stats) {
    stats->identities += e.identities;
    stats->embed_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  DmState st(e, t, stats);
  TreeTensorNetwork out;
  for (int v : t.postorder()) {
    if (v == t.root) continue;
    out.net.put(v, st.absorb(v, chi));
  }
  out.net.put(t.root, st.root_tensor(t.root));
  out.root = t.root;
  return out;
}

}  // namespace ptn
