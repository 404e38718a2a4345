#include "ptn/ordering.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

namespace ptn {

// ---- embedding trees ----

std::vector<int> EmbeddingTree::postorder() const {
  std::vector<int> out;
  if (root < 0) return out;
  std::vector<std::pair<int, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [n, done] = stack.back();
    stack.pop_back();
    if (done) {
      out.push_back(n);
      continue;
    }
    stack.push_back({n, true});
    const auto& ch = nodes[n].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
      if (!it->leaf) stack.push_back({it->index, false});
  }
  return out;
}

std::vector<Label> EmbeddingTree::leaves_under(int node) const {
  std::vector<Label> out;
  std::vector<int> stack{node};
  std::vector<Label> tmp;
  // Left-to-right via recursion on an explicit stack of children.
  std::vector<Child> work;
  for (auto it = nodes[node].children.rbegin(); it != nodes[node].children.rend(); ++it) work.push_back(*it);
  while (!work.empty()) {
    Child c = work.back();
    work.pop_back();
    if (c.leaf) {
      out.push_back(leaves[c.index]);
      continue;
    }
    const auto& ch = nodes[c.index].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) work.push_back(*it);
  }
  return out;
}

std::vector<Label> EmbeddingTree::leaf_order() const { return root < 0 ? std::vector<Label>{} : leaves_under(root); }

std::vector<int> EmbeddingTree::subtree(int node) const {
  std::vector<int> out{node};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const Child& c : nodes[out[i]].children)
      if (!c.leaf) out.push_back(c.index);
  return out;
}

bool EmbeddingTree::is_full_binary() const {
  for (const Node& n : nodes)
    if (n.children.size() != 2) return false;
  return true;
}

namespace {

EmbeddingTree::Child chain(EmbeddingTree& t, const std::vector<EmbeddingTree::Child>& items) {
  EmbeddingTree::Child cur = items[0];
  for (std::size_t i = 1; i < items.size(); ++i) {
    int id = t.nodes.size();
    t.nodes.push_back({{cur, items[i]}, -1});
    cur = {false, id};
  }
  return cur;
}

void finish(EmbeddingTree& t, EmbeddingTree::Child top) {
  if (top.leaf) {
    t.nodes.push_back({{top}, -1});
    top = {false, static_cast<int>(t.nodes.size()) - 1};
  }
  t.root = top.index;
  t.leaf_parent.assign(t.leaves.size(), -1);
  for (std::size_t n = 0; n < t.nodes.size(); ++n)
    for (const auto& c : t.nodes[n].children) {
      if (c.leaf)
        t.leaf_parent[c.index] = n;
      else
        t.nodes[c.index].parent = n;
    }
}

}  // namespace

EmbeddingTree mps_tree(const std::vector<Label>& order) { return build_embedding_tree({order}, Ansatz::Mps); }

EmbeddingTree build_embedding_tree(const std::vector<std::vector<Label>>& ordered_sets, Ansatz ansatz) {
  EmbeddingTree t;
  std::vector<EmbeddingTree::Child> all;
  std::vector<EmbeddingTree::Child> roots;
  for (const auto& set : ordered_sets) {
    std::vector<EmbeddingTree::Child> items;
    for (Label l : set) {
      items.push_back({true, static_cast<int>(t.leaves.size())});
      t.leaves.push_back(l);
    }
    if (items.empty()) continue;
    all.insert(all.end(), items.begin(), items.end());
    if (ansatz == Ansatz::Comb) roots.push_back(chain(t, items));
  }
  if (all.empty()) throw Error("embedding tree needs at least one edge");
  EmbeddingTree::Child top = ansatz == Ansatz::Mps ? chain(t, all) : chain(t, roots);
  finish(t, top);
  return t;
}

// ---- Kendall-Tau ----

std::int64_t kendall_tau(const std::vector<int>& sigma, const std::vector<int>& tau) {
  if (sigma.size() != tau.size()) throw Error("kendall_tau: orderings over different sets");
  std::map<int, int> pos;
  for (std::size_t i = 0; i < tau.size(); ++i) pos[tau[i]] = i;
  if (pos.size() != tau.size()) throw Error("kendall_tau: repeated element");
  std::vector<int> p;
  for (int x : sigma) {
    auto it = pos.find(x);
    if (it == pos.end()) throw Error("kendall_tau: orderings over different sets");
    p.push_back(it->second);
  }
  std::set<int> seen(p.begin(), p.end());
  if (seen.size() != p.size()) throw Error("kendall_tau: repeated element");
  std::int64_t d = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++d;
  return d;
}

// ---- constraint tree ----

std::vector<int> ConstraintTree::leaves_of(int node) const {
  std::vector<int> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (nodes[n].leaf >= 0) {
      out.push_back(nodes[n].leaf);
      continue;
    }
    for (auto it = nodes[n].children.rbegin(); it != nodes[n].children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

bool ConstraintTree::admits(const std::vector<int>& ordering) const {
  if (static_cast<int>(ordering.size()) != num_leaves) return false;
  std::vector<int> pos(num_leaves, -1);
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    int x = ordering[i];
    if (x < 0 || x >= num_leaves || pos[x] >= 0) return false;
    pos[x] = i;
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].leaf >= 0) continue;
    std::vector<std::pair<int, int>> span;  // per child: [min, max]
    int lo = num_leaves, hi = -1, count = 0;
    for (int c : nodes[n].children) {
      int a = num_leaves, b = -1;
      for (int l : leaves_of(c)) {
        a = std::min(a, pos[l]);
        b = std::max(b, pos[l]);
        ++count;
      }
      span.push_back({a, b});
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
    if (hi - lo + 1 != count) return false;
    if (nodes[n].ordered) {
      bool fwd = true, bwd = true;
      for (std::size_t i = 1; i < span.size(); ++i) {
        fwd = fwd && span[i - 1].second < span[i].first;
        bwd = bwd && span[i].second < span[i - 1].first;
      }
      if (!fwd && !bwd) return false;
    }
  }
  return true;
}

namespace {

class ConstraintBuilder {
 public:
  explicit ConstraintBuilder(int n) : n_(n) {
    for (int i = 0; i < n; ++i) {
      nodes_.push_back({{}, false, i});
      parent_.push_back(-1);
      roots_.insert(i);
    }
  }

  void connect(const std::set<int>& target) {
    if (target.size() < 2) return;
    std::map<int, std::vector<int>> by_root;  // component root -> covered leaves
    for (int l : target) by_root[root_of(l)].push_back(l);
    if (by_root.size() == 1) return;  // already connected
    std::vector<int> full, partial;
    for (const auto& [r, cov] : by_root) (static_cast<int>(cov.size()) == leaf_count(r) ? full : partial).push_back(r);
    sort_by_min_leaf(full);
    sort_by_min_leaf(partial);
    if (partial.empty()) {
      make_node(full, false);
      return;
    }
    if (partial.size() <= 2 &&
        std::all_of(partial.begin(), partial.end(), [&](int r) { return splittable(r, target); })) {
      std::vector<std::vector<int>> parts;
      for (int r : partial) {
        std::vector<int> seq;
        split_component(r, target, seq);
        parts.push_back(seq);
      }
      {
        std::vector<int> kids = parts[0];
        if (!full.empty()) kids.push_back(group(full));
        if (parts.size() == 2) kids.insert(kids.end(), parts[1].rbegin(), parts[1].rend());
        for (int r : partial) retire(r);
        make_node(kids, true);
        return;
      }
    }
    std::vector<int> all = full;
    all.insert(all.end(), partial.begin(), partial.end());
    sort_by_min_leaf(all);
    make_node(all, false);
  }

  ConstraintTree finish() {
    std::vector<int> rs(roots_.begin(), roots_.end());
    sort_by_min_leaf(rs);
    int top = rs.size() == 1 ? rs[0] : make_node(rs, false);
    ConstraintTree ct;
    ct.num_leaves = n_;
    std::map<int, int> remap;
    std::vector<int> order{top};
    for (std::size_t i = 0; i < order.size(); ++i) {
      remap[order[i]] = i;
      for (int c : nodes_[order[i]].children) order.push_back(c);
    }
    for (int old : order) {
      ConstraintTree::Node nd = nodes_[old];
      for (int& c : nd.children) c = remap.at(c);
      ct.nodes.push_back(nd);
    }
    ct.root = 0;
    return ct;
  }

 private:
  int root_of(int x) const {
    while (parent_[x] >= 0) x = parent_[x];
    return x;
  }

  int leaf_count(int x) const {
    if (nodes_[x].leaf >= 0) return 1;
    int c = 0;
    for (int k : nodes_[x].children) c += leaf_count(k);
    return c;
  }

  int min_leaf(int x) const {
    if (nodes_[x].leaf >= 0) return nodes_[x].leaf;
    int m = n_;
    for (int k : nodes_[x].children) m = std::min(m, min_leaf(k));
    return m;
  }

  void sort_by_min_leaf(std::vector<int>& v) const {
    std::sort(v.begin(), v.end(), [&](int a, int b) { return min_leaf(a) < min_leaf(b); });
  }

  // 0: untouched, 1: fully covered, 2: mixed
  int coverage(int x, const std::set<int>& target) const {
    if (nodes_[x].leaf >= 0) return target.count(nodes_[x].leaf) ? 1 : 0;
    bool any = false, all = true;
    for (int k : nodes_[x].children) {
      int c = coverage(k, target);
      if (c == 2) return 2;
      any = any || c == 1;
      all = all && c == 1;
    }
    return all ? 1 : (any ? 2 : 0);
  }

  int make_node(const std::vector<int>& kids, bool ordered) {
    int id = nodes_.size();
    nodes_.push_back({kids, ordered, -1});
    parent_.push_back(-1);
    for (int k : kids) {
      parent_[k] = id;
      roots_.erase(k);
    }
    roots_.insert(id);
    return id;
  }

  int group(const std::vector<int>& kids) { return kids.size() == 1 ? kids[0] : make_node(kids, false); }

  void retire(int r) { roots_.erase(r); }

  // Whether split_component can succeed; checked before anything is rearranged.
  bool splittable(int r, const std::set<int>& target) const {
    std::vector<int> cov;
    for (int k : nodes_[r].children) {
      int c = coverage(k, target);
      if (c == 2) return false;
      cov.push_back(c);
    }
    if (!nodes_[r].ordered) return true;
    auto is_suffix = [](auto b, auto e) {
      while (b != e && *b == 0) ++b;
      return std::all_of(b, e, [](int c) { return c == 1; });
    };
    return is_suffix(cov.begin(), cov.end()) || is_suffix(cov.rbegin(), cov.rend());
  }

  // Rearranges a partially covered component so its covered leaves form a
  // suffix. Emits the pieces to splice into an ordered parent.
  bool split_component(int r, const std::set<int>& target, std::vector<int>& seq) {
    const auto kids = nodes_[r].children;
    std::vector<int> cov;
    for (int k : kids) {
      int c = coverage(k, target);
      if (c == 2) return false;
      cov.push_back(c);
    }
    if (nodes_[r].ordered) {
      auto is_suffix = [](const std::vector<int>& c) {
        std::size_t i = 0;
        while (i < c.size() && c[i] == 0) ++i;
        for (; i < c.size(); ++i)
          if (c[i] != 1) return false;
        return true;
      };
      std::vector<int> rev(cov.rbegin(), cov.rend());
      if (is_suffix(cov)) {
        seq = kids;
      } else if (is_suffix(rev)) {
        seq.assign(kids.rbegin(), kids.rend());
      } else {
        return false;
      }
      return true;
    }
    std::vector<int> rest, covered;
    for (std::size_t i = 0; i < kids.size(); ++i) (cov[i] ? covered : rest).push_back(kids[i]);
    for (int k : kids) parent_[k] = -1;
    seq = {group(rest), group(covered)};
    for (int k : seq) roots_.erase(k);
    return true;
  }

  int n_;
  std::vector<ConstraintTree::Node> nodes_;
  std::vector<int> parent_;
  std::set<int> roots_;
};

}  // namespace

ConstraintTree build_constraint_tree(int num_sets, const std::vector<ConstraintStep>& steps) {
  if (num_sets < 1) throw Error("constraint tree needs at least one edge set");
  ConstraintBuilder b(num_sets);
  std::vector<std::set<int>> hat(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (int x : steps[i].direct) {
      if (x < 0 || x >= num_sets) throw Error("constraint step references unknown edge set");
      hat[i].insert(x);
    }
    for (int j : steps[i].prior) {
      if (j < 0 || j >= static_cast<int>(i)) throw Error("constraint step references a later step");
      hat[i].insert(hat[j].begin(), hat[j].end());
    }
    b.connect(hat[i]);
  }
  return b.finish();
}

// ---- constrained ordering ----

namespace {

std::vector<int> best_order(const ConstraintTree& ct, int node, const std::vector<int>& pos) {
  const auto& nd = ct.nodes[node];
  if (nd.leaf >= 0) return {nd.leaf};
  std::vector<std::vector<int>> f;
  for (int c : nd.children) f.push_back(best_order(ct, c, pos));
  const int k = f.size();
  // Cross-block inversions: inv[i][j] counts pairs ordered against tau when block i precedes j.
  std::vector<std::vector<std::int64_t>> inv(k, std::vector<std::int64_t>(k, 0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j)
        for (int x : f[i])
          for (int y : f[j])
            if (pos[x] > pos[y]) ++inv[i][j];
  auto cost = [&](const std::vector<int>& perm) {
    std::int64_t s = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) s += inv[perm[a]][perm[b]];
    return s;
  };
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  if (nd.ordered) {
    std::vector<int> rev(perm.rbegin(), perm.rend());
    if (cost(rev) < cost(perm)) best = rev;
  } else if (k <= kMaxEnumeratedChildren) {
    std::int64_t bc = cost(perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
      std::int64_t c = cost(perm);
      if (c < bc) {
        bc = c;
        best = perm;
      }
    }
  } else {
    std::cerr << "warning: unordered constraint node with " << k << " children, using greedy insertion\n";
    std::vector<int> by_pos(k);
    std::iota(by_pos.begin(), by_pos.end(), 0);
    auto first = [&](int i) { return *std::min_element(f[i].begin(), f[i].end(), [&](int a, int b) { return pos[a] < pos[b]; }); };
    std::stable_sort(by_pos.begin(), by_pos.end(), [&](int a, int b) { return pos[first(a)] < pos[first(b)]; });
    best.clear();
    for (int c : by_pos) {
      std::vector<int> top;
      std::int64_t tc = -1;
      for (std::size_t at = 0; at <= best.size(); ++at) {
        std::vector<int> cand = best;
        cand.insert(cand.begin() + at, c);
        std::int64_t cc = cost(cand);
        if (tc < 0 || cc < tc) {
          tc = cc;
          top = cand;
        }
      }
      best = top;
    }
  }
  std::vector<int> out;
  for (int i : best) out.insert(out.end(), f[i].begin(), f[i].end());
  return out;
}

}  // namespace

std::vector<int> ordering_under_constraint(const ConstraintTree& ct, const std::vector<int>& tau) {
  if (static_cast<int>(tau.size()) != ct.num_leaves) throw Error("reference ordering does not match constraint tree");
  std::vector<int> pos(ct.num_leaves, -1);
  for (std::size_t i = 0; i < tau.size(); ++i) pos.at(tau[i]) = i;
  return best_order(ct, ct.root, pos);
}

std::vector<std::vector<int>> interval_orderings(const std::vector<int>& tau, const std::vector<int>& sigma,
                                                 std::int64_t r) {
  if (r < 1) throw Error("swap batch size must be positive");
  std::map<int, int> target;
  for (std::size_t i = 0; i < sigma.size(); ++i) target[sigma[i]] = i;
  std::vector<int> cur = tau;
  std::vector<std::vector<int>> out;
  std::int64_t swaps = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      if (target.at(cur[i]) > target.at(cur[i + 1])) {
        std::swap(cur[i], cur[i + 1]);
        moved = true;
        if (++swaps % r == 0) out.push_back(cur);
      }
    }
  }
  if (out.empty() || out.back() != sigma) out.push_back(sigma);
  return out;
}

}  // namespace ptn
