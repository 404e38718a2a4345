#include "ptn/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace ptn {

int TensorNetwork::add(Tensor t) {
  int id = next_id_++;
  tensors_.emplace(id, std::move(t));
  return id;
}

void TensorNetwork::put(int id, Tensor t) {
  tensors_[id] = std::move(t);
  next_id_ = std::max(next_id_, id + 1);
}

void TensorNetwork::remove(int id) { tensors_.erase(id); }

const Tensor& TensorNetwork::at(int id) const {
  auto it = tensors_.find(id);
  if (it == tensors_.end()) throw Error("unknown vertex " + std::to_string(id));
  return it->second;
}

Tensor& TensorNetwork::at(int id) {
  auto it = tensors_.find(id);
  if (it == tensors_.end()) throw Error("unknown vertex " + std::to_string(id));
  return it->second;
}

std::vector<int> TensorNetwork::vertex_ids() const {
  std::vector<int> v;
  for (const auto& [id, t] : tensors_) v.push_back(id);
  return v;
}

std::map<Label, EdgeInfo> TensorNetwork::edges() const {
  std::map<Label, EdgeInfo> e;
  for (const auto& [id, t] : tensors_) {
    for (int i = 0; i < t.order(); ++i) {
      Label l = t.labels()[i];
      auto it = e.find(l);
      if (it == e.end()) {
        e.emplace(l, EdgeInfo{l, t.dims()[i], id, -1});
        continue;
      }
      EdgeInfo& info = it->second;
      if (info.v >= 0) throw ShapeError("label " + std::to_string(l) + " appears on more than two tensors");
      if (info.size != t.dims()[i])
        throw ShapeError("contracted edge " + std::to_string(l) + " joins modes of different sizes");
      info.v = id;
    }
  }
  return e;
}

std::vector<Label> TensorNetwork::dangling() const {
  auto e = edges();
  std::vector<Label> out;
  for (const auto& [id, t] : tensors_)
    for (Label l : t.labels())
      if (e.at(l).dangling()) out.push_back(l);
  return out;
}

TensorNetwork TensorNetwork::induced(const std::vector<int>& ids) const {
  TensorNetwork n;
  for (int id : ids) n.put(id, at(id));
  n.next_id_ = std::max(n.next_id_, next_id_);
  return n;
}

void TensorNetwork::validate() const { (void)edges(); }

Tensor TensorNetwork::contract() const {
  std::vector<Tensor> ts;
  for (const auto& [id, t] : tensors_) ts.push_back(t);
  return contract_all(std::move(ts));
}

TensorNetwork merge(const TensorNetwork& a, const TensorNetwork& b) {
  TensorNetwork out = a;
  const int shift = a.next_id();
  for (const auto& [id, t] : b.tensors()) out.put(id + shift, t);
  return out;
}

double edge_weight_sum(const std::vector<Dim>& sizes) {
  double s = 0;
  for (Dim d : sizes) s += std::log(static_cast<double>(d));
  return s;
}

double edge_weight_sum(const TensorNetwork& g, const std::vector<Label>& edges) {
  auto e = g.edges();
  std::vector<Dim> sizes;
  for (Label l : edges) {
    auto it = e.find(l);
    if (it == e.end()) throw Error("unknown edge " + std::to_string(l));
    sizes.push_back(it->second.size);
  }
  return edge_weight_sum(sizes);
}

Graph graph_of(const TensorNetwork& g, const std::vector<int>& ids) {
  Graph gr;
  gr.ids = ids;
  const int n = ids.size();
  for (int i = 0; i < n; ++i) gr.index[ids[i]] = i;
  gr.w.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const Tensor& t = g.at(ids[i]);
    for (int k = 0; k < t.order(); ++k) {
      Label l = t.labels()[k];
      gr.size[l] = t.dims()[k];
      auto it = gr.ends.find(l);
      if (it == gr.ends.end()) {
        gr.ends[l] = {i, -1};
      } else {
        it->second.second = i;
        double w = std::log(static_cast<double>(t.dims()[k]));
        gr.w[it->second.first][i] += w;
        gr.w[i][it->second.first] += w;
      }
    }
  }
  return gr;
}

Graph graph_of(const TensorNetwork& g) { return graph_of(g, g.vertex_ids()); }

namespace {

// Edmonds-Karp on a dense capacity matrix. Returns the source side.
std::vector<bool> max_flow_source_side(std::vector<std::vector<double>> cap, int s, int t, double eps) {
  const int n = cap.size();
  while (true) {
    std::vector<int> prev(n, -1);
    prev[s] = s;
    std::deque<int> q{s};
    while (!q.empty() && prev[t] < 0) {
      int x = q.front();
      q.pop_front();
      for (int y = 0; y < n; ++y)
        if (prev[y] < 0 && cap[x][y] > eps) {
          prev[y] = x;
          q.push_back(y);
        }
    }
    if (prev[t] < 0) break;
    double f = std::numeric_limits<double>::infinity();
    for (int y = t; y != s; y = prev[y]) f = std::min(f, cap[prev[y]][y]);
    for (int y = t; y != s; y = prev[y]) {
      cap[prev[y]][y] -= f;
      cap[y][prev[y]] += f;
    }
  }
  std::vector<bool> seen(n, false);
  std::deque<int> q{s};
  seen[s] = true;
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    for (int y = 0; y < n; ++y)
      if (!seen[y] && cap[x][y] > eps) {
        seen[y] = true;
        q.push_back(y);
      }
  }
  return seen;
}

}  // namespace

Cut mincut(const TensorNetwork& g, const std::vector<int>& ids, const std::vector<Label>& e1,
           const std::vector<Label>& e2) {
  for (Label a : e1)
    if (std::find(e2.begin(), e2.end(), a) != e2.end()) throw Error("mincut: edge sets overlap");
  Graph gr = graph_of(g, ids);
  const int n = ids.size();
  double total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) total += gr.w[i][j];
  for (const auto& [l, s] : gr.size) total += std::log(static_cast<double>(s));
  const double big = 2.0 * total + 1.0;
  std::vector<std::vector<double>> cap(n + 2, std::vector<double>(n + 2, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cap[i][j] = gr.w[i][j];
  const int a = n, b = n + 1;
  auto attach = [&](const std::vector<Label>& es, int term, bool out) {
    for (Label l : es) {
      auto it = gr.ends.find(l);
      if (it == gr.ends.end() || it->second.second >= 0)
        throw Error("mincut: edge " + std::to_string(l) + " is not an open edge of the subgraph");
      int x = it->second.first;
      if (out)
        cap[term][x] = big;
      else
        cap[x][term] = big;
    }
  };
  attach(e1, a, true);
  attach(e2, b, false);
  std::vector<bool> side = max_flow_source_side(cap, a, b, 1e-9 * (1.0 + total));
  Cut c;
  for (int i = 0; i < n; ++i) (side[i] ? c.left : c.right).push_back(ids[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (side[i] && !side[j]) c.value += gr.w[i][j];
  return c;
}

Cut mincut(const TensorNetwork& g, const std::vector<Label>& e1, const std::vector<Label>& e2) {
  return mincut(g, g.vertex_ids(), e1, e2);
}

namespace {

class Bisector {
 public:
  Bisector(const Graph& g, std::uint64_t seed) : g_(g), rng_(seed), lext_(g.ids.size(), 0.0), rext_(g.ids.size(), 0.0) {}

  void run(const std::vector<int>& block, std::vector<int>& out) {
    if (block.size() == 1) {
      out.push_back(block[0]);
      return;
    }
    std::vector<bool> in_a = block.size() <= kExhaustiveBisection ? exhaustive(block) : greedy(block);
    std::vector<int> a, c;
    for (std::size_t i = 0; i < block.size(); ++i) (in_a[i] ? a : c).push_back(block[i]);
    for (int x : a)
      for (int y : c) {
        rext_[x] += g_.w[x][y];
        lext_[y] += g_.w[x][y];
      }
    run(a, out);
    run(c, out);
  }

 private:
  double cost(const std::vector<int>& block, const std::vector<bool>& in_a) const {
    double s = 0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      int x = block[i];
      if (in_a[i]) {
        s += rext_[x];
        for (std::size_t j = 0; j < block.size(); ++j)
          if (!in_a[j]) s += g_.w[x][block[j]];
      } else {
        s += lext_[x];
      }
    }
    return s;
  }

  static int min_side(int n) { return std::max(1, (n + 2) / 3); }

  std::vector<bool> exhaustive(const std::vector<int>& block) const {
    const int n = block.size();
    const int lo = min_side(n);
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w[i][j] = g_.w[block[i]][block[j]];
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      int pc = __builtin_popcount(mask);
      if (pc < lo || n - pc < lo) continue;
      double s = 0;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1u) {
          s += rext_[block[i]];
          for (int j = 0; j < n; ++j)
            if (!(mask >> j & 1u)) s += w[i][j];
        } else {
          s += lext_[block[i]];
        }
      }
      if (s < best - 1e-12) {
        best = s;
        best_mask = mask;
      }
    }
    std::vector<bool> in_a(n);
    for (int i = 0; i < n; ++i) in_a[i] = best_mask >> i & 1u;
    return in_a;
  }

  std::vector<bool> greedy(const std::vector<int>& block) {
    const int n = block.size();
    const int lo = min_side(n);
    std::vector<std::vector<bool>> starts;
    {
      // Breadth-first growth from the first vertex.
      std::vector<bool> s(n, false), seen(n, false);
      std::deque<int> q{0};
      seen[0] = true;
      int taken = 0;
      while (taken < n / 2) {
        if (q.empty()) {
          for (int i = 0; i < n; ++i)
            if (!seen[i]) {
              seen[i] = true;
              q.push_back(i);
              break;
            }
        }
        int x = q.front();
        q.pop_front();
        s[x] = true;
        ++taken;
        for (int y = 0; y < n; ++y)
          if (!seen[y] && g_.w[block[x]][block[y]] > 0) {
            seen[y] = true;
            q.push_back(y);
          }
      }
      starts.push_back(s);
    }
    for (int r = 0; r < 4; ++r) {
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng_);
      std::vector<bool> s(n, false);
      for (int i = 0; i < n / 2; ++i) s[p[i]] = true;
      starts.push_back(s);
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> best_s;
    for (auto& s : starts) {
      refine(block, s, lo);
      double c = cost(block, s);
      if (c < best - 1e-12) {
        best = c;
        best_s = s;
      }
    }
    return best_s;
  }

  void refine(const std::vector<int>& block, std::vector<bool>& s, int lo) const {
    const int n = block.size();
    auto delta = [&](int i) {
      int x = block[i];
      double d = s[i] ? lext_[x] - rext_[x] : rext_[x] - lext_[x];
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double w = g_.w[x][block[j]];
        d += (s[j] == s[i]) ? w : -w;
      }
      return d;
    };
    int na = std::count(s.begin(), s.end(), true);
    for (int iter = 0; iter < 10 * n; ++iter) {
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) d[i] = delta(i);
      double best = -1e-12;
      int bi = -1, bj = -1;
      for (int i = 0; i < n; ++i) {
        int nna = s[i] ? na - 1 : na + 1;
        if (nna >= lo && n - nna >= lo && d[i] < best) {
          best = d[i];
          bi = i;
          bj = -1;
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (!s[i] || s[j]) continue;
          double dd = d[i] + d[j] + 2 * g_.w[block[i]][block[j]];
          if (dd < best) {
            best = dd;
            bi = i;
            bj = j;
          }
        }
      if (bi < 0) break;
      na += s[bi] ? -1 : 1;
      s[bi] = !s[bi];
      if (bj >= 0) {
        na += s[bj] ? -1 : 1;
        s[bj] = !s[bj];
      }
    }
  }

  const Graph& g_;
  std::mt19937_64 rng_;
  std::vector<double> lext_, rext_;
};

}  // namespace

std::vector<int> linear_ordering(const Graph& gr, std::uint64_t seed) {
  std::vector<int> out;
  if (gr.ids.empty()) return out;
  std::vector<int> all(gr.ids.size());
  std::iota(all.begin(), all.end(), 0);
  Bisector b(gr, seed);
  b.run(all, out);
  return out;
}

std::vector<int> linear_ordering(const TensorNetwork& g, const std::vector<int>& ids, std::uint64_t seed) {
  Graph gr = graph_of(g, ids);
  std::vector<int> idx = linear_ordering(gr, seed);
  std::vector<int> out;
  for (int i : idx) out.push_back(gr.ids[i]);
  return out;
}

std::vector<int> order_edge_sets(const TensorNetwork& g, const std::vector<int>& ids,
                                 const std::vector<std::vector<Label>>& sets, std::uint64_t seed) {
  Graph gr = graph_of(g, ids);
  std::vector<int> ord = linear_ordering(gr, seed);
  std::vector<int> rank(ord.size());
  for (std::size_t i = 0; i < ord.size(); ++i) rank[ord[i]] = i;
  std::vector<std::vector<int>> keys(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (Label l : sets[k]) {
      auto it = gr.ends.find(l);
      if (it == gr.ends.end()) throw Error("order_edge_sets: edge " + std::to_string(l) + " not attached");
      keys[k].push_back(rank[it->second.first]);
      if (it->second.second >= 0) keys[k].push_back(rank[it->second.second]);
    }
    if (keys[k].empty()) throw Error("order_edge_sets: empty edge set");
    std::sort(keys[k].begin(), keys[k].end());
  }
  std::vector<int> perm(sets.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  return perm;
}

}  // namespace ptn
