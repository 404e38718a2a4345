#include "ptn/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace ptn {

int lattice_size(const std::vector<int>& dims) {
  if (dims.empty()) throw Error("lattice needs at least one dimension");
  int n = 1;
  for (int d : dims) {
    if (d < 1) throw Error("lattice dimensions must be positive");
    n *= d;
  }
  return n;
}

EdgeList lattice_edges(const std::vector<int>& dims) {
  const int n = lattice_size(dims);
  const int k = dims.size();
  std::vector<int> stride(k, 1);
  for (int a = k - 2; a >= 0; --a) stride[a] = stride[a + 1] * dims[a + 1];
  EdgeList out;
  for (int v = 0; v < n; ++v)
    for (int a = 0; a < k; ++a)
      if ((v / stride[a]) % dims[a] + 1 < dims[a]) out.push_back({v, v + stride[a]});
  return out;
}

EdgeList random_regular_graph(int n, int degree, std::uint64_t seed) {
  if (n < 1 || degree < 0 || degree >= n || (static_cast<long>(n) * degree) % 2)
    throw Error("no simple regular graph with these parameters");
  std::mt19937_64 rng(seed);
  std::vector<int> stubs;
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < degree; ++j) stubs.push_back(v);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> seen;
    bool ok = true;
    for (std::size_t i = 0; ok && i < stubs.size(); i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b || !seen.insert(std::minmax(a, b)).second) ok = false;
    }
    if (ok) return EdgeList(seen.begin(), seen.end());
  }
  throw Error("random regular graph: too many rejections");
}

Matrix ising_w(double beta) {
  if (beta < 0) throw Error("beta must be nonnegative");
  const double c = std::sqrt(std::cosh(beta)), s = std::sqrt(std::sinh(beta));
  Matrix w(2, 2);
  w << c + s, c - s, c - s, c + s;
  return w / std::sqrt(2.0);
}

namespace {

std::vector<std::vector<Label>> incident(int n, const EdgeList& edges) {
  std::vector<std::vector<Label>> inc(n);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [a, b] = edges[i];
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw Error("invalid edge list");
    inc[a].push_back(i);
    inc[b].push_back(i);
  }
  return inc;
}

}  // namespace

TensorNetwork ising_network(int num_vertices, const EdgeList& edges, double beta) {
  Matrix w = ising_w(beta);
  auto inc = incident(num_vertices, edges);
  TensorNetwork g;
  for (int v = 0; v < num_vertices; ++v) {
    const int d = inc[v].size();
    Tensor t(inc[v], std::vector<Dim>(d, 2));
    for (std::size_t idx = 0; idx < t.size(); ++idx) {
      double sum = 0;
      for (int s = 0; s < 2; ++s) {
        double p = 1;
        for (int k = 0; k < d; ++k) p *= w(s, (idx >> (d - 1 - k)) & 1);
        sum += p;
      }
      t.data()[idx] = sum;
    }
    g.put(v, std::move(t));
  }
  return g;
}

TensorNetwork random_network(int num_vertices, const EdgeList& edges, Dim s, double alpha, std::uint64_t seed) {
  if (alpha < -1 || alpha > 0) throw Error("alpha must lie in [-1, 0]");
  if (s < 1) throw Error("mode size must be positive");
  auto inc = incident(num_vertices, edges);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(alpha, 1.0);
  TensorNetwork g;
  for (int v = 0; v < num_vertices; ++v) {
    Tensor t(inc[v], std::vector<Dim>(inc[v].size(), s));
    for (double& x : t.data()) x = dist(rng);
    g.put(v, std::move(t));
  }
  return g;
}

LogValue brute_force_lnZ(const TensorNetwork& g) {
  auto edges = g.edges();
  std::vector<Label> labels;
  std::vector<Dim> sizes;
  std::uint64_t states = 1;
  for (const auto& [l, e] : edges) {
    if (e.dangling()) throw Error("brute force needs a closed network");
    labels.push_back(l);
    sizes.push_back(e.size);
    states *= e.size;
    if (states > kMaxBruteForceStates) throw Error("brute force state space exceeds 2^24");
  }
  std::vector<const double*> data;
  std::map<int, int> slot;
  for (const auto& [id, t] : g.tensors()) {
    slot[id] = data.size();
    data.push_back(t.data().data());
  }
  // Per label: the two tensors and the stride of the label in each.
  struct Touch {
    int t[2];
    Dim stride[2];
  };
  std::vector<Touch> touch(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const EdgeInfo& e = edges.at(labels[j]);
    int ends[2] = {e.u, e.v};
    for (int s = 0; s < 2; ++s) {
      const Tensor& t = g.at(ends[s]);
      Dim st = 1;
      for (int a = t.order() - 1; a >= 0 && t.labels()[a] != labels[j]; --a) st *= t.dims()[a];
      touch[j].t[s] = slot[ends[s]];
      touch[j].stride[s] = st;
    }
  }
  std::vector<Dim> off(data.size(), 0), idx(labels.size(), 0);
  double sum = 0, comp = 0;
  for (std::uint64_t it = 0; it < states; ++it) {
    double p = 1;
    for (std::size_t t = 0; t < data.size(); ++t) p *= data[t][off[t]];
    // Neumaier summation.
    double s2 = sum + p;
    comp += std::abs(sum) >= std::abs(p) ? (sum - s2) + p : (p - s2) + sum;
    sum = s2;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const Touch& tc = touch[j];
      if (++idx[j] < sizes[j]) {
        off[tc.t[0]] += tc.stride[0];
        off[tc.t[1]] += tc.stride[1];
        break;
      }
      off[tc.t[0]] -= tc.stride[0] * (sizes[j] - 1);
      off[tc.t[1]] -= tc.stride[1] * (sizes[j] - 1);
      idx[j] = 0;
    }
  }
  const double z = sum + comp;
  return {z < 0 ? -1 : 1, std::log(std::abs(z))};
}

double ising_spin_sum_lnZ(int num_vertices, const EdgeList& edges, double beta) {
  if (num_vertices > 24) throw Error("spin sum limited to 24 spins");
  // Shift by the ground-state energy to keep terms near 1.
  const double top = beta * edges.size();
  double z = 0;
  for (std::uint64_t c = 0; c < (std::uint64_t(1) << num_vertices); ++c) {
    int e = 0;
    for (auto [a, b] : edges) e += ((c >> a) & 1) == ((c >> b) & 1) ? 1 : -1;
    z += std::exp(beta * e - top);
  }
  return std::log(z) + top;
}

double ising_lattice_transfer_lnZ(const std::vector<int>& dims, double beta) {
  const int n = lattice_size(dims);
  const int slices = dims.back();
  const int m = n / slices;
  if (m > 20) throw Error("transfer matrix limited to 20 spins per slice");
  // Intra-slice couplings along the leading axes.
  std::vector<int> lead(dims.begin(), dims.end() - 1);
  EdgeList intra = lead.empty() ? EdgeList{} : lattice_edges(lead);
  const std::size_t states = std::size_t(1) << m;
  std::vector<double> diag(states);
  for (std::size_t c = 0; c < states; ++c) {
    int e = 0;
    for (auto [a, b] : intra) e += ((c >> a) & 1) == ((c >> b) & 1) ? 1 : -1;
    diag[c] = std::exp(beta * (e - static_cast<double>(intra.size())));
  }
  double log_scale = beta * intra.size() * slices;
  std::vector<double> v = diag;
  const double same = std::exp(beta), diff = std::exp(-beta);
  for (int k = 1; k < slices; ++k) {
    for (int i = 0; i < m; ++i) {
      const std::size_t bit = std::size_t(1) << i;
      for (std::size_t c = 0; c < states; ++c) {
        if (c & bit) continue;
        double a = v[c], b = v[c | bit];
        v[c] = same * a + diff * b;
        v[c | bit] = diff * a + same * b;
      }
    }
    double mx = 0;
    for (std::size_t c = 0; c < states; ++c) {
      v[c] *= diag[c];
      mx = std::max(mx, v[c]);
    }
    for (double& x : v) x /= mx;
    log_scale += std::log(mx);
  }
  double z = 0;
  for (double x : v) z += x;
  return std::log(z) + log_scale;
}

PartitionedPlan lattice_plan(const std::vector<int>& dims, int p) {
  if (p < 1) throw Error("partition size must be positive");
  const int n = lattice_size(dims);
  const int len = dims.back();
  std::vector<std::vector<int>> parts;
  for (int base = 0; base < n; base += len)
    for (int s = 0; s < len; s += p) {
      std::vector<int> part;
      for (int k = s; k < std::min(len, s + p); ++k) part.push_back(base + k);
      parts.push_back(part);
    }
  return sequential_plan(std::move(parts));
}

PartitionedPlan ordering_plan(const TensorNetwork& g, int p, std::uint64_t seed) {
  if (p < 1) throw Error("partition size must be positive");
  std::vector<int> ord = linear_ordering(g, g.vertex_ids(), seed);
  std::vector<std::vector<int>> parts;
  for (std::size_t i = 0; i < ord.size(); i += p)
    parts.emplace_back(ord.begin() + i, ord.begin() + std::min(ord.size(), i + p));
  return sequential_plan(std::move(parts));
}

}  // namespace ptn
