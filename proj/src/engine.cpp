#include "ptn/engine.hpp"

#include "ptn/ordering.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

namespace ptn {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Label> minus(const Tensor& t, const std::vector<Label>& drop) {
  std::vector<Label> out;
  for (Label l : t.labels())
    if (std::find(drop.begin(), drop.end(), l) == drop.end()) out.push_back(l);
  return out;
}

// QR of site x toward site y; R is absorbed into y.
void shift_gauge(std::vector<Tensor>& c, int x, int y) {
  std::vector<Label> bond = shared_labels(c[x], c[y]);
  Matricized m = matricize(c[x], minus(c[x], bond));
  QrResult f = qr(m.m);
  const Label q = fresh_label();
  const Dim k = f.q.cols();
  Tensor r = tensorize(f.r, {q}, {k}, m.col_labels, m.col_dims);
  c[x] = tensorize(f.q, m.row_labels, m.row_dims, {q}, {k});
  c[y] = contract(r, c[y]);
}

}  // namespace

void validate_plan(const TensorNetwork& g, const PartitionedPlan& plan) {
  if (plan.parts.empty()) throw Error("plan has no partitions");
  std::set<int> seen;
  for (const auto& p : plan.parts) {
    if (p.empty()) throw Error("plan has an empty partition");
    for (int v : p) {
      if (!g.contains(v)) throw Error("plan references unknown vertex " + std::to_string(v));
      if (!seen.insert(v).second) throw Error("vertex " + std::to_string(v) + " appears in two partitions");
    }
  }
  if (seen.size() != g.num_vertices()) throw Error("plan does not cover every vertex");
  const int n = plan.parts.size();
  if (static_cast<int>(plan.merges.size()) != n - 1) throw Error("plan needs exactly one merge per partition minus one");
  std::vector<bool> used(plan.num_nodes(), false);
  for (std::size_t i = 0; i < plan.merges.size(); ++i) {
    for (int c : plan.merges[i]) {
      if (c < 0 || c >= n + static_cast<int>(i)) throw Error("merge refers to a later or unknown node");
      if (used[c]) throw Error("node merged twice");
      used[c] = true;
    }
    if (plan.merges[i][0] == plan.merges[i][1]) throw Error("node merged with itself");
  }
}

PartitionedPlan sequential_plan(std::vector<std::vector<int>> parts) {
  PartitionedPlan p;
  p.parts = std::move(parts);
  const int n = p.parts.size();
  for (int i = 1; i < n; ++i) p.merges.push_back({i == 1 ? 0 : n + i - 2, i});
  return p;
}

std::vector<Tensor> swap_adjacent(const std::vector<Tensor>& mps, int site, Dim gamma) {
  const int n = mps.size();
  if (site < 0 || site + 1 >= n) throw Error("swap_adjacent: site out of range");
  std::vector<Tensor> c = mps;
  for (int k = 0; k < site; ++k) shift_gauge(c, k, k + 1);
  for (int k = n - 1; k > site + 1; --k) shift_gauge(c, k, k - 1);
  std::vector<Label> left = site > 0 ? shared_labels(c[site - 1], c[site]) : std::vector<Label>{};
  std::vector<Label> right = site + 2 < n ? shared_labels(c[site + 1], c[site + 2]) : std::vector<Label>{};
  std::vector<Label> mid = shared_labels(c[site], c[site + 1]);
  std::vector<Label> link_b = right;
  link_b.insert(link_b.end(), mid.begin(), mid.end());
  std::vector<Label> phys_b = minus(c[site + 1], link_b);
  Tensor theta = contract(c[site], c[site + 1]);
  std::vector<Label> rows = left;
  rows.insert(rows.end(), phys_b.begin(), phys_b.end());
  Matricized m = matricize(theta, rows);
  FactorResult f = truncated_factor(m.m, gamma);
  const Label b = fresh_label();
  const Dim k = f.u.cols();
  c[site] = tensorize(f.u, m.row_labels, m.row_dims, {b}, {k});
  c[site + 1] = tensorize(f.s, {b}, {k}, m.col_labels, m.col_dims);
  return c;
}

ApproxResult approx_tensor_network(const TensorNetwork& g, const std::vector<std::vector<Label>>& sets, Dim chi,
                                   std::int64_t r, Ansatz ansatz, std::uint64_t seed) {
  if (sets.empty()) throw Error("approx_tensor_network: no edge sets");
  if (r < 1) throw Error("swap batch size must be positive");
  auto t0 = Clock::now();
  std::vector<int> tau = order_edge_sets(g, g.vertex_ids(), sets, seed);
  const double t_tau = since(t0);
  ApproxResult out = approx_tensor_network(g, sets, tau, chi, r, ansatz);
  out.analysis_seconds += t_tau;
  return out;
}

ApproxResult approx_tensor_network(const TensorNetwork& g, const std::vector<std::vector<Label>>& sets,
                                   const std::vector<int>& tau, Dim chi, std::int64_t r, Ansatz ansatz) {
  if (sets.empty()) throw Error("approx_tensor_network: no edge sets");
  if (r < 1) throw Error("swap batch size must be positive");
  ApproxResult out;
  auto t0 = Clock::now();
  std::vector<int> sigma(sets.size());
  std::iota(sigma.begin(), sigma.end(), 0);
  out.distance = kendall_tau(sigma, tau);
  out.waypoints = interval_orderings(tau, sigma, r);
  out.analysis_seconds += since(t0);
  TensorNetwork current = g;
  for (const auto& w : out.waypoints) {
    std::vector<std::vector<Label>> ordered;
    for (int i : w) ordered.push_back(sets[i]);
    auto t1 = Clock::now();
    EmbeddingTree tree = build_embedding_tree(ordered, ansatz);
    out.analysis_seconds += since(t1);
    DmStats st;
    out.tree = density_matrix_alg(current, tree, chi, &st);
    out.analysis_seconds += st.embed_seconds;
    current = out.tree.net;
    ++out.passes;
  }
  return out;
}

ContractResult partitioned_contract(const ContractJob& job) {
  const TensorNetwork& g = job.network;
  const PartitionedPlan& plan = job.plan;
  validate_plan(g, plan);
  if (job.chi < 1) throw Error("chi must be positive");
  if (job.swap_batch < 1) throw Error("swap batch size must be positive");

  auto t_start = Clock::now();
  ContractResult res;
  FlopCounter flops;
  FlopScope scope(flops);

  const int n = plan.parts.size();
  const int nodes = plan.num_nodes();
  std::map<int, int> part_of;
  for (int i = 0; i < n; ++i)
    for (int v : plan.parts[i]) part_of[v] = i;

  // Edge subsets: one per pair of adjacent partitions, one per partition's dangling edges.
  auto t_an = Clock::now();
  using Key = std::pair<int, int>;
  std::map<Key, std::vector<Label>> subsets;
  for (const auto& [l, e] : g.edges()) {
    if (e.dangling()) {
      subsets[{part_of[e.u], -1}].push_back(l);
      continue;
    }
    int a = part_of[e.u], b = part_of[e.v];
    if (a != b) subsets[{std::min(a, b), std::max(a, b)}].push_back(l);
  }
  std::map<Key, std::vector<Label>> edge_order;
  for (const auto& [k, ls] : subsets) {
    std::vector<int> ids = plan.parts[k.first];
    if (k.second >= 0) ids.insert(ids.end(), plan.parts[k.second].begin(), plan.parts[k.second].end());
    std::vector<std::vector<Label>> singles;
    for (Label l : ls) singles.push_back({l});
    std::vector<Label> ord;
    for (int i : order_edge_sets(g, ids, singles, job.seed)) ord.push_back(ls[i]);
    edge_order[k] = ord;
  }

  // Contraction tree bookkeeping.
  std::vector<int> parent(nodes, -1);
  std::vector<std::array<int, 2>> kids(nodes, {-1, -1});
  std::vector<std::set<int>> members(nodes);
  for (int i = 0; i < n; ++i) members[i] = {i};
  for (int i = 0; i < static_cast<int>(plan.merges.size()); ++i) {
    const int s = n + i;
    kids[s] = plan.merges[i];
    for (int c : plan.merges[i]) {
      parent[c] = s;
      members[s].insert(members[c].begin(), members[c].end());
    }
  }
  auto adjacent = [&](const std::set<int>& a, const std::set<int>& b) {
    for (const auto& [k, ls] : subsets)
      if (k.second >= 0 && ((a.count(k.first) && b.count(k.second)) || (a.count(k.second) && b.count(k.first))))
        return true;
    return false;
  };
  res.analysis_seconds += since(t_an);

  std::vector<TensorNetwork> tn(nodes);
  std::vector<double> logs(nodes, 0.0);
  std::vector<int> signs(nodes, 1);
  for (int i = 0; i < n; ++i) tn[i] = g.induced(plan.parts[i]);

  auto finish_node = [&](int s, const TensorNetwork& net) {
    std::vector<Key> es;
    for (const auto& [k, ls] : subsets) {
      bool in1 = members[s].count(k.first) > 0;
      bool in2 = k.second >= 0 && members[s].count(k.second) > 0;
      if (k.second < 0 ? in1 : in1 != in2) es.push_back(k);
    }
    StepInfo info;
    info.node = s;
    info.num_sets = es.size();
    const std::uint64_t f0 = flops.total;
    if (es.empty()) {
      double v = net.contract().value();
      if (v < 0) signs[s] = -signs[s];
      logs[s] += std::log(std::abs(v));
      tn[s] = TensorNetwork();
      info.flops = flops.total - f0;
      res.steps.push_back(info);
      return;
    }
    auto t_a = Clock::now();
    // Future contractions along the path to the root.
    std::vector<ConstraintStep> steps;
    std::vector<std::set<int>> others;
    for (int cur = s; parent[cur] >= 0; cur = parent[cur]) {
      const int p = parent[cur];
      const int sib = kids[p][0] == cur ? kids[p][1] : kids[p][0];
      ConstraintStep st;
      for (std::size_t i = 0; i < es.size(); ++i) {
        const Key& k = es[i];
        if (k.second < 0) continue;
        int outside = members[s].count(k.first) ? k.second : k.first;
        if (members[sib].count(outside)) st.direct.push_back(i);
      }
      for (std::size_t j = 0; j < others.size(); ++j)
        if (adjacent(others[j], members[sib])) st.prior.push_back(j);
      others.push_back(members[sib]);
      steps.push_back(st);
    }
    ConstraintTree ct = build_constraint_tree(es.size(), steps);
    // Reference ordering from the structure of the current network.
    std::vector<std::vector<Label>> raw;
    for (const Key& k : es) raw.push_back(subsets[k]);
    std::vector<int> tau = order_edge_sets(net, net.vertex_ids(), raw, job.seed);
    std::vector<int> sigma = ordering_under_constraint(ct, tau);
    std::vector<std::vector<Label>> sets;
    // Within a set, follow the vertex order of the current network so the
    // chain is not laid out against the existing bonds.
    Graph gr = graph_of(net);
    std::vector<int> vord = linear_ordering(gr, job.seed);
    std::vector<int> rank(vord.size());
    for (std::size_t i = 0; i < vord.size(); ++i) rank[vord[i]] = i;
    for (int i : sigma) {
      std::vector<Label> ls = edge_order[es[i]];
      std::stable_sort(ls.begin(), ls.end(),
                       [&](Label x, Label y) { return rank[gr.ends.at(x).first] < rank[gr.ends.at(y).first]; });
      sets.push_back(ls);
    }
    // tau re-expressed in positions of sigma.
    std::vector<int> at(es.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) at[sigma[i]] = i;
    std::vector<int> tau_pos;
    for (int i : tau) tau_pos.push_back(at[i]);
    res.analysis_seconds += since(t_a);

    ApproxResult ar = approx_tensor_network(net, sets, tau_pos, job.chi, job.swap_batch, job.ansatz);
    res.analysis_seconds += ar.analysis_seconds;
    Tensor& root = ar.tree.net.at(ar.tree.root);
    const double nrm = root.norm();
    if (nrm > 0) {
      root.scale(1.0 / nrm);
      logs[s] += std::log(nrm);
    } else {
      logs[s] = -std::numeric_limits<double>::infinity();
    }
    info.passes = ar.passes;
    info.distance = ar.distance;
    for (const auto& [l, e] : ar.tree.net.edges())
      if (!e.dangling()) info.max_bond = std::max(info.max_bond, e.size);
    info.flops = flops.total - f0;
    res.steps.push_back(info);
    tn[s] = ar.tree.net;
    if (s == plan.root()) res.tree = ar.tree;
  };

  if (n == 1) finish_node(0, tn[0]);
  for (int i = 0; i < static_cast<int>(plan.merges.size()); ++i) {
    const int s = n + i;
    const auto [a, b] = plan.merges[i];
    logs[s] = logs[a] + logs[b];
    signs[s] = signs[a] * signs[b];
    TensorNetwork merged = merge(tn[a], tn[b]);
    tn[a] = TensorNetwork();
    tn[b] = TensorNetwork();
    finish_node(s, merged);
  }
  const int r = plan.root();
  res.closed = tn[r].num_vertices() == 0;
  res.sign = signs[r];
  res.log_abs = logs[r];
  res.flops = flops.total;
  res.seconds = std::max(0.0, since(t_start) - res.analysis_seconds);
  return res;
}

}  // namespace ptn
