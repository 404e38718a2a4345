// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "ptn/embedding.hpp"
#include "ptn/embedding_tree.hpp"
#include "ptn/engine.hpp"
#include "ptn/job.hpp"
#include "ptn/models.hpp"
#include "ptn/mpo_mps.hpp"
#include "ptn/ordering.hpp"
#include "ptn/treeapprox.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>

using namespace ptn;
using testutil::rel_diff;

namespace {

// Tolerances and budgets.
constexpr double kExactTol = 1e-10;
constexpr double kC1Seconds = 10;
constexpr double kTreeTol = 1e-8;
constexpr double kC2Seconds = 30;
constexpr double kSlopeTol = 0.3;
constexpr double kC3Seconds = 120;
constexpr double kC4Seconds = 60;
constexpr double kHybridTol = 1e-12;
constexpr double kC6Seconds = 600;
constexpr double kC7Seconds = 60;
constexpr double kBetaZeroTol = 1e-12;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome exactness() {
  const auto t0 = Clock::now();
  const std::vector<int> dims = {4, 4};
  ContractJob job;
  job.network = ising_network(16, lattice_edges(dims), 0.44);
  job.plan = lattice_plan(dims, 1);
  job.chi = 64;
  ContractResult r = partitioned_contract(job);
  const double exact = ising_spin_sum_lnZ(16, lattice_edges(dims), 0.44);
  const double err = std::abs(r.log_abs - exact) / std::abs(exact);
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "rel error %.2e (<= %.0e), %.2f s (<= %.0f s)", err, kExactTol, secs, kC1Seconds);
  return {r.sign == 1 && err <= kExactTol && secs <= kC1Seconds, buf};
}

Outcome tree_truncation() {
  const auto t0 = Clock::now();
  const int n = 10;
  const Dim r = 20, chi = 8;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int it = 0; it < 50; ++it) {
    TensorNetwork g;
    std::vector<Label> leaves;
    for (int i = 0; i < n; ++i) {
      std::vector<Label> ls;
      std::vector<Dim> ds;
      if (i > 0) {
        ls.push_back(200 + i - 1);
        ds.push_back(r);
      }
      ls.push_back(100 + i);
      ds.push_back(2);
      leaves.push_back(100 + i);
      if (i + 1 < n) {
        ls.push_back(200 + i);
        ds.push_back(r);
      }
      Tensor t(ls, ds);
      for (double& x : t.data()) x = nd(rng);
      g.put(i, std::move(t));
    }
    TreeTensorNetwork dm = density_matrix_alg(g, mps_tree(leaves), chi);
    TreeTensorNetwork canon = truncate_tree_canonical({g, n - 1}, chi);
    worst = std::max(worst, rel_diff(canon.net.contract(), dm.net.contract()));
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst rel diff %.2e (<= %.0e) over 50, %.2f s (<= %.0f s)", worst, kTreeTol, secs,
                kC2Seconds);
  return {worst <= kTreeTol && secs <= kC2Seconds, buf};
}

// Least-squares slope of log flops against log R.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / x.size();
    my += std::log(y[i]) / y.size();
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    den += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return num / den;
}

Outcome flop_scaling() {
  const auto t0 = Clock::now();
  // MPO rank, MPS rank and chi all equal R with s = 2.
  const int n = 3;
  std::vector<double> rs, zip, full, dm;
  for (Dim R : {16, 32, 64}) {
    MpoMps p = random_mpo_mps(n, 2, R, R, 7);
    auto count = [&](Chain (*alg)(const MpoMps&, Dim)) {
      FlopCounter fc;
      FlopScope scope(fc);
      alg(p, R);
      return double(fc.total);
    };
    rs.push_back(R);
    zip.push_back(count(&mpo_mps_zipup));
    full.push_back(count(&mpo_mps_fullenv));
    dm.push_back(count(&mpo_mps_dm));
  }
  const double ez = slope(rs, zip), ef = slope(rs, full), ed = slope(rs, dm);
  const double secs = since(t0);
  const bool ok = std::abs(ed - 5) <= kSlopeTol && std::abs(ef - 6) <= kSlopeTol && std::abs(ez - 4) <= kSlopeTol;
  char buf[200];
  std::snprintf(buf, sizeof buf, "exponents dm %.2f (5), fullenv %.2f (6), zipup %.2f (4), +-%.1f, %.1f s (<= %.0f s)",
                ed, ef, ez, kSlopeTol, secs, kC3Seconds);
  return {ok && secs <= kC3Seconds, buf};
}

Outcome constrained_ordering() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  int bad = 0;
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + it % 8;
    ConstraintTree ct = testutil::random_constraint_tree(n, rng);
    std::vector<int> tau(n);
    std::iota(tau.begin(), tau.end(), 0);
    std::shuffle(tau.begin(), tau.end(), rng);
    std::vector<int> got = ordering_under_constraint(ct, tau);
    if (!ct.admits(got) || kendall_tau(got, tau) != testutil::brute_force_min_kt(ct, tau)) ++bad;
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d of 200 not optimal, %.2f s (<= %.0f s)", bad, secs, kC4Seconds);
  return {bad == 0 && secs <= kC4Seconds, buf};
}

Outcome hybrid_degeneration() {
  std::mt19937_64 rng(55);
  double worst = 0;
  int wrong_passes = 0;
  for (int it = 0; it < 20; ++it) {
    testutil::Spec s = testutil::random_spec(4 + it % 5, 2, 4 + it % 4, 3, rng);
    TensorNetwork g = testutil::build(s, rng);
    std::vector<Label> d = g.dangling();
    std::shuffle(d.begin(), d.end(), rng);
    std::vector<std::vector<Label>> sets;
    for (std::size_t i = 0; i < d.size(); i += 2) sets.emplace_back(d.begin() + i, d.begin() + std::min(d.size(), i + 2));
    std::vector<int> tau(sets.size()), id(sets.size());
    std::iota(tau.begin(), tau.end(), 0);
    std::iota(id.begin(), id.end(), 0);
    std::shuffle(tau.begin(), tau.end(), rng);
    const std::int64_t dist = kendall_tau(tau, id);
    const Ansatz a = it % 2 ? Ansatz::Comb : Ansatz::Mps;
    ApproxResult res = approx_tensor_network(g, sets, tau, 3, std::max<std::int64_t>(dist, 1) + it % 3, a);
    if (res.passes != 1) ++wrong_passes;
    TreeTensorNetwork single = density_matrix_alg(g, build_embedding_tree(sets, a), 3);
    worst = std::max(worst, rel_diff(single.net.contract(), res.tree.net.contract()));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst rel diff %.2e (<= %.0e), %d runs with more than one pass", worst, kHybridTol,
                wrong_passes);
  return {worst <= kHybridTol && wrong_passes == 0, buf};
}

Outcome environment_benefit() {
  const auto t0 = Clock::now();
  const std::vector<int> dims = {4, 4, 4};
  const double exact = ising_lattice_transfer_lnZ(dims, 0.3);
  std::map<int, std::vector<double>> errs;
  for (int p : {1, 2})
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ContractJob job;
      job.network = ising_network(64, lattice_edges(dims), 0.3);
      job.plan = lattice_plan(dims, p);
      job.chi = 16;
      job.ansatz = Ansatz::Mps;
      job.seed = seed;
      ContractResult r = partitioned_contract(job);
      errs[p].push_back(std::abs(r.log_abs - exact) / std::abs(exact));
    }
  const double m1 = median(errs[1]), m2 = median(errs[2]);
  const double secs = since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "median rel error p=2 %.3e vs p=1 %.3e, %.1f s (<= %.0f s)", m2, m1, secs, kC6Seconds);
  return {m2 <= m1 && secs <= kC6Seconds, buf};
}

// Fewest adjacent transpositions from a to b, by breadth-first search.
std::int64_t swap_distance(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::vector<int>, std::int64_t> seen{{a, 0}};
  std::queue<std::vector<int>> q;
  q.push(a);
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    if (v == b) return seen[v];
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      auto w = v;
      std::swap(w[i], w[i + 1]);
      if (seen.emplace(w, seen[v] + 1).second) q.push(w);
    }
  }
  return -1;
}

// Exhaustive minimum cut with E1 holders on one side and E2 holders on the other.
double brute_mincut(const TensorNetwork& g, const std::vector<Label>& e1, const std::vector<Label>& e2) {
  std::vector<int> ids = g.vertex_ids();
  const int n = ids.size();
  auto edges = g.edges();
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[ids[i]] = i;
  std::uint32_t in = 0, out = 0;
  for (Label l : e1) in |= 1u << pos[edges.at(l).u];
  for (Label l : e2) out |= 1u << pos[edges.at(l).u];
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if ((mask & in) != in || (mask & out)) continue;
    double w = 0;
    for (const auto& [l, e] : edges)
      if (!e.dangling() && ((mask >> pos[e.u]) & 1u) != ((mask >> pos[e.v]) & 1u)) w += std::log(double(e.size));
    best = std::min(best, w);
  }
  return best;
}

Outcome metric_and_mincut() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  int kt_bad = 0, cut_bad = 0;
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + it % 7;
    std::vector<int> a(n);
    std::iota(a.begin(), a.end(), 0);
    auto b = a, c = a;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    std::shuffle(c.begin(), c.end(), rng);
    const std::int64_t ab = kendall_tau(a, b), ba = kendall_tau(b, a);
    const bool ok = kendall_tau(a, a) == 0 && ab == ba && (ab == 0) == (a == b) &&
                    kendall_tau(a, c) <= ab + kendall_tau(b, c) && ab <= std::int64_t(n) * (n - 1) / 2 &&
                    ab == swap_distance(a, b);
    if (!ok) ++kt_bad;
  }
  for (int it = 0; it < 500; ++it) {
    const int n = 2 + it % 11;
    testutil::Spec s = testutil::random_spec(n, n, 0, 4, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int k1 = 1 + rng() % std::max(1, n / 2), k2 = 1 + rng() % std::max(1, n - k1);
    for (int i = 0; i < k1; ++i) s.open.emplace_back(perm[i], 2);
    for (int i = 0; i < k2; ++i) s.open.emplace_back(perm[k1 + i], 2);
    TensorNetwork g = testutil::build(s, rng);
    std::vector<Label> e1, e2;
    for (int i = 0; i < k1; ++i) e1.push_back(testutil::open_label(i));
    for (int i = 0; i < k2; ++i) e2.push_back(testutil::open_label(k1 + i));
    Cut c = mincut(g, e1, e2);
    if (std::abs(c.value - brute_mincut(g, e1, e2)) > 1e-9) ++cut_bad;
  }
  const double secs = since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d of 500 metric cases and %d of 500 cut cases failed, %.2f s (<= %.0f s)", kt_bad,
                cut_bad, secs, kC7Seconds);
  return {kt_bad == 0 && cut_bad == 0 && secs <= kC7Seconds, buf};
}

Outcome beta_zero() {
  struct Case {
    int n;
    EdgeList edges;
    PartitionedPlan plan;
  };
  std::vector<Case> cases;
  for (auto dims : std::vector<std::vector<int>>{{2, 2}, {4, 4}, {6, 6}, {3, 3, 3}, {4, 4, 4}})
    cases.push_back({lattice_size(dims), lattice_edges(dims), lattice_plan(dims, 1)});
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const int n = 10 + 10 * seed;
    TensorNetwork g = ising_network(n, random_regular_graph(n, 3, seed), 0.0);
    cases.push_back({n, random_regular_graph(n, 3, seed), ordering_plan(g, 2, seed)});
  }
  double worst = 0;
  for (const Case& c : cases) {
    ContractJob job;
    job.network = ising_network(c.n, c.edges, 0.0);
    job.plan = c.plan;
    job.chi = 4;
    ContractResult r = partitioned_contract(job);
    worst = std::max(worst, r.sign == 1 ? std::abs(r.log_abs - c.n * std::log(2.0)) : 1.0);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "worst |ln Z - |V| ln 2| %.2e (<= %.0e) over %zu graphs", worst, kBetaZeroTol,
                cases.size());
  return {worst <= kBetaZeroTol, buf};
}

}  // namespace

int main() {
  tune_allocator();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exactness on 4x4 Ising", exactness},
      {"density matrix vs canonical truncation", tree_truncation},
      {"MPO-MPS flop exponents", flop_scaling},
      {"constrained ordering optimality", constrained_ordering},
      {"hybrid degenerates to one pass", hybrid_degeneration},
      {"larger partitions help on 4x4x4 Ising", environment_benefit},
      {"Kendall-Tau properties and min-cut", metric_and_mincut},
      {"beta = 0 identity", beta_zero},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
