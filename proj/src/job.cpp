#include "ptn/job.hpp"

#include <cmath>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace ptn {

namespace {

bool lattice_model(const JobConfig& c) { return c.model != "file" && c.graph == "lattice"; }

int num_vertices(const JobConfig& c) { return c.graph == "lattice" ? lattice_size(c.dims) : c.regular_n; }

EdgeList graph_edges(const JobConfig& c) {
  return c.graph == "lattice" ? lattice_edges(c.dims) : random_regular_graph(c.regular_n, c.regular_degree, c.seed);
}

}  // namespace

void validate_config(const JobConfig& c) {
  if (c.model != "ising" && c.model != "random" && c.model != "file") throw Error("model must be ising, random or file");
  if (c.model == "file" && c.file.empty()) throw Error("model file needs a network file");
  if (c.model != "file") {
    if (c.graph != "lattice" && c.graph != "regular") throw Error("graph must be lattice or regular");
    if (c.graph == "lattice") lattice_size(c.dims);
    if (c.graph == "regular" && (c.regular_n < 1 || c.regular_degree < 0))
      throw Error("regular graph needs n >= 1 and degree >= 0");
  }
  if (c.model == "ising" && c.beta < 0) throw Error("beta must be nonnegative");
  if (c.model == "random" && (c.alpha < -1 || c.alpha > 0)) throw Error("alpha must lie in [-1, 0]");
  if (c.bond < 1) throw Error("bond size must be positive");
  if (c.chi < 1) throw Error("chi must be positive");
  if (c.partition_size < 1) throw Error("partition size must be positive");
  if (c.swap_batch < 1) throw Error("swap batch must be positive");
}

TensorNetwork build_network(const JobConfig& c) {
  if (c.model == "file") return load_network(c.file);
  EdgeList edges = graph_edges(c);
  if (c.model == "ising") return ising_network(num_vertices(c), edges, c.beta);
  return random_network(num_vertices(c), edges, c.bond, c.alpha, c.seed);
}

PartitionedPlan build_plan(const JobConfig& c, const TensorNetwork& g) {
  if (lattice_model(c)) return lattice_plan(c.dims, c.partition_size);
  return ordering_plan(g, c.partition_size, c.seed);
}

std::optional<double> oracle_lnZ(const JobConfig& c, const TensorNetwork& g) {
  if (!g.dangling().empty()) return std::nullopt;
  if (c.model == "ising") {
    const int n = num_vertices(c);
    if (n <= 24) return ising_spin_sum_lnZ(n, graph_edges(c), c.beta);
    if (lattice_model(c) && n / c.dims.back() <= 20) return ising_lattice_transfer_lnZ(c.dims, c.beta);
  }
  std::uint64_t states = 1;
  for (const auto& [l, e] : g.edges()) {
    states *= e.size;
    if (states > kMaxBruteForceStates) return std::nullopt;
  }
  LogValue v = brute_force_lnZ(g);
  if (v.sign < 0) return std::nullopt;
  return v.log_abs;
}

Report run_job(const JobConfig& c) {
  validate_config(c);
  TensorNetwork g = build_network(c);
  ContractJob job;
  job.network = g;
  job.plan = build_plan(c, g);
  job.ansatz = c.ansatz;
  job.chi = c.chi;
  job.swap_batch = c.swap_batch;
  job.seed = c.seed;
  ContractResult res = partitioned_contract(job);

  Report r;
  r.model = c.model;
  if (c.model != "file") r.dims = c.graph == "lattice" ? c.dims : std::vector<int>{c.regular_n, c.regular_degree};
  r.beta = c.beta;
  r.alpha = c.alpha;
  r.ansatz = c.ansatz == Ansatz::Mps ? "mps" : "comb";
  r.chi = c.chi;
  r.partition_size = c.partition_size;
  r.swap_batch = c.swap_batch;
  r.seed = c.seed;
  r.closed = res.closed;
  r.sign = res.sign;
  r.ln_z = res.log_abs;
  r.flops = res.flops;
  r.seconds = res.seconds;
  r.analysis_seconds = res.analysis_seconds;
  if (c.oracle && res.closed) {
    if (auto exact = oracle_lnZ(c, g)) r.rel_error = std::abs(res.log_abs - *exact) / std::abs(*exact);
  }
  return r;
}

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_MAX, 0);
  mallopt(M_TRIM_THRESHOLD, -1);
#endif
}

}  // namespace ptn
