#pragma once

#include "ptn/embedding_tree.hpp"
#include "ptn/network.hpp"
#include "ptn/treeapprox.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace ptn {

constexpr Dim kNoTruncation = Dim(1) << 40;

// Vertex partitioning plus a binary contraction tree over the partitions.
// Tree nodes 0..N-1 are the partitions; node N+i merges merges[i], and every
// merge only refers to earlier nodes. The last merge is the root.
struct PartitionedPlan {
  std::vector<std::vector<int>> parts;
  std::vector<std::array<int, 2>> merges;

  int num_nodes() const { return static_cast<int>(parts.size() + merges.size()); }
  int root() const { return num_nodes() - 1; }
};

// Throws unless the partitions cover the network's vertices exactly once and
// the merges form one binary tree.
void validate_plan(const TensorNetwork& g, const PartitionedPlan& plan);

// Merges parts in order: ((P0 P1) P2) ...
PartitionedPlan sequential_plan(std::vector<std::vector<int>> parts);

// Exchanges the physical legs of MPS sites `site` and `site + 1`. The chain is
// canonicalized around the pair first; the new bond keeps at most gamma values.
std::vector<Tensor> swap_adjacent(const std::vector<Tensor>& mps, int site, Dim gamma);

struct ApproxResult {
  TreeTensorNetwork tree;
  int passes = 0;
  std::int64_t distance = 0;   // Kendall-Tau distance between reference and target set orders
  std::vector<std::vector<int>> waypoints;
  double analysis_seconds = 0;
};

// Approximates g into an embedding tree whose edge sets appear in the given
// order. Each set is listed in its own edge order. Reorders in batches of r
// adjacent set swaps, one density matrix pass per batch.
ApproxResult approx_tensor_network(const TensorNetwork& g, const std::vector<std::vector<Label>>& sets, Dim chi,
                                   std::int64_t r, Ansatz ansatz, std::uint64_t seed = 0);

// Same, with the reference ordering given as a permutation of set indices.
ApproxResult approx_tensor_network(const TensorNetwork& g, const std::vector<std::vector<Label>>& sets,
                                   const std::vector<int>& tau, Dim chi, std::int64_t r, Ansatz ansatz);

struct ContractJob {
  TensorNetwork network;
  PartitionedPlan plan;
  Ansatz ansatz = Ansatz::Mps;
  Dim chi = 16;
  std::int64_t swap_batch = 1;
  std::uint64_t seed = 0;
};

struct StepInfo {
  int node = -1;
  int num_sets = 0;
  int passes = 0;
  std::int64_t distance = 0;
  Dim max_bond = 0;
  std::uint64_t flops = 0;
};

struct ContractResult {
  bool closed = true;
  int sign = 1;           // closed networks: value = sign * exp(log_abs)
  double log_abs = 0;
  TreeTensorNetwork tree; // open networks: value = exp(log_abs) * tree
  std::uint64_t flops = 0;
  double seconds = 0;           // numeric work only
  double analysis_seconds = 0;  // orderings and embeddings
  std::vector<StepInfo> steps;
};

ContractResult partitioned_contract(const ContractJob& job);

}  // namespace ptn
