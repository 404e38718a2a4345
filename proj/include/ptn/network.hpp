#pragma once

#include "ptn/tensor.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace ptn {

struct EdgeInfo {
  Label label = 0;
  Dim size = 1;
  int u = -1;
  int v = -1;  // -1 when dangling
  bool dangling() const { return v < 0; }
};

// Undirected multigraph of tensors. A label shared by two tensors is a
// contracted edge; a label held by one tensor is dangling.
class TensorNetwork {
 public:
  int add(Tensor t);
  void put(int id, Tensor t);
  void remove(int id);
  bool contains(int id) const { return tensors_.count(id) > 0; }

  const std::map<int, Tensor>& tensors() const { return tensors_; }
  const Tensor& at(int id) const;
  Tensor& at(int id);
  std::vector<int> vertex_ids() const;
  std::size_t num_vertices() const { return tensors_.size(); }
  int next_id() const { return next_id_; }

  std::map<Label, EdgeInfo> edges() const;  // validates
  std::vector<Label> dangling() const;      // in vertex then mode order
  TensorNetwork induced(const std::vector<int>& ids) const;
  void validate() const;
  Tensor contract() const;  // greedy full contraction

 private:
  std::map<int, Tensor> tensors_;
  int next_id_ = 0;
};

// Disjoint union; vertex ids of b are shifted past a's.
TensorNetwork merge(const TensorNetwork& a, const TensorNetwork& b);

double edge_weight_sum(const std::vector<Dim>& sizes);
double edge_weight_sum(const TensorNetwork& g, const std::vector<Label>& edges);

// Weighted graph over a subset of a network's vertices. Edges leaving the
// subset are treated as dangling.
struct Graph {
  std::vector<int> ids;                       // index -> vertex id
  std::map<int, int> index;                   // vertex id -> index
  std::vector<std::vector<double>> w;         // aggregated edge weights
  std::map<Label, std::pair<int, int>> ends;  // label -> (index, index or -1)
  std::map<Label, Dim> size;
};
Graph graph_of(const TensorNetwork& g, const std::vector<int>& ids);
Graph graph_of(const TensorNetwork& g);

struct Cut {
  double value = 0;           // weight of real edges crossing the cut
  std::vector<int> left;      // vertex ids on the E1 side
  std::vector<int> right;
};

// Minimum cut separating the vertices holding E1 from those holding E2.
// Among minimum cuts, returns the one with the smallest E1 side.
Cut mincut(const TensorNetwork& g, const std::vector<int>& ids, const std::vector<Label>& e1,
           const std::vector<Label>& e2);
Cut mincut(const TensorNetwork& g, const std::vector<Label>& e1, const std::vector<Label>& e2);

constexpr int kExhaustiveBisection = 16;

// Recursive balanced bisection ordering of the given vertices (ids).
std::vector<int> linear_ordering(const TensorNetwork& g, const std::vector<int>& ids, std::uint64_t seed = 0);
std::vector<int> linear_ordering(const Graph& gr, std::uint64_t seed = 0);  // returns indices

// Orders edge sets by the minimum rank of their attachment vertices.
// Returns a permutation of set indices.
std::vector<int> order_edge_sets(const TensorNetwork& g, const std::vector<int>& ids,
                                 const std::vector<std::vector<Label>>& sets, std::uint64_t seed = 0);

}  // namespace ptn
