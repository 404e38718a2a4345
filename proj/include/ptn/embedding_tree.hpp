#pragma once

#include "ptn/tensor.hpp"

#include <vector>

namespace ptn {

enum class Ansatz { Mps, Comb };

// Rooted binary tree whose leaves are dangling edges. Internal nodes become
// the tensors of the approximated network.
struct EmbeddingTree {
  struct Child {
    bool leaf = false;
    int index = -1;  // leaf: position in `leaves`; otherwise node id
  };
  struct Node {
    std::vector<Child> children;
    int parent = -1;
  };

  std::vector<Node> nodes;
  std::vector<Label> leaves;
  std::vector<int> leaf_parent;
  int root = -1;

  std::vector<int> postorder() const;  // internal nodes, children first
  std::vector<Label> leaves_under(int node) const;
  std::vector<Label> leaf_order() const;  // left-to-right
  std::vector<int> subtree(int node) const;  // internal nodes
  bool is_full_binary() const;
};

// Chains `order` into a maximally unbalanced tree: node 1 joins x1 and x2,
// node i joins node i-1 and x(i+1).
EmbeddingTree mps_tree(const std::vector<Label>& order);

// MPS ansatz: one chain over the concatenated edge orders. Comb ansatz: one
// chain per edge set, their roots chained in set order.
EmbeddingTree build_embedding_tree(const std::vector<std::vector<Label>>& ordered_sets, Ansatz ansatz);

}  // namespace ptn
