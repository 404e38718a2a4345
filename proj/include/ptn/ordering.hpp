#pragma once

#include "ptn/embedding_tree.hpp"

#include <cstdint>
#include <vector>

namespace ptn {

// Number of discordant pairs between two orderings of the same set.
std::int64_t kendall_tau(const std::vector<int>& sigma, const std::vector<int>& tau);

// Tree over edge-set indices 0..n-1. Children of an internal node must be
// contiguous in any admissible ordering; an ordered node also fixes the
// children's sequence up to reversal.
struct ConstraintTree {
  struct Node {
    std::vector<int> children;
    bool ordered = false;
    int leaf = -1;  // set index for leaves
  };
  std::vector<Node> nodes;
  int root = -1;
  int num_leaves = 0;

  std::vector<int> leaves_of(int node) const;
  bool admits(const std::vector<int>& ordering) const;
};

// One future contraction: the edge sets it consumes directly and the indices
// of earlier steps whose partitions are adjacent to this one.
struct ConstraintStep {
  std::vector<int> direct;
  std::vector<int> prior;
};

ConstraintTree build_constraint_tree(int num_sets, const std::vector<ConstraintStep>& steps);

constexpr int kMaxEnumeratedChildren = 8;

// Admissible ordering closest to tau in Kendall-Tau distance.
std::vector<int> ordering_under_constraint(const ConstraintTree& ct, const std::vector<int>& tau);

// Waypoints of a bubble-sort path from tau to sigma, every r-th swap, ending
// at sigma. Always at least one waypoint.
std::vector<std::vector<int>> interval_orderings(const std::vector<int>& tau, const std::vector<int>& sigma,
                                                 std::int64_t r);

}  // namespace ptn
