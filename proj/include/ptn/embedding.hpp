#pragma once

#include "ptn/embedding_tree.hpp"
#include "ptn/network.hpp"

#include <map>

namespace ptn {

// Placement of network vertices onto internal nodes of an embedding tree.
struct Embedding {
  TensorNetwork g;          // input plus any inserted identity vertices
  std::map<int, int> phi;   // vertex id -> tree node
  int identities = 0;       // number of inserted vertices
};

// Recursive min-cut bisection. Afterwards every dangling edge is held by a
// vertex mapped to the edge's parent node, and every tree node is nonempty;
// identity matrices are spliced in where needed.
Embedding tree_embedding(const TensorNetwork& g, const EmbeddingTree& t);

}  // namespace ptn
