#pragma once

#include "ptn/embedding.hpp"
#include "ptn/embedding_tree.hpp"
#include "ptn/network.hpp"

#include <map>
#include <utility>
#include <vector>

namespace ptn {

// Tensor network whose contracted edges form a tree, with a designated root.
struct TreeTensorNetwork {
  TensorNetwork net;
  int root = -1;
};

// Neighbor lists of the contracted-edge graph. Throws unless it is a tree.
std::map<int, std::vector<int>> tree_neighbors(const TensorNetwork& g);
std::map<int, int> tree_parents(const TreeTensorNetwork& t);  // root maps to -1
std::vector<int> tree_postorder(const TreeTensorNetwork& t);  // root last
std::vector<Label> shared_labels(const Tensor& a, const Tensor& b);

// True when the tensor, matricized with `toward` as columns, has orthonormal columns.
bool is_orthogonal(const Tensor& t, const std::vector<Label>& toward, double tol = 1e-10);

struct CanonicalForm {
  TreeTensorNetwork t;
  int core = -1;  // new vertex between u and v
  Matrix r;       // rows: bond to u, columns: bond to v
};

// Orthogonalizes every tensor on u's side toward the edge (u, v) and inserts
// the non-orthogonal remainder as a new vertex on that edge.
CanonicalForm canonical_form(const TreeTensorNetwork& t, int u, int v);

// Truncates every bond to at most chi by post-order canonicalization.
TreeTensorNetwork truncate_tree_canonical(const TreeTensorNetwork& t, Dim chi);

struct DensityMatrix {
  Matrix m;
  std::vector<Label> labels;  // row order; columns are their bra copies
  std::vector<Dim> dims;
};

// Density matrix of tree node v on the embedded network. z < 0 opens the
// dangling edges held at v; otherwise the edges between v's side and z's.
DensityMatrix density_matrix(const Embedding& e, const EmbeddingTree& t, int v, int z);

struct DmStats {
  int dm_branch = 0;
  int qr_branch = 0;
  int cache_hits = 0;
  std::map<std::pair<int, int>, int> computed;  // per directed tree edge
  int identities = 0;
  double embed_seconds = 0;
};

// Approximates g by a tree tensor network shaped like t with bonds <= chi.
// Output vertex ids are tree node indices.
TreeTensorNetwork density_matrix_alg(const TensorNetwork& g, const EmbeddingTree& t, Dim chi,
                                     DmStats* stats = nullptr);

}  // namespace ptn
