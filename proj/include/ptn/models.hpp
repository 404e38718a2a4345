#pragma once

#include "ptn/engine.hpp"
#include "ptn/network.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ptn {

using EdgeList = std::vector<std::pair<int, int>>;

// Open-boundary lattice; vertex ids are row-major indices, edge i gets label i.
EdgeList lattice_edges(const std::vector<int>& dims);
int lattice_size(const std::vector<int>& dims);

// Simple d-regular graph on n vertices: configuration model with rejection.
EdgeList random_regular_graph(int n, int degree, std::uint64_t seed);

// 2x2 factor with W W^T = [[e^b, e^-b], [e^-b, e^b]].
Matrix ising_w(double beta);

// Closed network whose contraction is the partition function.
TensorNetwork ising_network(int num_vertices, const EdgeList& edges, double beta);

// Closed network with i.i.d. entries uniform on [alpha, 1], every mode of size s.
TensorNetwork random_network(int num_vertices, const EdgeList& edges, Dim s, double alpha, std::uint64_t seed);

struct LogValue {
  int sign = 1;
  double log_abs = 0;
};

constexpr std::uint64_t kMaxBruteForceStates = std::uint64_t(1) << 24;

// Explicit sum over every assignment of the contracted edges. Refuses
// networks with dangling edges or more than 2^24 assignments.
LogValue brute_force_lnZ(const TensorNetwork& g);

// Direct sum over spin configurations, at most 24 spins.
double ising_spin_sum_lnZ(int num_vertices, const EdgeList& edges, double beta);

// Exact ln Z of a 3D open-boundary Ising lattice by slice transfer, up to 20
// spins per slice (the first two dims).
double ising_lattice_transfer_lnZ(const std::vector<int>& dims, double beta);

// Partitions of p consecutive sites along last-axis fibers, fiber by fiber,
// merged sequentially.
PartitionedPlan lattice_plan(const std::vector<int>& dims, int p);

// Recursive-bisection vertex order cut into chunks of p, merged sequentially.
PartitionedPlan ordering_plan(const TensorNetwork& g, int p, std::uint64_t seed = 0);

}  // namespace ptn
