#pragma once

#include "ptn/embedding_tree.hpp"
#include "ptn/io.hpp"
#include "ptn/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ptn {

struct JobConfig {
  std::string model = "ising";  // ising | random | file
  std::string graph = "lattice";  // lattice | regular (ignored for file)
  std::vector<int> dims = {4, 4};
  int regular_n = 16;
  int regular_degree = 3;
  double beta = 0.44;
  double alpha = 0.0;
  Dim bond = 2;  // mode size of the random model
  std::string file;
  Ansatz ansatz = Ansatz::Mps;
  Dim chi = 16;
  int partition_size = 1;
  std::int64_t swap_batch = 1;
  std::uint64_t seed = 0;
  bool oracle = false;
};

// Throws Error on missing or out-of-range fields.
void validate_config(const JobConfig& c);

TensorNetwork build_network(const JobConfig& c);
PartitionedPlan build_plan(const JobConfig& c, const TensorNetwork& g);

// Exact ln Z when some oracle can afford it.
std::optional<double> oracle_lnZ(const JobConfig& c, const TensorNetwork& g);

Report run_job(const JobConfig& c);

// Keeps freed blocks in the heap instead of returning them to the OS; large
// temporaries are allocated and dropped many times per density matrix pass.
// No effect outside glibc.
void tune_allocator();

}  // namespace ptn
