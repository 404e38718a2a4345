#pragma once

#include "ptn/tensor.hpp"

#include <cstdint>
#include <vector>

namespace ptn {

// A chain of site tensors; neighbors share exactly one label. MPO site k
// shares its input label(s) with MPS site k. Anything else is external.
struct MpoMps {
  std::vector<Tensor> mpo;
  std::vector<Tensor> mps;
};

using Chain = std::vector<Tensor>;

// Checks neighbor links and MPO/MPS pairing. Throws ShapeError.
void validate(const MpoMps& p);

// Left-to-right contraction, truncating with only the contracted prefix as environment.
Chain mpo_mps_zipup(const MpoMps& p, Dim chi);
// Exact product followed by canonicalization-based truncation rooted at the right end.
Chain mpo_mps_fullenv(const MpoMps& p, Dim chi);
// Cached right environments and a left-to-right density matrix sweep.
Chain mpo_mps_dm(const MpoMps& p, Dim chi);

Tensor contract_chain(const Chain& c);
Tensor exact_product(const MpoMps& p);

// Random instance: MPS of n sites, physical size s, rank r; MPO rank a.
// Boundary legs make every bond of the exact product full rank: the MPS
// carries dangling legs of size r at both ends, the MPO one of size a on
// the right. Entries uniform on [-1, 1].
MpoMps random_mpo_mps(int n, Dim s, Dim a, Dim r, std::uint64_t seed, bool boundary_legs = true);

// Identity operator on the MPS physical legs.
MpoMps with_identity_mpo(const Chain& mps, const std::vector<Label>& phys);

}  // namespace ptn
