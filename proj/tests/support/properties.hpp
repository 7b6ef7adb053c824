#pragma once

#include <cstdint>
#include <string>

// Randomized property suites on planted data (N_d <= 8, N <= 60). Each suite
// runs `cases` independent cases derived from `seed` and reports how many
// violated the property.
namespace koopsub::testing {

struct PropertyOutcome {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void fail(int c, const std::string& what) {
    if (failures++ == 0) first_failure = "case " + std::to_string(c) + ": " + what;
  }
};

// Every agent iterate is zero or has full column rank, and its local data
// satisfies R(DX_i C) = R(DY_i C).
PropertyOutcome iterate_invariants(int cases, std::uint64_t seed);

// R(C_k^i) ⊆ R(C_{k-1}^j) for j = i and every in-neighbor j at round k.
PropertyOutcome iterate_monotonicity(int cases, std::uint64_t seed);

// The union-data SSD subspace lies in every agent iterate at every round.
PropertyOutcome oracle_inclusion(int cases, std::uint64_t seed);

// Adding rows can only shrink the SSD subspace.
PropertyOutcome data_addition_monotonicity(int cases, std::uint64_t seed);

// SSD recovers every planted eigenvector with its eigenvalue, and the
// eigenpairs of the reduced operator evolve linearly on the data.
PropertyOutcome planted_eigenvector_recovery(int cases, std::uint64_t seed);

}  // namespace koopsub::testing
