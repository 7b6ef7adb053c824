#pragma once

#include <cstdint>

// Floating point operation tallies.
//
// Every dense kernel in linalg adds a model operation count for the work it
// performs to a per-thread counter. Callers bracket a computation with a
// FlopScope to obtain the tally for that computation alone, which is how the
// parallel runner attributes work to individual agents and rounds.
namespace koopsub::flops {

void add(std::uint64_t count) noexcept;

// Running total for the calling thread.
std::uint64_t thread_total() noexcept;

// Model counts (Golub & Van Loan conventions) used by the kernels.
std::uint64_t gemm(std::int64_t m, std::int64_t k, std::int64_t n) noexcept;
std::uint64_t householder_qr(std::int64_t m, std::int64_t n) noexcept;
// Thin SVD of an m x n matrix (m >= n) producing singular values and V, plus
// U when `with_left` is set.
std::uint64_t svd(std::int64_t m, std::int64_t n, bool with_left) noexcept;
std::uint64_t eigen_general(std::int64_t n) noexcept;

class FlopScope {
 public:
  FlopScope() noexcept : start_(thread_total()) {}
  std::uint64_t elapsed() const noexcept { return thread_total() - start_; }

 private:
  std::uint64_t start_;
};

}  // namespace koopsub::flops
