#include "koopsub/flops.hpp"

#include <algorithm>

namespace koopsub::flops {

namespace {
thread_local std::uint64_t g_total = 0;

std::uint64_t clamp_nonneg(double v) noexcept {
  return v <= 0.0 ? 0 : static_cast<std::uint64_t>(v);
}
}  // namespace

void add(std::uint64_t count) noexcept { g_total += count; }

std::uint64_t thread_total() noexcept { return g_total; }

std::uint64_t gemm(std::int64_t m, std::int64_t k, std::int64_t n) noexcept {
  return clamp_nonneg(2.0 * double(m) * double(k) * double(n));
}

std::uint64_t householder_qr(std::int64_t m, std::int64_t n) noexcept {
  const double mm = double(m), nn = double(std::min(m, n));
  return clamp_nonneg(2.0 * mm * nn * nn - 2.0 * nn * nn * nn / 3.0);
}

std::uint64_t svd(std::int64_t m, std::int64_t n, bool with_left) noexcept {
  // R-SVD operation counts; wide inputs are costed as their transpose.
  const double mm = double(std::max(m, n)), nn = double(std::min(m, n));
  if (with_left) return clamp_nonneg(6.0 * mm * nn * nn + 20.0 * nn * nn * nn);
  return clamp_nonneg(2.0 * mm * nn * nn + 11.0 * nn * nn * nn);
}

std::uint64_t eigen_general(std::int64_t n) noexcept {
  const double nn = double(n);
  return clamp_nonneg(25.0 * nn * nn * nn);
}

}  // namespace koopsub::flops
