#include "thetajoin/hilbert.hpp"

#include <array>

#include "thetajoin/errors.hpp"

namespace thetajoin {

namespace {

constexpr std::size_t kMaxDims = 62;

void check_shape(std::size_t dims, unsigned eta) {
  if (dims == 0 || eta == 0 || eta > 31 || dims * eta > 62)
    throw ParameterError("hilbert: need dims >= 1, eta >= 1, dims*eta <= 62");
}

}  // namespace

std::uint64_t hilbert_index(std::span<const std::uint32_t> coords, unsigned eta) {
  const std::size_t n = coords.size();
  check_shape(n, eta);
  std::array<std::uint32_t, kMaxDims> x{};
  for (std::size_t i = 0; i < n; ++i) {
    if (coords[i] >> eta) throw ParameterError("hilbert: coordinate out of range");
    x[i] = coords[i];
  }

  const std::uint32_t top = 1u << (eta - 1);
  // Inverse undo of the per-level reflections and exchanges.
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    const std::uint32_t p = q - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  // Gray encode.
  for (std::size_t i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t q = top; q > 1; q >>= 1)
    if (x[n - 1] & q) t ^= q - 1;
  for (std::size_t i = 0; i < n; ++i) x[i] ^= t;

  // Interleave the transposed bits, most significant level first.
  std::uint64_t h = 0;
  for (int level = static_cast<int>(eta) - 1; level >= 0; --level)
    for (std::size_t i = 0; i < n; ++i) h = (h << 1) | ((x[i] >> level) & 1u);
  return h;
}

void hilbert_coords(std::uint64_t index, unsigned eta, std::span<std::uint32_t> out) {
  const std::size_t n = out.size();
  check_shape(n, eta);
  if (n * eta < 64 && (index >> (n * eta)) != 0) throw ParameterError("hilbert: index out of range");

  std::array<std::uint32_t, kMaxDims> x{};
  int bit = static_cast<int>(n * eta) - 1;
  for (int level = static_cast<int>(eta) - 1; level >= 0; --level)
    for (std::size_t i = 0; i < n; ++i, --bit) x[i] |= static_cast<std::uint32_t>((index >> bit) & 1u) << level;

  // Gray decode.
  std::uint32_t t = x[n - 1] >> 1;
  for (std::size_t i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
  x[0] ^= t;
  // Undo excess work.
  const std::uint64_t limit = std::uint64_t{2} << (eta - 1);
  for (std::uint64_t q = 2; q != limit; q <<= 1) {
    const auto p = static_cast<std::uint32_t>(q - 1);
    for (std::size_t i = n; i-- > 0;) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint32_t s = (x[0] ^ x[i]) & p;
        x[0] ^= s;
        x[i] ^= s;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i];
}

}  // namespace thetajoin
