#include "oracles/hamilton_hilbert.hpp"

namespace oracle {

namespace {

std::uint64_t gray(std::uint64_t i) { return i ^ (i >> 1); }

std::uint64_t gray_inverse(std::uint64_t g) {
  std::uint64_t i = g;
  for (unsigned j = 1; (g >> j) != 0; ++j) i ^= g >> j;
  return i;
}

unsigned trailing_ones(std::uint64_t i) {
  unsigned c = 0;
  while (i & 1) {
    i >>= 1;
    ++c;
  }
  return c;
}

std::uint64_t entry(std::uint64_t i) { return i == 0 ? 0 : gray(2 * ((i - 1) / 2)); }

unsigned direction(std::uint64_t i, unsigned n) {
  if (i == 0) return 0;
  if (i % 2 == 0) return trailing_ones(i - 1) % n;
  return trailing_ones(i) % n;
}

std::uint64_t rotr(std::uint64_t x, unsigned r, unsigned n) {
  r %= n;
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  if (r == 0) return x & mask;
  return ((x >> r) | (x << (n - r))) & mask;
}

std::uint64_t rotl(std::uint64_t x, unsigned r, unsigned n) { return rotr(x, n - (r % n), n); }

}  // namespace

std::uint64_t hamilton_index(const std::vector<std::uint32_t>& coords, unsigned eta) {
  const auto n = static_cast<unsigned>(coords.size());
  std::uint64_t h = 0, e = 0;
  unsigned d = 0;
  for (int i = static_cast<int>(eta) - 1; i >= 0; --i) {
    std::uint64_t l = 0;
    for (unsigned k = 0; k < n; ++k) l |= static_cast<std::uint64_t>((coords[k] >> i) & 1u) << k;
    l = rotr(l ^ e, d + 1, n);
    const std::uint64_t w = gray_inverse(l);
    e ^= rotl(entry(w), d + 1, n);
    d = (d + direction(w, n) + 1) % n;
    h = (h << n) | w;
  }
  return h;
}

}  // namespace oracle
