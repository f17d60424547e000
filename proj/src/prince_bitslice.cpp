#include <cstring>

#include "mirage/prince.hpp"

#if defined(__x86_64__)
#include <immintrin.h>
#endif

// Bitsliced PRINCE kernels. The state is 64 bit-planes; plane p holds bit p
// (LSB-indexed) of every block in the tile, so the S-layer becomes a boolean
// circuit over plane groups and the linear layer becomes plane XORs and a
// plane permutation. One uint64_t tile covers 64 blocks, one AVX2 tile 256.

namespace mirage::prince {

namespace {

constexpr uint64_t kRc[12] = {
    0x0000000000000000ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
    0x082efa98ec4e6c89ULL, 0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL,
    0x7ef84f78fd955cb1ULL, 0x85840851f1ac43aaULL, 0xc882d32f25323c54ULL,
    0x64a51195e0e3610dULL, 0xd3b5a399ca0c2399ULL, 0xc0ac29b7c97c50ddULL,
};

constexpr uint16_t kM0Rows[16] = {0x0888, 0x4044, 0x2202, 0x1110, 0x8880, 0x0444,
                                  0x2022, 0x1101, 0x8808, 0x4440, 0x0222, 0x1011,
                                  0x8088, 0x4404, 0x2220, 0x0111};
constexpr uint16_t kM1Rows[16] = {0x8880, 0x0444, 0x2022, 0x1101, 0x8808, 0x4440,
                                  0x0222, 0x1011, 0x8088, 0x4404, 0x2220, 0x0111,
                                  0x0888, 0x4044, 0x2202, 0x1110};
constexpr uint8_t kSr[16] = {0, 5, 10, 15, 4, 9, 14, 3, 8, 13, 2, 7, 12, 1, 6, 11};

struct LinearTables {
  // m_src[o][k]: the three input planes XORed into M' output plane o.
  uint8_t m_src[64][3];
  // Plane permutations for SR and SR^-1 as source indices: out[p] = in[src[p]].
  uint8_t sr_src[64];
  uint8_t sr_inv_src[64];
};

LinearTables build_linear_tables() {
  LinearTables t{};
  const uint16_t* mats[4] = {kM0Rows, kM1Rows, kM1Rows, kM0Rows};
  for (int chunk = 0; chunk < 4; ++chunk) {
    for (int r = 0; r < 16; ++r) {
      int o = 63 - (16 * chunk + r);  // LSB-indexed output plane
      int k = 0;
      for (int j = 0; j < 16; ++j) {
        if ((mats[chunk][r] >> (15 - j)) & 1) t.m_src[o][k++] = static_cast<uint8_t>(63 - (16 * chunk + j));
      }
    }
  }
  for (int i = 0; i < 16; ++i) {
    for (int b = 0; b < 4; ++b) {
      int dst = 63 - (4 * i + b);
      int src = 63 - (4 * kSr[i] + b);
      t.sr_src[dst] = static_cast<uint8_t>(src);
      t.sr_inv_src[src] = static_cast<uint8_t>(dst);
    }
  }
  return t;
}

const LinearTables& linear_tables() {
  static const LinearTables t = build_linear_tables();
  return t;
}

// 64x64 bit-matrix transpose in place (Hacker's Delight 7-3).
void transpose64(uint64_t a[64]) {
  uint64_t m = 0x00000000FFFFFFFFULL;
  for (int j = 32; j; j >>= 1, m ^= m << j) {
    for (int k = 0; k < 64; k = ((k | j) + 1) & ~j) {
      uint64_t t = (a[k] ^ (a[k | j] >> j)) & m;
      a[k] ^= t;
      a[k | j] ^= t << j;
    }
  }
}

// Boolean circuits for the PRINCE S-box and its inverse (from the algebraic
// normal form). Inputs x0..x3 are the nibble bits, LSB first.
template <class Ops, class W = typename Ops::word>
inline void sbox_planes(W& x0, W& x1, W& x2, W& x3, W ones) {
  const W a01 = Ops::and_(x0, x1), a02 = Ops::and_(x0, x2), a03 = Ops::and_(x0, x3);
  const W a12 = Ops::and_(x1, x2), a13 = Ops::and_(x1, x3), a23 = Ops::and_(x2, x3);
  const W a012 = Ops::and_(a01, x2), a013 = Ops::and_(a01, x3);
  const W a023 = Ops::and_(a02, x3), a123 = Ops::and_(a12, x3);
  const W y0 = Ops::xor_(Ops::xor_(Ops::xor_(a01, x2), Ops::xor_(a12, a012)),
                         Ops::xor_(Ops::xor_(x3, a03), Ops::xor_(a23, ones)));
  const W y1 = Ops::xor_(Ops::xor_(Ops::xor_(a02, a12), Ops::xor_(a012, a13)),
                         Ops::xor_(a123, ones));
  const W y2 = Ops::xor_(Ops::xor_(Ops::xor_(x0, a01), Ops::xor_(x3, a03)),
                         Ops::xor_(Ops::xor_(a13, a013), a123));
  const W y3 = Ops::xor_(Ops::xor_(Ops::xor_(x1, a12), Ops::xor_(a012, x3)),
                         Ops::xor_(Ops::xor_(a013, a23), Ops::xor_(a023, ones)));
  x0 = y0; x1 = y1; x2 = y2; x3 = y3;
}

template <class Ops, class W = typename Ops::word>
inline void sbox_inv_planes(W& x0, W& x1, W& x2, W& x3, W ones) {
  const W a01 = Ops::and_(x0, x1), a02 = Ops::and_(x0, x2);
  const W a12 = Ops::and_(x1, x2), a13 = Ops::and_(x1, x3), a23 = Ops::and_(x2, x3);
  const W a012 = Ops::and_(a01, x2), a013 = Ops::and_(a01, x3);
  const W a023 = Ops::and_(a02, x3), a123 = Ops::and_(a12, x3);
  const W y0 = Ops::xor_(Ops::xor_(Ops::xor_(a01, a12), Ops::xor_(x3, a013)),
                         Ops::xor_(Ops::xor_(a23, a023), ones));
  const W y1 = Ops::xor_(Ops::xor_(Ops::xor_(a02, a12), Ops::xor_(a012, a13)),
                         Ops::xor_(a23, ones));
  const W y2 = Ops::xor_(Ops::xor_(Ops::xor_(x0, a01), Ops::xor_(x2, a02)),
                         Ops::xor_(Ops::xor_(a12, a012), Ops::xor_(a13, a013)));
  const W y3 = Ops::xor_(Ops::xor_(Ops::xor_(x0, x1), Ops::xor_(a01, a02)),
                         Ops::xor_(Ops::xor_(a12, a012), Ops::xor_(Ops::xor_(a23, a023), Ops::xor_(a123, ones))));
  x0 = y0; x1 = y1; x2 = y2; x3 = y3;
}

template <class Ops, class W = typename Ops::word>
inline void s_layer(W s[64], W ones, bool inverse) {
  for (int g = 0; g < 64; g += 4) {
    if (inverse)
      sbox_inv_planes<Ops>(s[g], s[g + 1], s[g + 2], s[g + 3], ones);
    else
      sbox_planes<Ops>(s[g], s[g + 1], s[g + 2], s[g + 3], ones);
  }
}

template <class Ops, class W = typename Ops::word>
inline void xor_round_key(W s[64], uint64_t bits, W ones) {
  for (int p = 0; p < 64; ++p) {
    if ((bits >> p) & 1) s[p] = Ops::xor_(s[p], ones);
  }
}

// One bitsliced PRINCE core over 64 planes. k0 whitening is handled by the
// callers in the un-sliced domain.
template <class Ops, class W = typename Ops::word>
void core_planes(W s[64], uint64_t k1) {
  const LinearTables& lt = linear_tables();
  const W ones = Ops::ones();
  W tmp[64];

  xor_round_key<Ops>(s, k1 ^ kRc[0], ones);
  for (int r = 1; r <= 5; ++r) {
    s_layer<Ops>(s, ones, false);
    for (int o = 0; o < 64; ++o) {
      const auto& m = lt.m_src[o];
      tmp[o] = Ops::xor_(Ops::xor_(s[m[0]], s[m[1]]), s[m[2]]);
    }
    for (int p = 0; p < 64; ++p) s[p] = tmp[lt.sr_src[p]];
    xor_round_key<Ops>(s, k1 ^ kRc[r], ones);
  }
  s_layer<Ops>(s, ones, false);
  for (int o = 0; o < 64; ++o) {
    const auto& m = lt.m_src[o];
    tmp[o] = Ops::xor_(Ops::xor_(s[m[0]], s[m[1]]), s[m[2]]);
  }
  std::memcpy(s, tmp, sizeof(tmp));
  s_layer<Ops>(s, ones, true);
  for (int r = 6; r <= 10; ++r) {
    xor_round_key<Ops>(s, k1 ^ kRc[r], ones);
    for (int o = 0; o < 64; ++o) {
      const auto& m = lt.m_src[o];
      tmp[o] = Ops::xor_(Ops::xor_(s[lt.sr_inv_src[m[0]]], s[lt.sr_inv_src[m[1]]]),
                         s[lt.sr_inv_src[m[2]]]);
    }
    std::memcpy(s, tmp, sizeof(tmp));
    s_layer<Ops>(s, ones, true);
  }
  xor_round_key<Ops>(s, k1 ^ kRc[11], ones);
}

struct OpsU64 {
  using word = uint64_t;
  static word xor_(word a, word b) { return a ^ b; }
  static word and_(word a, word b) { return a & b; }
  static word ones() { return ~uint64_t{0}; }
};

uint64_t whiten_out_key(uint64_t k0) {
  return ((k0 >> 1) | (k0 << 63)) ^ (k0 >> 63);
}

// Encrypts exactly 64 blocks.
void tile64(const uint64_t* in, uint64_t* out, uint64_t k0, uint64_t k1) {
  uint64_t planes[64];
  for (int i = 0; i < 64; ++i) planes[i] = in[i] ^ k0;
  transpose64(planes);
  core_planes<OpsU64>(planes, k1);
  transpose64(planes);
  const uint64_t k0p = whiten_out_key(k0);
  for (int i = 0; i < 64; ++i) out[i] = planes[i] ^ k0p;
}

#if defined(__x86_64__)

struct OpsAvx2 {
  using word = __m256i;
  __attribute__((target("avx2"))) static word xor_(word a, word b) {
    return _mm256_xor_si256(a, b);
  }
  __attribute__((target("avx2"))) static word and_(word a, word b) {
    return _mm256_and_si256(a, b);
  }
  __attribute__((target("avx2"))) static word ones() {
    return _mm256_set1_epi64x(-1);
  }
};

// Encrypts exactly 256 blocks: four 64-block groups sliced into shared planes.
__attribute__((target("avx2"))) void tile256(const uint64_t* in, uint64_t* out,
                                             uint64_t k0, uint64_t k1) {
  uint64_t g[4][64];
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 64; ++i) g[j][i] = in[64 * j + i] ^ k0;
    transpose64(g[j]);
  }
  __m256i planes[64];
  for (int p = 0; p < 64; ++p)
    planes[p] = _mm256_set_epi64x(static_cast<long long>(g[3][p]), static_cast<long long>(g[2][p]),
                                  static_cast<long long>(g[1][p]), static_cast<long long>(g[0][p]));
  core_planes<OpsAvx2>(planes, k1);
  alignas(32) uint64_t lanes[4];
  for (int p = 0; p < 64; ++p) {
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), planes[p]);
    g[0][p] = lanes[0];
    g[1][p] = lanes[1];
    g[2][p] = lanes[2];
    g[3][p] = lanes[3];
  }
  const uint64_t k0p = whiten_out_key(k0);
  for (int j = 0; j < 4; ++j) {
    transpose64(g[j]);
    for (int i = 0; i < 64; ++i) out[64 * j + i] = g[j][i] ^ k0p;
  }
}

#endif  // __x86_64__

}  // namespace

namespace detail {

void encrypt_batch_bitslice64(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0,
                              uint64_t k1) {
  size_t i = 0;
  for (; i + 64 <= n; i += 64) tile64(in + i, out + i, k0, k1);
  if (i < n) encrypt_batch_reference(in + i, out + i, n - i, k0, k1);
}

bool avx2_supported() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

void encrypt_batch_avx2(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0,
                        uint64_t k1) {
#if defined(__x86_64__)
  size_t i = 0;
  for (; i + 256 <= n; i += 256) tile256(in + i, out + i, k0, k1);
  encrypt_batch_bitslice64(in + i, out + i, n - i, k0, k1);
#else
  encrypt_batch_bitslice64(in, out, n, k0, k1);
#endif
}

}  // namespace detail

Impl active_impl() {
  static const Impl impl = detail::avx2_supported() ? Impl::BitsliceAvx2 : Impl::Bitslice64;
  return impl;
}

void encrypt_batch(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0, uint64_t k1) {
  if (n < 64) {
    detail::encrypt_batch_reference(in, out, n, k0, k1);
    return;
  }
  switch (active_impl()) {
    case Impl::BitsliceAvx2: detail::encrypt_batch_avx2(in, out, n, k0, k1); break;
    case Impl::Bitslice64: detail::encrypt_batch_bitslice64(in, out, n, k0, k1); break;
    case Impl::Reference: detail::encrypt_batch_reference(in, out, n, k0, k1); break;
  }
}

}  // namespace mirage::prince
