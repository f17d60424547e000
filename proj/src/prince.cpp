#include "mirage/prince.hpp"

#include <array>

namespace mirage::prince {

namespace {

// Round constants; RC[i] ^ RC[11-i] == alpha (the reflection property).
constexpr uint64_t kRc[12] = {
    0x0000000000000000ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
    0x082efa98ec4e6c89ULL, 0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL,
    0x7ef84f78fd955cb1ULL, 0x85840851f1ac43aaULL, 0xc882d32f25323c54ULL,
    0x64a51195e0e3610dULL, 0xd3b5a399ca0c2399ULL, 0xc0ac29b7c97c50ddULL,
};

constexpr uint8_t kSbox[16] = {0xB, 0xF, 0x3, 0x2, 0xA, 0xC, 0x9, 0x1,
                               0x6, 0x7, 0x8, 0x0, 0xE, 0x5, 0xD, 0x4};
constexpr uint8_t kSboxInv[16] = {0xB, 0x7, 0x3, 0x2, 0xF, 0xD, 0x8, 0x9,
                                  0xA, 0x6, 0x4, 0x0, 0x5, 0xE, 0xC, 0x1};

// Nibble shuffle SR (nibble 0 = most significant): out[i] = in[kSr[i]].
constexpr uint8_t kSr[16] = {0, 5, 10, 15, 4, 9, 14, 3, 8, 13, 2, 7, 12, 1, 6, 11};
constexpr uint8_t kSrInv[16] = {0, 13, 10, 7, 4, 1, 14, 11, 8, 5, 2, 15, 12, 9, 6, 3};

// M' acts chunk-wise on the four 16-bit chunks with the involutive matrices
// M^(0) and M^(1), arranged diag(M0, M1, M1, M0). Rows are bit masks with
// bit 15 = most significant bit of the chunk.
constexpr uint16_t kM0Rows[16] = {0x0888, 0x4044, 0x2202, 0x1110, 0x8880, 0x0444,
                                  0x2022, 0x1101, 0x8808, 0x4440, 0x0222, 0x1011,
                                  0x8088, 0x4404, 0x2220, 0x0111};
constexpr uint16_t kM1Rows[16] = {0x8880, 0x0444, 0x2022, 0x1101, 0x8808, 0x4440,
                                  0x0222, 0x1011, 0x8088, 0x4404, 0x2220, 0x0111,
                                  0x0888, 0x4044, 0x2202, 0x1110};

uint64_t sub_nibbles(uint64_t x, const uint8_t box[16]) {
  uint64_t out = 0;
  for (int i = 0; i < 16; ++i) {
    out |= uint64_t{box[(x >> (4 * i)) & 0xF]} << (4 * i);
  }
  return out;
}

uint64_t shuffle_nibbles(uint64_t x, const uint8_t perm[16]) {
  uint64_t out = 0;
  for (int i = 0; i < 16; ++i) {
    uint64_t nib = (x >> (60 - 4 * perm[i])) & 0xF;
    out |= nib << (60 - 4 * i);
  }
  return out;
}

uint16_t apply_rows(uint16_t chunk, const uint16_t rows[16]) {
  uint16_t out = 0;
  for (int r = 0; r < 16; ++r) {
    out = static_cast<uint16_t>((out << 1) | (__builtin_popcount(chunk & rows[r]) & 1));
  }
  return out;
}

uint64_t m_prime(uint64_t x) {
  const uint16_t c0 = static_cast<uint16_t>(x >> 48);
  const uint16_t c1 = static_cast<uint16_t>(x >> 32);
  const uint16_t c2 = static_cast<uint16_t>(x >> 16);
  const uint16_t c3 = static_cast<uint16_t>(x);
  return (uint64_t{apply_rows(c0, kM0Rows)} << 48) |
         (uint64_t{apply_rows(c1, kM1Rows)} << 32) |
         (uint64_t{apply_rows(c2, kM1Rows)} << 16) |
         uint64_t{apply_rows(c3, kM0Rows)};
}

uint64_t core(uint64_t x, uint64_t k1) {
  uint64_t s = x ^ k1 ^ kRc[0];
  for (int r = 1; r <= 5; ++r) {
    s = sub_nibbles(s, kSbox);
    s = m_prime(s);
    s = shuffle_nibbles(s, kSr);
    s ^= kRc[r] ^ k1;
  }
  s = sub_nibbles(s, kSbox);
  s = m_prime(s);
  s = sub_nibbles(s, kSboxInv);
  for (int r = 6; r <= 10; ++r) {
    s ^= kRc[r] ^ k1;
    s = shuffle_nibbles(s, kSrInv);
    s = m_prime(s);
    s = sub_nibbles(s, kSboxInv);
  }
  return s ^ kRc[11] ^ k1;
}

uint64_t whiten_out_key(uint64_t k0) {
  return ((k0 >> 1) | (k0 << 63)) ^ (k0 >> 63);
}

}  // namespace

uint64_t encrypt(uint64_t plaintext, uint64_t k0, uint64_t k1) {
  return core(plaintext ^ k0, k1) ^ whiten_out_key(k0);
}

uint64_t decrypt(uint64_t ciphertext, uint64_t k0, uint64_t k1) {
  // Alpha reflection: decryption is encryption with (k0', k0, k1 ^ alpha).
  const uint64_t alpha = kRc[11];
  return core(ciphertext ^ whiten_out_key(k0), k1 ^ alpha) ^ k0;
}

namespace detail {

void encrypt_batch_reference(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0,
                             uint64_t k1) {
  for (size_t i = 0; i < n; ++i) out[i] = encrypt(in[i], k0, k1);
}

}  // namespace detail

const char* impl_name(Impl impl) {
  switch (impl) {
    case Impl::Reference: return "reference";
    case Impl::Bitslice64: return "bitslice64";
    case Impl::BitsliceAvx2: return "bitslice-avx2";
  }
  return "unknown";
}

}  // namespace mirage::prince
