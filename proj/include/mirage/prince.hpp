#ifndef MIRAGE_PRINCE_HPP
#define MIRAGE_PRINCE_HPP

#include <cstddef>
#include <cstdint>

namespace mirage::prince {

// PRINCE block cipher (Borghoff et al., 2012): 64-bit blocks, 128-bit key
// split as k = k0 || k1 with FX-style whitening around a 12-round core.

// Scalar reference implementation.
uint64_t encrypt(uint64_t plaintext, uint64_t k0, uint64_t k1);
uint64_t decrypt(uint64_t ciphertext, uint64_t k0, uint64_t k1);

// Encrypts n blocks under one key. Dispatches at runtime to the widest
// available bitsliced kernel; results are identical to encrypt() per block.
void encrypt_batch(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0, uint64_t k1);

enum class Impl { Reference, Bitslice64, BitsliceAvx2 };

Impl active_impl();
const char* impl_name(Impl impl);

namespace detail {
// Individual kernels, exposed so the equivalence tests can drive each one.
void encrypt_batch_reference(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0, uint64_t k1);
void encrypt_batch_bitslice64(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0, uint64_t k1);
bool avx2_supported();
void encrypt_batch_avx2(const uint64_t* in, uint64_t* out, size_t n, uint64_t k0, uint64_t k1);
}  // namespace detail

}  // namespace mirage::prince

#endif  // MIRAGE_PRINCE_HPP
