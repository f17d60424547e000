#include "mirage/indexing.hpp"

#include <stdexcept>

#include "mirage/prince.hpp"
#include "mirage/rng.hpp"

namespace mirage {

SkewKeySet SkewKeySet::from_seed(uint64_t seed, uint32_t skews) {
  SplitMix64 sm(seed);
  SkewKeySet ks;
  ks.keys.resize(skews);
  for (auto& k : ks.keys) {
    k.k0 = sm.next();
    k.k1 = sm.next();
  }
  return ks;
}

void IndexFn::block_batch(uint32_t skew, std::span<const uint64_t> in,
                          std::span<uint64_t> out) const {
  for (size_t i = 0; i < in.size(); ++i) out[i] = block(skew, in[i]);
}

uint64_t PrinceIndexFn::block(uint32_t skew, uint64_t input) const {
  const SkewKey& k = keys_.keys.at(skew);
  return prince::encrypt(input, k.k0, k.k1);
}

void PrinceIndexFn::block_batch(uint32_t skew, std::span<const uint64_t> in,
                                std::span<uint64_t> out) const {
  const SkewKey& k = keys_.keys.at(skew);
  prince::encrypt_batch(in.data(), out.data(), in.size(), k.k0, k.k1);
}

void derive_index_batch(const IndexFn& fn, uint32_t skew, std::span<const uint64_t> blocks,
                        std::span<uint32_t> out, uint32_t sets_per_skew) {
  if (blocks.size() != out.size()) throw std::invalid_argument("batch size mismatch");
  const uint32_t mask = sets_per_skew - 1;
  constexpr size_t kChunk = 4096;
  uint64_t buf[kChunk];
  for (size_t off = 0; off < blocks.size(); off += kChunk) {
    const size_t n = std::min(kChunk, blocks.size() - off);
    fn.block_batch(skew, blocks.subspan(off, n), std::span<uint64_t>(buf, n));
    for (size_t i = 0; i < n; ++i) out[off + i] = static_cast<uint32_t>(buf[i]) & mask;
  }
}

}  // namespace mirage
