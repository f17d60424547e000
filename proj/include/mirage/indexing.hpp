#ifndef MIRAGE_INDEXING_HPP
#define MIRAGE_INDEXING_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mirage/geometry.hpp"

namespace mirage {

// One 128-bit key per skew, expanded from a caller-supplied seed so that
// experiments are reproducible. Keys are opaque to everything but the PRF.
struct SkewKey {
  uint64_t k0 = 0;
  uint64_t k1 = 0;
};

struct SkewKeySet {
  std::vector<SkewKey> keys;

  static SkewKeySet from_seed(uint64_t seed, uint32_t skews);
};

// Keyed PRF from 64-bit blocks to 64-bit blocks, one keyed instance per skew.
// Pure and immutable after construction; safe to share across threads.
class IndexFn {
 public:
  virtual ~IndexFn() = default;
  virtual uint32_t skews() const = 0;
  virtual uint64_t block(uint32_t skew, uint64_t input) const = 0;
  virtual void block_batch(uint32_t skew, std::span<const uint64_t> in,
                           std::span<uint64_t> out) const;
};

// Default index function: 12-round PRINCE keyed per skew.
class PrinceIndexFn final : public IndexFn {
 public:
  explicit PrinceIndexFn(SkewKeySet keys) : keys_(std::move(keys)) {}
  static std::shared_ptr<PrinceIndexFn> from_seed(uint64_t seed, uint32_t skews) {
    return std::make_shared<PrinceIndexFn>(SkewKeySet::from_seed(seed, skews));
  }

  uint32_t skews() const override { return static_cast<uint32_t>(keys_.keys.size()); }
  uint64_t block(uint32_t skew, uint64_t input) const override;
  void block_batch(uint32_t skew, std::span<const uint64_t> in,
                   std::span<uint64_t> out) const override;

 private:
  SkewKeySet keys_;
};

// Pass-through mapping. Used by the single-skew model to demonstrate how a
// known address-to-set mapping lets an adversary force set conflicts.
class IdentityIndexFn final : public IndexFn {
 public:
  explicit IdentityIndexFn(uint32_t skews = 1) : skews_(skews) {}
  uint32_t skews() const override { return skews_; }
  uint64_t block(uint32_t, uint64_t input) const override { return input; }

 private:
  uint32_t skews_;
};

// (sdid, line address) packed into one PRF block: SDID in the top 8 bits,
// line address in the low 40, middle bits zero.
inline uint64_t encode_block(SecurityDomainId sdid, LineAddress addr) {
  return (uint64_t{sdid.value} << 56) | (addr.value & ((uint64_t{1} << 40) - 1));
}

inline uint32_t derive_index(const IndexFn& fn, uint32_t skew, SecurityDomainId sdid,
                             LineAddress addr, uint32_t sets_per_skew) {
  return static_cast<uint32_t>(fn.block(skew, encode_block(sdid, addr)) & (sets_per_skew - 1));
}

// Batch variant over pre-encoded blocks; feeds the bitsliced cipher kernels.
void derive_index_batch(const IndexFn& fn, uint32_t skew, std::span<const uint64_t> blocks,
                        std::span<uint32_t> out, uint32_t sets_per_skew);

}  // namespace mirage

#endif  // MIRAGE_INDEXING_HPP
