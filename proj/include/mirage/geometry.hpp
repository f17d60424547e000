#ifndef MIRAGE_GEOMETRY_HPP
#define MIRAGE_GEOMETRY_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mirage {

// Physical address right-shifted by the line-offset bits. 40 significant bits
// for the default 46-bit physical address with 64-byte lines.
struct LineAddress {
  uint64_t value = 0;
  LineAddress() = default;
  explicit LineAddress(uint64_t v) : value(v) {}
  friend bool operator==(LineAddress a, LineAddress b) { return a.value == b.value; }
};

struct SecurityDomainId {
  uint8_t value = 0;
  SecurityDomainId() = default;
  explicit SecurityDomainId(uint8_t v) : value(v) {}
  friend bool operator==(SecurityDomainId a, SecurityDomainId b) { return a.value == b.value; }
};

struct CacheGeometry {
  uint32_t sets_per_skew = 16384;
  uint32_t skews = 2;
  uint32_t base_ways_per_skew = 8;
  uint32_t extra_ways_per_skew = 6;
  uint32_t line_bytes = 64;
  uint32_t phys_addr_bits = 46;

  uint32_t ways_per_skew() const { return base_ways_per_skew + extra_ways_per_skew; }
  uint64_t data_entries() const {
    return uint64_t{skews} * sets_per_skew * base_ways_per_skew;
  }
  uint64_t tag_entries() const {
    return uint64_t{skews} * sets_per_skew * ways_per_skew();
  }
  uint32_t line_offset_bits() const { return std::bit_width(line_bytes) - 1; }
  uint32_t line_addr_bits() const { return phys_addr_bits - line_offset_bits(); }
  uint32_t set_index_bits() const { return std::bit_width(sets_per_skew) - 1; }
  // Pointer widths for the tag<->data indirection.
  uint32_t fptr_bits() const { return std::bit_width(data_entries() - 1); }
  uint32_t rptr_bits() const { return std::bit_width(tag_entries() - 1); }

  void validate() const {
    if (sets_per_skew == 0 || !std::has_single_bit(sets_per_skew))
      throw std::invalid_argument("sets_per_skew must be a power of two, got " +
                                  std::to_string(sets_per_skew));
    if (skews == 0 || skews > 2)
      throw std::invalid_argument("skews must be 1 or 2");
    if (base_ways_per_skew == 0)
      throw std::invalid_argument("base_ways_per_skew must be positive");
    if (line_bytes == 0 || !std::has_single_bit(line_bytes))
      throw std::invalid_argument("line_bytes must be a power of two");
    if (phys_addr_bits <= line_offset_bits() || line_addr_bits() > 40)
      throw std::invalid_argument("phys_addr_bits out of range for 40-bit line tags");
  }
};

}  // namespace mirage

#endif  // MIRAGE_GEOMETRY_HPP
