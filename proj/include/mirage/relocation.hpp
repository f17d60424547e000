#ifndef MIRAGE_RELOCATION_HPP
#define MIRAGE_RELOCATION_HPP

#include <cstdint>
#include <optional>

namespace mirage {

// Cuckoo-Relocation: when an install maps to two fully valid sets, move a
// resident tag to its alternative set in the other skew to free a slot.
struct RelocationPolicy {
  uint32_t max_attempts = 3;
};

struct FreedSlot {
  uint32_t skew = 0;
  uint32_t set = 0;
  uint32_t way = 0;
};

struct RelocationResult {
  std::optional<FreedSlot> freed;
  uint32_t attempts_used = 0;
};

}  // namespace mirage

#endif  // MIRAGE_RELOCATION_HPP
