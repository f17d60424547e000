#ifndef MIRAGE_POLICIES_HPP
#define MIRAGE_POLICIES_HPP

#include <cstdint>

namespace mirage {

// Skew-selection policy on an install. LoadAware picks the indexed set with
// more invalid tags (power-of-2-choices); RandomSkew picks a skew uniformly;
// SingleChoice draws one bucket over the whole array (ball model only).
enum class Selection : uint8_t { LoadAware, RandomSkew, SingleChoice };

enum class TieBreak : uint8_t { Random, AlwaysSkew0 };

}  // namespace mirage

#endif  // MIRAGE_POLICIES_HPP
