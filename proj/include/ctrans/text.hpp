#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ctrans {

// Shortest round-trip decimal form; used for every number written to disk so
// identical runs produce identical bytes.
std::string format_double(double value);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a_doubles(std::span<const double> values,
                            std::uint64_t seed = 1469598103934665603ull);
std::string hex64(std::uint64_t value);

}  // namespace ctrans
