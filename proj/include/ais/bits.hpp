// Bit and symbol sequence types shared across the toolkit.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ais {

// Ordered bits, each element 0 or 1.
using Bits = std::vector<uint8_t>;

// Antipodal symbols, each element -1 or +1.
using Symbols = std::vector<int8_t>;

// Hex test-vector serialization, MSB-first within each byte. Lengths that are
// not a multiple of 4 are zero-padded on encode; decode takes the bit count.
std::string bits_to_hex(std::span<const uint8_t> bits);
Bits bits_from_hex(const std::string& hex, size_t nbits);

inline int8_t bit_to_symbol(uint8_t b) { return b ? int8_t(1) : int8_t(-1); }
inline uint8_t symbol_to_bit(int8_t s) { return s > 0 ? 1 : 0; }

}  // namespace ais
