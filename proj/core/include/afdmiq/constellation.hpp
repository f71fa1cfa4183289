// constellation.hpp - Unit-energy symbol alphabets and bit mapping.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afdmiq/types.hpp"

namespace afdmiq {

/**
 * A unit-average-energy alphabet whose point index doubles as the Gray bit
 * label: point[i] carries the bits of i, most significant bit first.
 */
struct Constellation {
    std::string name;
    std::vector<cplx> points;
    int bits_per_symbol = 0;

    void validate() const;  // throws on non-unit energy or size mismatch

    /// Gray-labelled QPSK, bits 00 -> (1+j)/sqrt(2); first bit keys the real
    /// axis, second bit the imaginary axis, 0 -> positive.
    static Constellation qpsk();
    static Constellation bpsk();
    static Constellation by_name(const std::string& name);
};

/// Bits (one per byte, values 0/1, length divisible by bits_per_symbol)
/// to symbols.
CVec map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c);

/// Hard minimum-distance decision per symbol, returning point indices.
Eigen::VectorXi hard_decide(const CVec& symbols, const Constellation& c);

/// Hard decision straight to bits.
std::vector<std::uint8_t> demap_symbols(const CVec& symbols, const Constellation& c);

/// Expand already-decided point indices into their bit labels.
std::vector<std::uint8_t> demap_indices(const Eigen::VectorXi& indices,
                                        const Constellation& c);

/// Unpack a point index into its bit label (MSB first).
void append_index_bits(int index, int bits_per_symbol, std::vector<std::uint8_t>& out);

/// Hamming distance between two point labels.
int label_bit_distance(int index_a, int index_b);

}  // namespace afdmiq
