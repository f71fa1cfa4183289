#include "afdmiq/constellation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace afdmiq {

void Constellation::validate() const {
    const size_t m = points.size();
    if (m < 2 || (m & (m - 1)) != 0)
        throw std::invalid_argument("Constellation: size must be a power of two >= 2");
    if (m != (size_t{1} << bits_per_symbol))
        throw std::invalid_argument("Constellation: bits_per_symbol mismatch");
    double energy = 0.0;
    for (const cplx& p : points) energy += std::norm(p);
    energy /= static_cast<double>(m);
    if (std::abs(energy - 1.0) > 1e-12)
        throw std::invalid_argument("Constellation: average energy must be 1");
}

Constellation Constellation::qpsk() {
    const double s = 1.0 / std::sqrt(2.0);
    Constellation c;
    c.name = "qpsk";
    c.bits_per_symbol = 2;
    c.points = {
        {s, s},    // 00
        {s, -s},   // 01
        {-s, s},   // 10
        {-s, -s},  // 11
    };
    c.validate();
    return c;
}

Constellation Constellation::bpsk() {
    Constellation c;
    c.name = "bpsk";
    c.bits_per_symbol = 1;
    c.points = {{1.0, 0.0}, {-1.0, 0.0}};
    c.validate();
    return c;
}

Constellation Constellation::by_name(const std::string& name) {
    if (name == "qpsk") return qpsk();
    if (name == "bpsk") return bpsk();
    throw std::invalid_argument("Constellation: unknown name '" + name + "'");
}

CVec map_bits(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    const int nb = c.bits_per_symbol;
    if (nb <= 0 || bits.size() % static_cast<size_t>(nb) != 0)
        throw std::invalid_argument("map_bits: bit count not divisible by bits_per_symbol");
    const size_t n = bits.size() / static_cast<size_t>(nb);
    CVec x(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
        int idx = 0;
        for (int b = 0; b < nb; ++b) {
            const std::uint8_t bit = bits[i * static_cast<size_t>(nb) + static_cast<size_t>(b)];
            if (bit > 1) throw std::invalid_argument("map_bits: bits must be 0 or 1");
            idx = (idx << 1) | bit;
        }
        x[static_cast<Eigen::Index>(i)] = c.points[static_cast<size_t>(idx)];
    }
    return x;
}

Eigen::VectorXi hard_decide(const CVec& symbols, const Constellation& c) {
    Eigen::VectorXi idx(symbols.size());
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (size_t p = 0; p < c.points.size(); ++p) {
            const double d = std::norm(symbols[i] - c.points[p]);
            if (d < best) {
                best = d;
                arg = static_cast<int>(p);
            }
        }
        idx[i] = arg;
    }
    return idx;
}

std::vector<std::uint8_t> demap_symbols(const CVec& symbols, const Constellation& c) {
    return demap_indices(hard_decide(symbols, c), c);
}

std::vector<std::uint8_t> demap_indices(const Eigen::VectorXi& indices,
                                        const Constellation& c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<size_t>(indices.size()) * static_cast<size_t>(c.bits_per_symbol));
    for (Eigen::Index i = 0; i < indices.size(); ++i)
        append_index_bits(indices[i], c.bits_per_symbol, bits);
    return bits;
}

void append_index_bits(int index, int bits_per_symbol, std::vector<std::uint8_t>& out) {
    for (int b = bits_per_symbol - 1; b >= 0; --b)
        out.push_back(static_cast<std::uint8_t>((index >> b) & 1));
}

int label_bit_distance(int index_a, int index_b) {
    return std::popcount(static_cast<unsigned>(index_a ^ index_b));
}

}  // namespace afdmiq
