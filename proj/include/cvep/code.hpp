// Maximal-length binary sequences and the per-character shifted codebook.
//
// A c-VEP keyboard flashes every character with the same m-sequence,
// each character delayed by its own circular lag. This header generates
// the sequence with a Fibonacci LFSR and derives the codebook.
//
// LFSR convention (matches the common "taps as polynomial exponents"
// description): register positions are numbered 1..order, position p is
// stored at word bit (order - p). The output bit is position `order`,
// the feedback bit is the XOR of the tap positions and enters at
// position 1. Taps {6, 5} realize x^6 + x^5 + 1.

#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "cvep/errors.hpp"

namespace cvep {

using BitSeq = std::vector<std::uint8_t>;

struct MSequence {
    BitSeq bits;              // 0/1 values, length 2^order - 1
    int order = 0;            // LFSR register length
    std::vector<int> taps;    // feedback tap positions, 1..order
    std::uint64_t seed = 0;   // initial register state, nonzero

    int length() const { return static_cast<int>(bits.size()); }
};

// Known-primitive feedback taps for small orders; order 6 is the default
// keyboard configuration (period 63).
inline std::vector<int> default_taps(int order) {
    switch (order) {
        case 2: return {2, 1};
        case 3: return {3, 2};
        case 4: return {4, 3};
        case 5: return {5, 3};
        case 6: return {6, 5};
        case 7: return {7, 6};
        case 8: return {8, 6, 5, 4};
        default:
            throw ConfigError("no default taps for order " + std::to_string(order));
    }
}

inline std::uint64_t all_ones_seed(int order) {
    return (order >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << order) - 1);
}

// Runs the LFSR for 2^order - 1 steps. Fails if the register orbit
// closes early (taps not primitive) or does not close at all (degenerate
// taps), so every returned sequence is genuinely maximal-length.
inline MSequence generate_msequence(int order, const std::vector<int>& taps,
                                    std::uint64_t seed) {
    if (order < 2 || order > 24)
        throw ConfigError("order must be in [2, 24], got " + std::to_string(order));
    if (taps.empty())
        throw ConfigError("taps must be non-empty");
    for (int t : taps)
        if (t < 1 || t > order)
            throw ConfigError("tap position " + std::to_string(t) +
                              " outside register 1.." + std::to_string(order));
    const std::uint64_t mask = all_ones_seed(order);
    std::uint64_t state = seed & mask;
    if (state == 0)
        throw ZeroSeedError("LFSR seed must be nonzero");

    const std::uint64_t initial = state;
    const int period = (1 << order) - 1;
    MSequence out;
    out.bits.reserve(period);
    out.order = order;
    out.taps = taps;
    out.seed = initial;

    for (int i = 0; i < period; ++i) {
        // position p lives at word bit (order - p); output = position `order`
        out.bits.push_back(static_cast<std::uint8_t>(state & 1u));
        std::uint64_t fb = 0;
        for (int t : taps)
            fb ^= (state >> (order - t)) & 1u;
        state = (state >> 1) | (fb << (order - 1));
        if (state == initial && i + 1 < period)
            throw NonMaximalPeriodError(
                "register returned to seed after " + std::to_string(i + 1) +
                " steps, expected " + std::to_string(period));
    }
    if (state != initial)
        throw NonMaximalPeriodError("register orbit did not close after " +
                                    std::to_string(period) + " steps");
    return out;
}

inline MSequence generate_msequence(int order) {
    return generate_msequence(order, default_taps(order), all_ones_seed(order));
}

// out[i] = in[(i - k) mod n]; positive k delays the sequence.
inline BitSeq circular_shift_bits(const BitSeq& seq, long long k) {
    const long long n = static_cast<long long>(seq.size());
    if (n == 0) return {};
    long long r = ((k % n) + n) % n;
    BitSeq out(seq.size());
    for (long long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            seq[static_cast<std::size_t>((i - r + n) % n)];
    return out;
}

// Sum over i of m(i) * m(i + lag mod n) with bits mapped 0 -> -1, 1 -> +1.
// A maximal-length sequence gives `length` at lag 0 and -1 elsewhere.
inline long long circular_autocorrelation(const MSequence& seq, int lag) {
    const int n = seq.length();
    if (lag < 0 || lag >= n)
        throw LagOutOfRangeError("lag " + std::to_string(lag) +
                                 " outside [0, " + std::to_string(n) + ")");
    long long acc = 0;
    for (int i = 0; i < n; ++i) {
        int a = seq.bits[static_cast<std::size_t>(i)] ? 1 : -1;
        int b = seq.bits[static_cast<std::size_t>((i + lag) % n)] ? 1 : -1;
        acc += a * b;
    }
    return acc;
}

struct Codebook {
    MSequence base;
    int num_chars = 0;       // L, characters on the keyboard
    int bits_per_shift = 0;  // code-bit lag step between adjacent characters
    std::vector<BitSeq> codes;

    // circular code-bit lag of character position p
    int lag_of(int position) const {
        return static_cast<int>((static_cast<long long>(position) * bits_per_shift) %
                                base.length());
    }
};

// codes[p] = base delayed by p * bits_per_shift bits. Lag decoding needs
// position -> lag to be injective, so colliding lags are a hard error.
inline Codebook build_codebook(const MSequence& mseq, int num_chars,
                               int bits_per_shift) {
    if (num_chars < 1)
        throw ConfigError("codebook needs at least one character");
    if (bits_per_shift < 1)
        throw ConfigError("bits_per_shift must be >= 1");

    Codebook cb;
    cb.base = mseq;
    cb.num_chars = num_chars;
    cb.bits_per_shift = bits_per_shift;
    cb.codes.reserve(static_cast<std::size_t>(num_chars));

    std::unordered_set<int> seen;
    for (int p = 0; p < num_chars; ++p) {
        const int lag = cb.lag_of(p);
        if (!seen.insert(lag).second)
            throw LagCollisionError("characters share circular lag " +
                                    std::to_string(lag) + " (L=" +
                                    std::to_string(num_chars) + ", step=" +
                                    std::to_string(bits_per_shift) + ", length=" +
                                    std::to_string(mseq.length()) + ")");
        cb.codes.push_back(circular_shift_bits(mseq.bits, lag));
    }
    return cb;
}

} // namespace cvep
