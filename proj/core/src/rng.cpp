#include "primelab/rng.hpp"

#include <bit>
#include <cmath>

#include "primelab/errors.hpp"

namespace primelab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = std::uint64_t{a} * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

}  // namespace

PhiloxEngine::Block PhiloxEngine::bijection(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

PhiloxEngine::PhiloxEngine(std::uint64_t key, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
      stream_(stream) {}

PhiloxEngine::result_type PhiloxEngine::operator()() {
    if (next_word_ >= 4) {
        const Block counter{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buffer_ = bijection(counter, key_);
        ++block_;
        next_word_ = 0;
    }
    const std::uint64_t lo = buffer_[next_word_];
    const std::uint64_t hi = buffer_[next_word_ + 1];
    next_word_ += 2;
    return lo | (hi << 32);
}

unsigned bits_for_range(std::uint64_t m) {
    return m <= 1 ? 0u : static_cast<unsigned>(std::bit_width(m - 1));
}

CountingBitSource::CountingBitSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(seed, stream) {}

std::uint64_t CountingBitSource::draw_bits(unsigned k) {
    if (k == 0 || k > 64) {
        throw DomainError("draw_bits: k must be in [1, 64]");
    }
    ++draws_;
    bits_consumed_ += k;

    std::uint64_t value;
    if (k <= available_) {
        value = k == 64 ? buffer_ : buffer_ & ((std::uint64_t{1} << k) - 1);
        buffer_ = k == 64 ? 0 : buffer_ >> k;
        available_ -= k;
        return value;
    }
    // Use up the buffered bits as the low part, then take the rest from a fresh word.
    const unsigned low_bits = available_;
    value = buffer_;
    const unsigned high_bits = k - low_bits;
    std::uint64_t word = engine_();
    const std::uint64_t high = high_bits == 64 ? word : word & ((std::uint64_t{1} << high_bits) - 1);
    value |= low_bits == 0 ? high : high << low_bits;
    buffer_ = high_bits == 64 ? 0 : word >> high_bits;
    available_ = 64 - high_bits;
    return value;
}

std::uint64_t CountingBitSource::uniform_below(std::uint64_t m) {
    if (m == 0) {
        throw DomainError("uniform_below: empty range");
    }
    if (m == 1) {
        return 0;
    }
    const unsigned k = bits_for_range(m);
    for (unsigned attempt = 0; attempt < kMaxRejections; ++attempt) {
        const std::uint64_t v = draw_bits(k);
        if (v < m) {
            information_bits_ += std::log2(static_cast<double>(m));
            return v;
        }
    }
    throw BitSourceError("uniform_below: rejection cap exceeded, bit source is broken");
}

}  // namespace primelab
