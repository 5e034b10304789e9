#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace primelab {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// 128-bit counter, 64-bit key.  The counter is (block index, stream id), so one
/// key yields 2^64 independent streams of 2^64 blocks each.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block bijection(Block counter, Key key);

    explicit PhiloxEngine(std::uint64_t key, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    unsigned next_word_ = 4;
};

/// Random bit source that charges every raw bit it hands out.
class CountingBitSource {
public:
    static constexpr unsigned kMaxRejections = 10'000;

    explicit CountingBitSource(std::uint64_t seed, std::uint64_t stream = 0);

    /// Source for trial `index` of a run seeded with `master`: Philox key = master,
    /// stream = index.
    static CountingBitSource for_trial(std::uint64_t master, std::uint64_t index) {
        return CountingBitSource(master, index);
    }

    /// Uniform k-bit value, 1 <= k <= 64.
    std::uint64_t draw_bits(unsigned k);

    /// Uniform value in [0, m) by rejection: ceil(log2 m) bits per attempt, retry while >= m.
    std::uint64_t uniform_below(std::uint64_t m);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t bits_consumed() const { return bits_consumed_; }
    std::uint64_t draws() const { return draws_; }

    /// Sum of log2(m) over completed uniform_below calls: the information content of
    /// the values returned, as opposed to the raw bits charged.
    double information_bits() const { return information_bits_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    PhiloxEngine engine_;
    std::uint64_t buffer_ = 0;
    unsigned available_ = 0;
    std::uint64_t bits_consumed_ = 0;
    std::uint64_t draws_ = 0;
    double information_bits_ = 0.0;
};

/// Bits charged per uniform_below attempt for range m (0 when m == 1).
unsigned bits_for_range(std::uint64_t m);

}  // namespace primelab
