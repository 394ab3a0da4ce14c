#pragma once

#include <array>
#include <cstdint>

namespace cvfp {

/// Philox-4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based stream: output is a pure function of (seed, stream_id,
/// counter), so a particle keyed by its index draws the same numbers no
/// matter which worker runs it or in what order.
class RngStream {
  public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0) noexcept
        : seed_(seed), stream_(stream_id), counter_(counter) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    /// Number of Philox blocks consumed so far.
    std::uint64_t counter() const noexcept { return counter_; }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller; draws come in cached pairs.
    double normal() noexcept;

  private:
    void refill() noexcept;

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> words_{};
    int words_left_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace cvfp
