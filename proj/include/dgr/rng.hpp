#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dgr {

/// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream identified by (seed, stream_id).
///
/// The generator is a SplitMix64 sequence whose starting state is a hash of the
/// identifying pair, so two streams that differ in either field produce
/// unrelated sequences. Streams are plain values: copy one to fork it, or use
/// split() to derive a keyed child. Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    constexpr RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id), state_(mix64(mix64(seed ^ 0x9e3779b97f4a7c15ULL) + stream_id))
    {
    }

    /// Child stream keyed on this stream's identity and `key`. Does not
    /// consume from this stream.
    [[nodiscard]] constexpr RngStream split(std::uint64_t key) const noexcept
    {
        return RngStream(seed_, mix64(stream_id_ + 0x632be59bd9b4e019ULL) ^ mix64(key));
    }

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

/// Stream keyed on a sequence of indices, e.g. {table, replication, row}.
inline RngStream keyed_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept
{
    RngStream s(seed, 0);
    for (auto k : keys) {
        s = s.split(k);
    }
    return s;
}

} // namespace dgr
