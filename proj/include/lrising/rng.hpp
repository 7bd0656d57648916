#pragma once

#include <cstdint>

namespace lrising {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/*!
 * Keyed counter generator. Word `ctr` of substream `stream` under `seed` is a
 * pure function of the triple, so samples can be drawn in any order.
 */
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream)
{
    return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t keyed_word(std::uint64_t key, std::uint64_t ctr)
{
    return mix64(key + (ctr + 1) * 0x9e3779b97f4a7c15ULL);
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t ctr)
{
    return keyed_word(stream_key(seed, stream), ctr);
}

class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream)
    {
    }

    std::uint64_t next_u64() { return counter_word(seed_, stream_, ctr_++); }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const { return ctr_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
};

// Substream keys used across modules, so that one seed gives unrelated draws
// for different purposes.
inline std::uint64_t substream(std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0)
{
    return mix64(mix64(tag * 0x632be59bd9b4e019ULL + a) + b);
}

} // namespace lrising
