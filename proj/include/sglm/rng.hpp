#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sglm {

using Rng = std::mt19937_64;

// Child stream keyed by (master seed, tags...). Streams for different tag
// tuples are statistically independent; the same tuple always yields the
// same stream.
inline Rng child_rng(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags.size());
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto t : tags) push(t);
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

}  // namespace sglm
