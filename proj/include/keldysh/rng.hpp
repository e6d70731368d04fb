#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace keldysh {

inline constexpr std::size_t mc_shard_size = 1u << 15;

// Independent stream for (seed, stream, shard); results never depend on how shards map to threads.
inline std::mt19937_64 shard_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t shard) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream), std::uint32_t(stream >> 32),
                      std::uint32_t(shard), std::uint32_t(shard >> 32)};
    return std::mt19937_64(seq);
}

// body(acc, engine, count) fills one shard accumulator; shards are merged in index order.
template <class Acc, class Make, class Body>
Acc sharded_reduce(std::size_t n_samples, std::uint64_t seed, std::uint64_t stream, Make make, Body body, unsigned threads = 0) {
    std::size_t n_shards = (n_samples + mc_shard_size - 1) / mc_shard_size;
    std::vector<Acc> parts;
    parts.reserve(n_shards);
    for (std::size_t s = 0; s < n_shards; ++s) parts.push_back(make());
    auto work = [&](std::size_t s) {
        auto eng = shard_engine(seed, stream, s);
        std::size_t count = std::min(mc_shard_size, n_samples - s * mc_shard_size);
        body(parts[s], eng, count);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, n_shards));
    if (threads <= 1) {
        for (std::size_t s = 0; s < n_shards; ++s) work(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < n_shards; s += threads) work(s);
            });
        for (auto& t : pool) t.join();
    }
    Acc total = make();
    for (auto& p : parts) total.merge(p);
    return total;
}

}  // namespace keldysh
