#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bits.hpp"

namespace qecom {

// Counter-mode deterministic generator. Every random quantity in the project
// flows from one root seed through (seed, stream, counter) hashing, so runs
// are reproducible and parallel shards are order-independent.
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed, uint64_t stream = 0)
        : key_(mix(seed ^ 0x6a09e667f3bcc908ull) ^ mix(stream * 0x9e3779b97f4a7c15ull + 1)) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() { return mix(key_ ^ (ctr_++ * 0xd1342543de82ef95ull)); }

    // Independent child stream; advancing the child never touches the parent.
    CounterRng fork(uint64_t label) { return CounterRng(key_, mix(label) ^ 0x5851f42d4c957f2dull); }
    CounterRng fork(const std::string& label) { return fork(fnv1a64(label.data(), label.size())); }

    // [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    uint64_t next_below(uint64_t bound) {
        // Lemire rejection-free-ish reduction with retry on the biased band.
        while (true) {
            uint64_t x = next_u64();
            __uint128_t m = static_cast<__uint128_t>(x) * bound;
            uint64_t lo = static_cast<uint64_t>(m);
            if (lo >= bound || lo >= static_cast<uint64_t>(-bound) % bound)
                return static_cast<uint64_t>(m >> 64);
        }
    }

    bool next_bool(double p) { return next_double() < p; }
    int next_bit() { return static_cast<int>(next_u64() >> 63); }

    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    BitString next_bits(size_t n) {
        BitString out(n);
        for (size_t i = 0; i < n; ++i) out[i] = static_cast<uint8_t>(next_u64() >> 63);
        return out;
    }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<uint32_t> permutation(size_t n) {
        std::vector<uint32_t> p(n);
        for (size_t i = 0; i < n; ++i) p[i] = static_cast<uint32_t>(i);
        for (size_t i = n; i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

  private:
    uint64_t key_;
    uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qecom
