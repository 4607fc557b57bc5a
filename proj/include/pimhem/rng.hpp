#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pimhem {

/// Seeded random stream. Sub-streams are derived from the root seed and a
/// label, so that the draw order inside one component cannot perturb the
/// draws seen by another.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : root_(seed), gen_(mix(seed)) {}

    double uniform() { return unif_(gen_); }
    double normal() { return norm_(gen_); }

    long poisson(double mean) {
        std::poisson_distribution<long> d(mean);
        return d(gen_);
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Independent stream identified by (root seed, label).
    RngStream substream(std::string_view label) const {
        return RngStream(root_ ^ hash_label(label));
    }

    /// Independent stream identified by (root seed, label, index);
    /// used for fan-out over replicates.
    RngStream substream(std::string_view label, std::uint64_t index) const {
        return RngStream(root_ ^ hash_label(label) ^ mix(index + 1));
    }

private:
    // splitmix64 finalizer; decorrelates nearby seeds.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t hash_label(std::string_view label) {
        // FNV-1a
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t root_;
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace pimhem
