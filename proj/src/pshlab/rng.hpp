#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace pshlab {

// Counter-based random streams. Every estimator derives its own substream from
// (seed, fixed tag, indices), so results are a pure function of the arguments
// and independent of thread scheduling. The generator is the splitmix64
// finalizer applied to a 64-bit counter mixed with a per-stream key; that is
// plenty for Monte Carlo sampling and is trivially reproducible.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

// Stream tags keep substreams of distinct operations disjoint by construction.
enum class StreamTag : std::uint64_t {
    SphereMean = 1,
    BallMean = 2,
    SupCoarse = 3,
    SupRefine = 4,
    Annulus = 5,
    MoPassOne = 6,
    MoPassTwo = 7,
    Centers = 8,
    Probes = 9,
    Boundary = 10,
    Filler = 11,
    JnSample = 12,
    Witness = 13,
    Misc = 14,
};

inline std::uint64_t substream_key(std::uint64_t seed, StreamTag tag,
                                   std::uint64_t i = 0, std::uint64_t j = 0,
                                   std::uint64_t k = 0) {
    std::uint64_t h = mix_key(seed, static_cast<std::uint64_t>(tag));
    h = mix_key(h, i);
    h = mix_key(h, j);
    h = mix_key(h, k);
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t key) : key_(key), ctr_(0) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(++ctr_)); }

    // Uniform in [2^-53, 1); never returns 0 so logs of draws stay finite.
    double uniform01() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; draws are consumed in pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double m = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = m * std::sin(a);
        have_spare_ = true;
        return m * std::cos(a);
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Global worker count for chunked Monte Carlo loops. Results are bitwise
// independent of this setting: work is split into fixed-size chunks keyed by
// chunk index and partial results are combined in chunk order.
void set_thread_count(int n);
int thread_count();

// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on the configured
// number of workers. fn must only write to its own chunk's slot.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

}  // namespace pshlab
