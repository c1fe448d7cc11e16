#pragma once
#include <cstdint>
#include <limits>
#include <random>
#include <Eigen/Core>

namespace pclasso {

/// Named random streams. Each stream of a seed is an independent sequence.
enum class Stream : std::uint64_t
{
    design = 1,
    noise = 2,
    column_choice = 3,
    test_design = 4,
    folds = 5,
    monte_carlo = 6,
    theory = 7,
    probes = 8,
};

/**
 * Counter-based generator: the i-th output of (seed, stream, substream)
 * is mix(key + i * golden), with mix the SplitMix64 finalizer. Any draw is
 * reproducible from its coordinates alone, so sub-draws do not depend on
 * how many numbers other streams consumed.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class CounterRng
{
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
        : key_(mix(mix(seed ^ 0x243F6A8885A308D3ULL)
                   ^ mix(static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL)
                   ^ mix(substream + 0x13198A2E03707344ULL)))
    {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Fill a matrix with iid N(0, 1) draws in column-major order.
template <class Derived>
void fill_standard_normal(Eigen::MatrixBase<Derived>& m, CounterRng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = nd(rng);
    }
}

} // namespace pclasso
