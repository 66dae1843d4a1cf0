#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

namespace vuq {

// Named substreams derived from the single run seed.
enum class Stream : std::uint64_t {
    Sampling = 1,
    ImportanceSampling = 2,
    Genetic = 3,
    Design = 4,
    Bootstrap = 5,
};

/// Counter-based generator: the value for (key, counter) is a pure function,
/// so any row can be generated independently and in any order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream);

    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform in the open interval (0, 1).
    double uniform(std::uint64_t counter) const;

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

/// Source of points in the open unit hypercube, addressable by row index.
class UniformSource {
public:
    virtual ~UniformSource() = default;
    virtual void fill(std::uint64_t row, std::span<double> out) const = 0;
};

class PseudoRandomSource final : public UniformSource {
public:
    PseudoRandomSource(std::uint64_t seed, Stream stream) : rng_(seed, stream) {}
    void fill(std::uint64_t row, std::span<double> out) const override;

private:
    CounterRng rng_;
};

/// Unscrambled Sobol sequence (Joe-Kuo direction numbers, up to kMaxDim
/// dimensions). Row r maps to sequence index r + 1 so the all-zero point is
/// skipped.
class SobolSource final : public UniformSource {
public:
    static constexpr std::size_t kMaxDim = 16;
    explicit SobolSource(std::size_t dim);
    void fill(std::uint64_t row, std::span<double> out) const override;

    /// Raw sequence point by index (index 0 is the origin).
    void point(std::uint64_t index, std::span<double> out) const;

private:
    std::size_t dim_;
    std::uint32_t directions_[kMaxDim][32];
};

std::unique_ptr<UniformSource> make_source(bool sobol, std::size_t dim, std::uint64_t seed,
                                           Stream stream);

}  // namespace vuq
