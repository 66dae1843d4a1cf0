#include "vineuq/rng.hpp"

#include "vineuq/error.hpp"

#include <array>
#include <string>
#include <vector>

namespace vuq {

namespace {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, Stream stream)
    : key_(mix64(mix64(seed) ^ (static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    // Two rounds of the splitmix finaliser over (key, counter).
    return mix64(mix64(counter * 0x9e3779b97f4a7c15ULL + key_) ^ key_);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

void PseudoRandomSource::fill(std::uint64_t row, std::span<double> out) const {
    const std::uint64_t base = row * static_cast<std::uint64_t>(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = rng_.uniform(base + k);
}

namespace {

struct JoeKuo {
    unsigned s;
    unsigned a;
    std::array<unsigned, 8> m;
};

// new-joe-kuo-6.21201, dimensions 2..16.
constexpr std::array<JoeKuo, SobolSource::kMaxDim - 1> kJoeKuo{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

}  // namespace

SobolSource::SobolSource(std::size_t dim) : dim_(dim) {
    if (dim == 0 || dim > kMaxDim)
        throw DomainError("SobolSource: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    for (unsigned i = 0; i < 32; ++i) directions_[0][i] = 1u << (31 - i);
    for (std::size_t d = 1; d < dim; ++d) {
        const JoeKuo& jk = kJoeKuo[d - 1];
        std::uint32_t* v = directions_[d];
        for (unsigned i = 0; i < jk.s; ++i) v[i] = jk.m[i] << (31 - i);
        for (unsigned i = jk.s; i < 32; ++i) {
            v[i] = v[i - jk.s] ^ (v[i - jk.s] >> jk.s);
            for (unsigned k = 1; k < jk.s; ++k)
                if ((jk.a >> (jk.s - 1 - k)) & 1u) v[i] ^= v[i - k];
        }
    }
}

void SobolSource::point(std::uint64_t index, std::span<double> out) const {
    if (out.size() != dim_) throw DomainError("SobolSource: output size does not match dimension");
    const std::uint64_t gray = index ^ (index >> 1);
    for (std::size_t d = 0; d < dim_; ++d) {
        std::uint32_t x = 0;
        for (unsigned bit = 0; bit < 32; ++bit)
            if ((gray >> bit) & 1u) x ^= directions_[d][bit];
        out[d] = static_cast<double>(x) * 0x1.0p-32;
    }
}

void SobolSource::fill(std::uint64_t row, std::span<double> out) const {
    point(row + 1, out);
}

std::unique_ptr<UniformSource> make_source(bool sobol, std::size_t dim, std::uint64_t seed,
                                           Stream stream) {
    if (sobol) return std::make_unique<SobolSource>(dim);
    return std::make_unique<PseudoRandomSource>(seed, stream);
}

}  // namespace vuq
