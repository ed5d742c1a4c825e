#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace lticlust {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a over a purpose tag, so streams can be named instead of numbered.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from (master, purpose, index...).
/// The result only depends on the arguments, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t index = 0) noexcept
{
    return mix64(mix64(mix64(master) ^ tag_hash(tag)) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t i, std::uint64_t j) noexcept
{
    return derive_seed(derive_seed(master, tag, i), "sub", j);
}

using Engine = std::mt19937_64;

inline Eigen::MatrixXd gaussian_matrix(Engine& eng, Eigen::Index rows, Eigen::Index cols,
                                       double stddev = 1.0)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd out(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = stddev * dist(eng);
    return out;
}

}  // namespace lticlust
