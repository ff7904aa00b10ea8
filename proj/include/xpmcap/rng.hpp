// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/fft.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace xpmcap {

// Independent stream for (seed, tag, index). Parallel and serial callers
// that ask for the same triple get the same numbers.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0);

// Stream tags; keep values stable, they are part of reproducibility.
namespace stream {
inline constexpr std::uint64_t noise = 1;
inline constexpr std::uint64_t symbols = 2;
inline constexpr std::uint64_t nli = 3;
inline constexpr std::uint64_t lemma = 4;
inline constexpr std::uint64_t ase = 5;
}  // namespace stream

// Channel-input laws under a peak power P.
//   disk: uniform phase, amplitude pdf 2r/P on [0, sqrt(P)]
//   ring: |x| = sqrt(P), uniform continuous phase
//   psk:  |x| = sqrt(P), phase uniform over `order` points
struct InputLaw {
    enum class Kind { disk, ring, psk };
    Kind kind = Kind::disk;
    int order = 0;

    static InputLaw disk() { return {Kind::disk, 0}; }
    static InputLaw ring() { return {Kind::ring, 0}; }
    static InputLaw psk(int order);
    // "disk" (alias "eq18"), "ring", "psk<M>"; throws std::invalid_argument.
    static InputLaw parse(const std::string& id);
    std::string id() const;

    // E|X|^2 / P and E|X|^4 / P^2
    double second_moment() const { return kind == Kind::disk ? 0.5 : 1.0; }
    double fourth_moment() const { return kind == Kind::disk ? 1.0 / 3.0 : 1.0; }

    cd draw(std::mt19937_64& rng, double peak_power) const;
    // |X|^2 only; cheaper when the phase is irrelevant.
    double draw_power(std::mt19937_64& rng, double peak_power) const;
};

cd complex_normal(std::mt19937_64& rng, double sigma_per_dim);

}  // namespace xpmcap
