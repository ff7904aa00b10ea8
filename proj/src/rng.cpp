// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xpmcap {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag),  static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

InputLaw InputLaw::psk(int order) {
    if (order < 2) throw std::invalid_argument("psk order must be >= 2");
    return {Kind::psk, order};
}

InputLaw InputLaw::parse(const std::string& id) {
    if (id == "disk" || id == "eq18") return disk();
    if (id == "ring") return ring();
    if (id.rfind("psk", 0) == 0 && id.size() > 3) {
        std::size_t pos = 0;
        int order = 0;
        try {
            order = std::stoi(id.substr(3), &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == id.size() - 3) return psk(order);
    }
    throw std::invalid_argument("unknown input law: " + id);
}

std::string InputLaw::id() const {
    switch (kind) {
        case Kind::disk: return "disk";
        case Kind::ring: return "ring";
        case Kind::psk: return "psk" + std::to_string(order);
    }
    return "?";
}

cd InputLaw::draw(std::mt19937_64& rng, double peak_power) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    switch (kind) {
        case Kind::disk: {
            const double r = std::sqrt(peak_power * u(rng));
            return std::polar(r, two_pi * u(rng));
        }
        case Kind::ring: return std::polar(std::sqrt(peak_power), two_pi * u(rng));
        case Kind::psk: {
            std::uniform_int_distribution<int> pick(0, order - 1);
            return std::polar(std::sqrt(peak_power), two_pi * pick(rng) / order);
        }
    }
    return {};
}

double InputLaw::draw_power(std::mt19937_64& rng, double peak_power) const {
    if (kind == Kind::disk) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return peak_power * u(rng);
    }
    return peak_power;
}

cd complex_normal(std::mt19937_64& rng, double sigma_per_dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {sigma_per_dim * re, sigma_per_dim * im};
}

}  // namespace xpmcap
