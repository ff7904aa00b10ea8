#include "support.hpp"
#include "xpmcap/coeffs.hpp"
#include "xpmcap/waveform.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace xpmcap;
using xpmcap::testing::small_link;

namespace {

// g(z, t - tau) on the pulse grid by direct DFT.
cvec shifted_direct(const SampledWaveform& g, double z, double beta2, double tau) {
    const std::size_t n = g.size();
    cvec spec(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc{};
        for (std::size_t j = 0; j < n; ++j)
            acc += g.samples[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n);
        const double om = bin_omega(k, n, g.dt);
        spec[k] = acc * std::polar(1.0, -0.5 * beta2 * om * om * z - om * tau);
    }
    cvec out(n);
    for (std::size_t j = 0; j < n; ++j) {
        cd acc{};
        for (std::size_t k = 0; k < n; ++k)
            acc += spec[k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / n);
        out[j] = acc / static_cast<double>(n);
    }
    return out;
}

// Lossless collision integral straight from its definition, trapezoid in z.
cd collision_direct(const SystemConfig& cfg, int spacing, LagTriple t) {
    const double T = cfg.symbol_period();
    const auto g0 = rrc_pulse(cfg.rolloff, T, cfg.samples_per_symbol, cfg.time_window_symbols);
    const double h = cfg.span_length_km / cfg.z_steps;
    cd total{};
    for (int iz = 0; iz <= cfg.z_steps; ++iz) {
        const double z = iz * h;
        const double delta = cfg.beta2() * cfg.spacing_rad_s() * spacing * z;
        const cvec a = shifted_direct(g0, z, cfg.beta2(), 0.0);
        const cvec b = shifted_direct(g0, z, cfg.beta2(), t.p * T);
        const cvec c = shifted_direct(g0, z, cfg.beta2(), t.m * T + delta);
        const cvec d = shifted_direct(g0, z, cfg.beta2(), t.l * T + delta);
        cd acc{};
        for (std::size_t j = 0; j < a.size(); ++j) acc += std::conj(a[j]) * b[j] * std::conj(c[j]) * d[j];
        const double w = (iz == 0 || iz == cfg.z_steps) ? 0.5 : 1.0;
        total += w * h * acc * g0.dt * T;
    }
    return total;
}

}  // namespace

TEST_SUITE("coeffs") {
    TEST_CASE("FFT path equals the direct oracle on a 256-point grid") {
        SystemConfig cfg = small_link();
        cfg.alpha_db_per_km = 0.0;
        cfg.rolloff = 0.5;
        cfg.span_length_km = 5.0;
        cfg.samples_per_symbol = 4;
        cfg.time_window_symbols = 64;
        cfg.z_steps = 4;
        const std::vector<LagTriple> lags = {{0, 0, 0}, {0, 1, 1}, {1, 1, 1}, {0, 2, -1}, {2, -1, 1}};
        for (int spacing : {1, 2}) {
            const auto fast = collision_integrals(spacing, lags, cfg);
            for (std::size_t i = 0; i < lags.size(); ++i) {
                CAPTURE(spacing);
                CAPTURE(i);
                const cd slow = collision_direct(cfg, spacing, lags[i]);
                CHECK(std::abs(fast[i] - slow) <= 1e-9 * std::abs(slow));
            }
        }
    }

    TEST_CASE("huge loss: integral collapses to I(0)/alpha") {
        SystemConfig cfg = small_link();
        cfg.alpha_db_per_km = 1e13;
        const auto g = rrc_pulse(cfg.rolloff, cfg.symbol_period(), cfg.samples_per_symbol, cfg.time_window_symbols);
        double i0 = 0.0;
        for (const auto& s : g.samples) i0 += std::norm(s) * std::norm(s);
        i0 *= g.dt * cfg.symbol_period();
        const cd s = compute_S(0, 1, 0, 0, 0, cfg);
        CHECK(std::abs(s) < 1e-12);
        CHECK(std::abs(s) * cfg.alpha() == doctest::Approx(i0).epsilon(1e-3));
        // ten times more loss, ten times less integral
        cfg.alpha_db_per_km = 1e14;
        CHECK(std::abs(compute_S(0, 1, 0, 0, 0, cfg)) == doctest::Approx(std::abs(s) / 10.0).epsilon(1e-3));
    }

    TEST_CASE("step halving changes S by less than 0.1%") {
        SystemConfig cfg = small_link();
        const std::vector<LagTriple> lags = {{0, 0, 0}, {0, 2, 2}, {0, -3, -3}};
        const auto coarse = collision_integrals(1, lags, cfg);
        cfg.z_steps *= 2;
        const auto fine = collision_integrals(1, lags, cfg);
        for (std::size_t i = 0; i < lags.size(); ++i) CHECK(std::abs(coarse[i] - fine[i]) < 1e-3 * std::abs(fine[i]));
    }

    TEST_CASE("z_steps below two is rejected") {
        SystemConfig cfg = small_link();
        cfg.z_steps = 1;
        CHECK_THROWS_AS(compute_S(0, 1, 0, 0, 0, cfg), ConfigError);
        CHECK_THROWS(compute_S(1, 1, 0, 0, 0, small_link()));
    }

    TEST_CASE("zero nonlinearity gives an all-zero table") {
        SystemConfig cfg = small_link();
        cfg.gamma_per_w_km = 0.0;
        const auto t = compute_coefficient_table(cfg);
        for (int k = 0; k < 3; ++k)
            for (int w = 0; w < 3; ++w)
                for (int m = -cfg.memory; m <= cfg.memory; ++m) CHECK(t.c(k, w, m) == 0.0);
    }

    TEST_CASE("table depends only on the spacing multiple") {
        SystemConfig cfg = small_link();
        cfg.num_users = 4;
        const auto t = compute_coefficient_table(cfg);
        for (int m = -cfg.memory; m <= cfg.memory; ++m) {
            CHECK(t.c(0, 1, m) == t.c(2, 3, m));
            CHECK(t.c(1, 0, m) == t.c(3, 2, m));
            CHECK(t.c(0, 2, m) == t.c(1, 3, m));
        }
        CHECK(compute_S(0, 1, 0, 2, 2, cfg) == compute_S(2, 3, 0, 2, 2, cfg));
        CHECK(t.taps(1, 1) == nullptr);
        CHECK(t.c(2, 2, 0) == 0.0);
    }

    TEST_CASE("entries are nonnegative, near-real and ordered by spacing") {
        const SystemConfig cfg = small_link();
        const auto t = compute_coefficient_table(cfg);
        for (int m = -cfg.memory; m <= cfg.memory; ++m) {
            CAPTURE(m);
            for (int s = 1; s <= 2; ++s) {
                CHECK(t.c(0, s, m) >= 0.0);
                const cd r = t.raw(0, s, m);
                CHECK(std::abs(r.imag()) < 1e-3 * std::abs(r));
            }
            CHECK(t.c(0, 1, m) >= t.c(0, 2, m));
        }
        CHECK(table_structure(t).spacing_monotone);
    }

    TEST_CASE("diagonal collisions dominate on the short link") {
        const SystemConfig cfg = small_link();
        std::vector<LagTriple> lags;
        for (int m = 0; m <= cfg.memory; ++m) {
            lags.push_back({0, m, m});
            lags.push_back({1, m, m});
            lags.push_back({2, m, m});
            lags.push_back({1, m, m + 1});
        }
        const auto s = collision_integrals(1, lags, cfg);
        for (int m = 0; m <= cfg.memory; ++m) {
            CAPTURE(m);
            const double d = std::abs(s[4 * m]);
            CHECK(d >= std::abs(s[4 * m + 1]));
            CHECK(d >= std::abs(s[4 * m + 2]));
            CHECK(d >= std::abs(s[4 * m + 3]));
        }
    }

    TEST_CASE("CSV round trip is exact") {
        const auto t = compute_coefficient_table(small_link());
        const std::string csv = coefficient_csv(t);
        CHECK(csv.rfind("k,w,m,c_real,S_raw_re,S_raw_im\n", 0) == 0);
        const auto back = parse_coefficient_csv(csv);
        CHECK(back.num_users() == 3);
        CHECK(back.memory() == t.memory());
        CHECK(coefficient_csv(back) == csv);
        CHECK_THROWS(parse_coefficient_csv("k,w,m\n1,2,0\n"));
    }

    TEST_CASE("Table I zero-lag coefficient regression") {
        // Frozen from the first evaluation at the default 1000 z steps;
        // 2000 steps moves it by far less than the 0.1% convergence bar.
        const SystemConfig cfg = SystemConfig::table1();
        const cd s = compute_S(0, 1, 0, 0, 0, cfg);
        CHECK(cfg.gamma_per_w_km * s.real() == doctest::Approx(1.3091394550982038).epsilon(1e-9));
        SystemConfig fine = cfg;
        fine.z_steps = 2000;
        const cd s2 = compute_S(0, 1, 0, 0, 0, fine);
        CHECK(std::abs(s2 - s) < 1e-3 * std::abs(s2));
    }
}
