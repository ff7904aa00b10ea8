#include "support.hpp"
#include "xpmcap/ssfm.hpp"
#include "xpmcap/units.hpp"
#include "xpmcap/waveform.hpp"
#include "xpmcap/fft.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace xpmcap;

namespace {

// Table I fibre on a short frame: 256 symbols x 16 samples.
SystemConfig small_ssfm(int users = 3) {
    SystemConfig c = SystemConfig::table1();
    c.num_users = users;
    c.ssfm.symbols = 256;
    c.ssfm.step_km = 0.1;
    return c;
}

SsfmPlan lossless(double length_km, double step_km, double beta2, double gamma) {
    SsfmPlan p;
    p.length_km = length_km;
    p.step_km = step_km;
    p.beta2 = beta2;
    p.gamma = gamma;
    p.amplify = false;
    return p;
}

SymbolFrame frame(const SystemConfig& cfg, double dbm, InputLaw law, std::uint64_t seed, int n = -1) {
    return random_frame(std::vector<InputLaw>(cfg.num_users, law), std::vector<double>(cfg.num_users, dbm_to_w(dbm)),
                        n < 0 ? cfg.ssfm.symbols : n, seed);
}

double evm(const cvec& x, const cvec& y) {
    double e = 0.0, s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        e += std::norm(y[i] - x[i]);
        s += std::norm(x[i]);
    }
    return std::sqrt(e / s);
}

double peak(const cvec& v) {
    double m = 0.0;
    for (const auto& a : v) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace

TEST_SUITE("ssfm") {
    TEST_CASE("fundamental soliton keeps its shape in anomalous dispersion") {
        const double T0 = 10e-12, beta2 = -21.7e-24, gamma = 1.2;
        const double P0 = std::abs(beta2) / (gamma * T0 * T0);
        FieldGrid f;
        f.dt = 0.5e-12;
        f.samples_per_symbol = 16;
        f.symbols = 128;
        f.offsets_hz = {0.0};
        const std::size_t n = 2048;
        f.samples.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = (static_cast<double>(j) - n / 2.0) * f.dt;
            f.samples[j] = std::sqrt(P0) / std::cosh(t / T0);
        }
        const auto out = ssfm_propagate(f, lossless(7.2, 0.01, beta2, gamma), 1);  // about one soliton period
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(std::abs(out.samples[j]) - std::abs(f.samples[j])));
        CHECK(worst < 1e-3 * std::sqrt(P0));
        // Normal dispersion with the same input must reshape it.
        const auto normal = ssfm_propagate(f, lossless(7.2, 0.01, -beta2, gamma), 1);
        double moved = 0.0;
        for (std::size_t j = 0; j < n; ++j) moved = std::max(moved, std::abs(std::abs(normal.samples[j]) - std::abs(f.samples[j])));
        CHECK(moved > 0.1 * std::sqrt(P0));
    }

    TEST_CASE("noiseless lossless propagation conserves energy") {
        const auto cfg = small_ssfm();
        const auto field = wdm_mux(frame(cfg, 1.1, InputLaw::disk(), 2), cfg);
        const auto out = ssfm_propagate(field, lossless(250.0, 0.01, cfg.beta2(), cfg.gamma_per_w_km), 1);
        CHECK(std::abs(out.energy() - field.energy()) < 1e-6 * field.energy());
    }

    TEST_CASE("without dispersion the magnitude is untouched") {
        auto cfg = small_ssfm(1);
        const auto field = wdm_mux(frame(cfg, 10.0, InputLaw::disk(), 3), cfg);
        const auto out = ssfm_propagate(field, lossless(50.0, 0.1, 0.0, cfg.gamma_per_w_km), 1);
        const double scale = peak(field.samples);
        for (std::size_t j = 0; j < field.samples.size(); ++j)
            CHECK(std::abs(std::abs(out.samples[j]) - std::abs(field.samples[j])) < 1e-12 * scale);
    }

    TEST_CASE("linear propagation is undone by the inverse filter") {
        const auto cfg = small_ssfm();
        const auto field = wdm_mux(frame(cfg, 0.0, InputLaw::psk(4), 4), cfg);
        auto out = ssfm_propagate(field, lossless(250.0, 1.0, cfg.beta2(), 0.0), 1);
        out = ssfm_propagate(out, lossless(250.0, 250.0, -cfg.beta2(), 0.0), 1);
        const double scale = peak(field.samples);
        for (std::size_t j = 0; j < field.samples.size(); ++j) CHECK(std::abs(out.samples[j] - field.samples[j]) < 1e-9 * scale);
    }

    TEST_CASE("back to back recovers the symbols") {
        auto cfg = small_ssfm();
        cfg.span_length_km = 0.0;
        const auto x = frame(cfg, 0.0, InputLaw::disk(), 5);
        const auto field = ssfm_propagate(wdm_mux(x, cfg), SsfmPlan::from_config(cfg), 1);
        for (int k = 0; k < 3; ++k) {
            const cvec y = receiver_chain(field, k, cfg);
            REQUIRE(y.size() == x.length());
            for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - x.symbols[k][i]) < 1e-6 * std::sqrt(x.peak_power[k]));
        }
    }

    TEST_CASE("mux occupies three bands and demux leaks below -40 dB") {
        auto cfg = small_ssfm();
        cfg.span_length_km = 0.0;
        const auto x = frame(cfg, 0.0, InputLaw::disk(), 6);
        const auto field = wdm_mux(x, cfg);
        CHECK(field.offsets_hz == std::vector<double>{-100e9, 0.0, 100e9});
        cvec spec = field.samples;
        Fft(spec.size()).forward(spec);
        std::vector<double> band(3, 0.0);
        double outside = 0.0, total = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double f = bin_omega(i, spec.size(), field.dt) / (2.0 * std::numbers::pi);
            const double e = std::norm(spec[i]);
            total += e;
            bool in = false;
            for (int k = 0; k < 3; ++k)
                if (std::abs(f - field.offsets_hz[k]) <= 1.1 * 16e9 * (1.0 + 1e-9)) {
                    band[k] += e;
                    in = true;
                }
            if (!in) outside += e;
        }
        CHECK(outside < 1e-12 * total);
        for (double b : band) CHECK(b / total == doctest::Approx(1.0 / 3.0).epsilon(0.05));
        for (int k = 0; k < 3; ++k) CHECK(evm(x.symbols[k], receiver_chain_no_dbp(field, k, cfg)) < 0.01);

        // A single user sits at baseband.
        auto one = cfg;
        one.num_users = 1;
        const auto f1 = wdm_mux(frame(one, 0.0, InputLaw::disk(), 7), one);
        CHECK(f1.offsets_hz == std::vector<double>{0.0});
    }

    TEST_CASE("single-channel DBP inverts the noiseless link") {
        auto cfg = small_ssfm(1);
        cfg.ssfm.step_km = 0.01;
        cfg.ssfm.dbp_step_km = 0.01;
        cfg.noise_variance_w = 0.0;
        const auto x = frame(cfg, 0.0, InputLaw::psk(16), 8);
        const auto field = ssfm_propagate(wdm_mux(x, cfg), SsfmPlan::from_config(cfg), 1);
        const double with = evm(x.symbols[0], receiver_chain(field, 0, cfg));
        const double without = evm(x.symbols[0], receiver_chain_no_dbp(field, 0, cfg));
        MESSAGE("EVM with DBP " << with << ", linear only " << without);
        CHECK(with < 1e-3);
        CHECK(with < without);
    }

    TEST_CASE("linear link: receiver SNR equals P/(2 sigma^2)") {
        auto cfg = small_ssfm();
        cfg.gamma_per_w_km = 0.0;  // linear, so one step is exact
        cfg.ssfm.step_km = 250.0;
        cfg.ssfm.symbols = 16384;
        const double P = dbm_to_w(-20.0);
        const auto x = frame(cfg, -20.0, InputLaw::psk(16), 9);
        const auto field = ssfm_propagate(wdm_mux(x, cfg), SsfmPlan::from_config(cfg), 77);
        const double snr = effective_snr(x.symbols[1], receiver_chain(field, 1, cfg));
        const double expected = P / (2.0 * ase_variance(cfg));
        CHECK(std::abs(10.0 * std::log10(snr / expected)) < 0.2);
    }

    TEST_CASE("halving the step barely moves the EVM") {
        auto cfg = small_ssfm();
        cfg.span_length_km = 50.0;
        cfg.noise_variance_w = 0.0;
        const auto x = frame(cfg, 5.0, InputLaw::disk(), 10);
        auto run = [&](double step) {
            cfg.ssfm.step_km = step;
            const auto f = ssfm_propagate(wdm_mux(x, cfg), SsfmPlan::from_config(cfg), 1);
            return evm(x.symbols[1], receiver_chain(f, 1, cfg));
        };
        const double a = run(0.02), b = run(0.01);
        CHECK(std::abs(a - b) < 0.01 * b);
    }

    TEST_CASE("MI across seeds is stable") {
        auto cfg = small_ssfm();
        cfg.span_length_km = 50.0;
        cfg.ssfm.step_km = 0.25;
        cfg.ssfm.symbols = 8192;
        std::vector<double> mi;
        for (std::uint64_t s = 1; s <= 5; ++s) mi.push_back(fig8_point(cfg, 0.0, Scenario::tin, s).mi_bits);
        double mean = 0.0, var = 0.0;
        for (double v : mi) mean += v / mi.size();
        for (double v : mi) var += (v - mean) * (v - mean) / (mi.size() - 1);
        CHECK(std::sqrt(var) < 0.02 * mean);
    }

    TEST_CASE("grid guards: bandwidth, bin alignment, aliasing, step mismatch") {
        auto cfg = small_ssfm();
        cfg.ssfm.samples_per_symbol = 8;  // 256 GHz < 3 x 100 + 50
        CHECK_THROWS(wdm_mux(frame(cfg, 0.0, InputLaw::disk(), 1), cfg));
        auto odd = small_ssfm();
        CHECK_THROWS(wdm_mux(frame(odd, 0.0, InputLaw::disk(), 1, 100), odd));

        FieldGrid white;
        white.dt = 1e-12;
        white.samples_per_symbol = 16;
        white.symbols = 64;
        white.offsets_hz = {0.0};
        white.samples = xpmcap::testing::random_cvec(1024, 3, 1e-3);
        CHECK_THROWS_AS(ssfm_propagate(white, lossless(1.0, 1.0, -21.7e-24, 0.0), 1), NumericalError);
        CHECK_THROWS(lossless(1.0, 0.3, 0.0, 0.0).steps());
        CHECK(lossless(1.0, 0.25, 0.0, 0.0).steps() == 4);
    }

    TEST_CASE("seeded points are reproducible and keyed by scenario and power") {
        auto cfg = small_ssfm();
        cfg.span_length_km = 50.0;
        cfg.ssfm.step_km = 0.5;
        const auto a = fig8_point(cfg, 2.0, Scenario::lower_bound, 3);
        const auto b = fig8_point(cfg, 2.0, Scenario::lower_bound, 3);
        CHECK(fig8_csv_row(a) == fig8_csv_row(b));
        CHECK(a.user == 1);
        CHECK(fig8_point(cfg, 2.0, Scenario::lower_bound, 4).mi_bits != a.mi_bits);
        CHECK(point_seed(1, Scenario::tin, 2.0) != point_seed(1, Scenario::lower_bound, 2.0));
        CHECK(point_seed(1, Scenario::tin, 2.0) != point_seed(1, Scenario::tin, 2.001));
        CHECK(point_seed(1, Scenario::tin, 2.0) == point_seed(1, Scenario::tin, 2.0));
        CHECK(fig8_csv_header() == "power_dBm,user,scenario,mi_bits,estimator,seed,n\n");
        CHECK(fig8_csv_row(a).find(",2,lower-bound,") != std::string::npos);
        CHECK(parse_scenario("tin") == Scenario::tin);
        CHECK_THROWS(parse_scenario("upper"));
    }
}
