// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/coeffs.hpp"

#include "xpmcap/simd.hpp"
#include "xpmcap/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace xpmcap {

namespace {

// Trapezoid in the smooth factor with the e^{-alpha z} weight integrated
// exactly per interval. Reduces to the plain trapezoid at alpha = 0 and
// stays correct when the loss length is shorter than one z step.
void exp_trapezoid_weights(double x, double& w_left, double& w_right) {
    if (x < 1e-3) {
        w_left = 0.5 - x / 6.0 + x * x / 24.0;
        w_right = 0.5 - x / 3.0 + x * x / 8.0;
        return;
    }
    const double e = std::exp(-x);
    w_left = (x - 1.0 + e) / (x * x);
    w_right = (1.0 - (1.0 + x) * e) / (x * x);
}

void roll_into(const cvec& src, long shift, cvec& dst) {
    // dst[j] = src[(j - shift) mod n]
    const long n = static_cast<long>(src.size());
    long s = shift % n;
    if (s < 0) s += n;
    dst.resize(src.size());
    std::copy(src.end() - s, src.end(), dst.begin());
    std::copy(src.begin(), src.end() - s, dst.begin() + s);
}

// sum_j u[j] * v[(j - shift) mod n]
cd rolled_dot(const simd::KernelTable& k, const cvec& u, const cvec& v, long shift) {
    const long n = static_cast<long>(u.size());
    long s = shift % n;
    if (s < 0) s += n;
    cd acc = k.cdot(u.data() + s, v.data(), static_cast<std::size_t>(n - s));
    if (s > 0) acc += k.cdot(u.data(), v.data() + (n - s), static_cast<std::size_t>(s));
    return acc;
}

}  // namespace

std::vector<cd> collision_integrals(int spacing, std::span<const LagTriple> lags, const SystemConfig& cfg) {
    if (cfg.z_steps < 2) throw ConfigError("collision_integrals: z_steps must be >= 2");
    if (spacing < 1) throw std::invalid_argument("collision_integrals: users must differ");
    if (lags.empty()) return {};

    const double T = cfg.symbol_period();
    const int sps = cfg.samples_per_symbol;
    const SampledWaveform pulse = rrc_pulse(cfg.rolloff, T, sps, cfg.time_window_symbols);
    const std::size_t n = pulse.size();
    const double dt = pulse.dt;
    const double beta2 = cfg.beta2();
    const double L = cfg.span_length_km;
    const double walk_rate = beta2 * cfg.spacing_rad_s() * spacing;  // s per km

    std::vector<double> omega(n), disp_rate(n);
    for (std::size_t k = 0; k < n; ++k) {
        omega[k] = bin_omega(k, n, dt);
        disp_rate[k] = -0.5 * beta2 * omega[k] * omega[k];
    }

    Fft fft(n);
    cvec g0 = pulse.samples;
    fft.forward(g0);

    int max_lag = 0;
    std::set<int> ps, ds;
    for (const auto& t : lags) {
        max_lag = std::max({max_lag, std::abs(t.p), std::abs(t.l), std::abs(t.m)});
        ps.insert(t.p);
        ds.insert(t.l - t.m);
    }

    // The farthest-walked pulse at z = L, also displaced by the largest lag,
    // must stay clear of the window edges.
    {
        cvec probe(n);
        const double delta = walk_rate * L;
        for (std::size_t k = 0; k < n; ++k)
            probe[k] = g0[k] * std::polar(1.0, disp_rate[k] * L - omega[k] * delta);
        fft.inverse(probe);
        cvec moved;
        for (int sign : {-1, 1}) {
            roll_into(probe, static_cast<long>(sign) * max_lag * sps, moved);
            SampledWaveform w{moved, dt, pulse.t0};
            if (edge_energy_fraction(w) > 1e-6)
                throw NumericalError("collision_integrals: shift pushes pulse outside window; increase time_window_symbols");
        }
    }

    const auto& kern = simd::active();
    const double h = L / cfg.z_steps;
    const double x = cfg.alpha() * h;
    double wl = 0.5, wr = 0.5;
    exp_trapezoid_weights(x, wl, wr);

    std::vector<cd> out(lags.size(), cd{});
    cvec g(n), gd(n), tmp(n);
    std::map<int, cvec> u, v;
    std::vector<cd> prev(lags.size());

    for (int iz = 0; iz <= cfg.z_steps; ++iz) {
        const double z = h * iz;
        const double delta = walk_rate * z;
        for (std::size_t k = 0; k < n; ++k) {
            const cd d = g0[k] * std::polar(1.0, disp_rate[k] * z);
            g[k] = d;
            gd[k] = d * std::polar(1.0, -omega[k] * delta);
        }
        fft.inverse(g);
        fft.inverse(gd);

        for (int p : ps) {
            roll_into(g, static_cast<long>(p) * sps, tmp);
            auto& dst = u[p];
            dst.resize(n);
            kern.conj_mul(g.data(), tmp.data(), dst.data(), n);
        }
        for (int d : ds) {
            roll_into(gd, static_cast<long>(d) * sps, tmp);
            auto& dst = v[d];
            dst.resize(n);
            kern.conj_mul(gd.data(), tmp.data(), dst.data(), n);
        }

        // e^{-alpha z} at the interval's left end; the rest is in the weights.
        const double left_decay = std::exp(-cfg.alpha() * (z - h));
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const auto& t = lags[i];
            const cd cur = rolled_dot(kern, u[t.p], v[t.l - t.m], static_cast<long>(t.m) * sps) * (dt * T);
            if (iz > 0) out[i] += h * left_decay * (wl * prev[i] + wr * cur);
            prev[i] = cur;
        }
    }
    return out;
}

cd compute_S(int k, int w, int p, int l, int m, const SystemConfig& cfg) {
    if (k == w) throw std::invalid_argument("compute_S: k must differ from w");
    if (k < 0 || w < 0 || k >= cfg.num_users || w >= cfg.num_users) throw std::out_of_range("compute_S: user index");
    const LagTriple t{p, l, m};
    return collision_integrals(std::abs(k - w), std::span<const LagTriple>(&t, 1), cfg).front();
}

CoefficientTable::CoefficientTable(int num_users, int memory)
    : num_users_(num_users),
      memory_(memory),
      coef_(std::max(0, num_users - 1), std::vector<double>(2 * memory + 1, 0.0)),
      raw_(std::max(0, num_users - 1), std::vector<cd>(2 * memory + 1, cd{})) {}

void CoefficientTable::check(int k, int w, int m) const {
    if (k < 0 || w < 0 || k >= num_users_ || w >= num_users_) throw std::out_of_range("CoefficientTable: user index");
    if (m < -memory_ || m > memory_) throw std::out_of_range("CoefficientTable: lag");
}

double CoefficientTable::c(int k, int w, int m) const {
    check(k, w, m);
    if (k == w) return 0.0;
    return coef_[std::abs(k - w) - 1][m + memory_];
}

cd CoefficientTable::raw(int k, int w, int m) const {
    check(k, w, m);
    if (k == w) return {};
    return raw_[std::abs(k - w) - 1][m + memory_];
}

const double* CoefficientTable::taps(int k, int w) const {
    check(k, w, 0);
    if (k == w) return nullptr;
    return coef_[std::abs(k - w) - 1].data();
}

CoefficientTable CoefficientTable::scaled(double s) const {
    CoefficientTable out = *this;
    for (auto& row : out.coef_)
        for (auto& c : row) c *= s;
    return out;
}

CoefficientTable compute_coefficient_table(const SystemConfig& cfg) {
    cfg.validate();
    CoefficientTable table(cfg.num_users, cfg.memory);
    std::vector<LagTriple> lags;
    for (int m = -cfg.memory; m <= cfg.memory; ++m) lags.push_back({0, m, m});

    for (int d = 1; d < cfg.num_users; ++d) {
        const std::vector<cd> s = collision_integrals(d, lags, cfg);
        auto& raw = table.raw_for_spacing(d);
        auto& coef = table.coef_for_spacing(d);
        for (std::size_t i = 0; i < s.size(); ++i) {
            raw[i] = s[i];
            const double mag = std::abs(s[i]);
            if (mag > 0.0 && std::abs(s[i].imag()) / mag >= 1e-3)
                throw NumericalError("compute_coefficient_table: |Im S|/|S| >= 1e-3 at spacing " + std::to_string(d) +
                                     ", lag " + std::to_string(lags[i].m) + " (quadrature error)");
            double c = cfg.gamma_per_w_km * s[i].real();
            if (c < 0.0) {
                if (c > -1e-12) c = 0.0;
                else throw NumericalError("compute_coefficient_table: negative coefficient " + std::to_string(c));
            }
            coef[i] = c;
        }
    }
    return table;
}

std::string coefficient_csv(const CoefficientTable& table) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k,w,m,c_real,S_raw_re,S_raw_im\n";
    for (int k = 0; k < table.num_users(); ++k)
        for (int w = 0; w < table.num_users(); ++w) {
            if (k == w) continue;
            for (int m = -table.memory(); m <= table.memory(); ++m) {
                const cd r = table.raw(k, w, m);
                os << k + 1 << ',' << w + 1 << ',' << m << ',' << table.c(k, w, m) << ',' << r.real() << ',' << r.imag()
                   << '\n';
            }
        }
    return os.str();
}

CoefficientTable parse_coefficient_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "k,w,m,c_real,S_raw_re,S_raw_im")
        throw std::runtime_error("coefficient csv: bad header");
    struct Row {
        int k, w, m;
        double c, re, im;
    };
    std::vector<Row> rows;
    int users = 0, memory = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row r{};
        char c1, c2, c3, c4, c5;
        std::istringstream ls(line);
        if (!(ls >> r.k >> c1 >> r.w >> c2 >> r.m >> c3 >> r.c >> c4 >> r.re >> c5 >> r.im))
            throw std::runtime_error("coefficient csv: malformed row: " + line);
        users = std::max({users, r.k, r.w});
        memory = std::max(memory, std::abs(r.m));
        rows.push_back(r);
    }
    CoefficientTable table(users, memory);
    std::vector<std::vector<int>> seen(std::max(0, users - 1), std::vector<int>(2 * memory + 1, 0));
    for (const auto& r : rows) {
        if (r.k == r.w || r.k < 1 || r.w < 1) throw std::runtime_error("coefficient csv: bad user pair");
        const int d = std::abs(r.k - r.w);
        table.coef_for_spacing(d)[r.m + memory] = r.c;
        table.raw_for_spacing(d)[r.m + memory] = {r.re, r.im};
        seen[d - 1][r.m + memory] = 1;
    }
    for (const auto& row : seen)
        for (int s : row)
            if (!s) throw std::runtime_error("coefficient csv: incomplete table");
    return table;
}

TableStructure table_structure(const CoefficientTable& table) {
    TableStructure out;
    const int M = table.memory();
    for (int d = 1; d < table.num_users(); ++d) {
        const auto& c = table.coef_for_spacing(d);
        const double c0 = c[M];
        for (int m = 1; m <= M; ++m) {
            const double asym = std::abs(c[M + m] - c[M - m]);
            out.max_lag_asymmetry = std::max(out.max_lag_asymmetry, c0 > 0 ? asym / c0 : asym);
        }
    }
    if (table.num_users() >= 2) {
        const auto& c = table.coef_for_spacing(1);
        for (int m = -M; m <= M; ++m)
            if (std::abs(m) > 10 && c[M] > 0) out.max_tail_ratio = std::max(out.max_tail_ratio, c[M + m] / c[M]);
    }
    if (table.num_users() >= 3) {
        const auto& c1 = table.coef_for_spacing(1);
        const auto& c2 = table.coef_for_spacing(2);
        for (int i = 0; i < table.lags(); ++i)
            if (c1[i] < c2[i]) out.spacing_monotone = false;
    }
    return out;
}

}  // namespace xpmcap
