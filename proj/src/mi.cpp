// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/mi.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace xpmcap {

std::string estimator_name(MiEstimator e) {
    return e == MiEstimator::gaussian_auxiliary ? "gaussian-auxiliary" : "histogram";
}

MiEstimator parse_estimator(const std::string& name) {
    if (name == "gaussian-auxiliary") return MiEstimator::gaussian_auxiliary;
    if (name == "histogram") return MiEstimator::histogram;
    throw std::invalid_argument("unknown MI estimator: " + name);
}

double log_bessel_i0(double x) {
    if (x < 0.0) x = -x;
    if (x < 500.0) return std::log(std::cyl_bessel_i(0.0, x));
    // Hankel asymptotic expansion; terms beyond the fourth are < 1e-13 here.
    const double r = 1.0 / (8.0 * x);
    const double series = 1.0 + r + 9.0 / 2.0 * r * r + 225.0 / 6.0 * r * r * r + 11025.0 / 24.0 * r * r * r * r;
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(series);
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log P(Z > t) for standard normal Z, t > 0 large.
double log_normal_tail(double t) {
    const double u = 1.0 / (t * t);
    return -0.5 * t * t - std::log(t * std::sqrt(2.0 * std::numbers::pi)) + std::log1p(-u + 3.0 * u * u);
}

// log q(y) for the law scaled by h, with residual complex variance s2.
class OutputDensity {
public:
    OutputDensity(const InputLaw& law, double peak_power, cd h, double s2) : law_(law), h_(h), s2_(s2) {
        radius_ = std::abs(h) * std::sqrt(peak_power);
        if (law.kind == InputLaw::Kind::psk) {
            for (int q = 0; q < law.order; ++q)
                points_.push_back(h * std::polar(std::sqrt(peak_power), 2.0 * std::numbers::pi * q / law.order));
        }
    }

    double log_q(cd y) const {
        const double rho = std::abs(y);
        switch (law_.kind) {
            case InputLaw::Kind::psk: {
                double best = -INFINITY;
                std::vector<double> e(points_.size());
                for (std::size_t i = 0; i < points_.size(); ++i) {
                    e[i] = -std::norm(y - points_[i]) / s2_;
                    best = std::max(best, e[i]);
                }
                double acc = 0.0;
                for (double v : e) acc += std::exp(v - best);
                return best + std::log(acc / points_.size()) - std::log(std::numbers::pi * s2_);
            }
            case InputLaw::Kind::ring: {
                const double R = radius_;
                return -(rho * rho + R * R) / s2_ + log_bessel_i0(2.0 * rho * R / s2_) - std::log(std::numbers::pi * s2_);
            }
            case InputLaw::Kind::disk: {
                // Mass of the noise disk around y that lands inside radius R:
                // a noncentral chi-square(2) cdf.
                const double R = radius_;
                namespace bm = boost::math;
                const double lambda = 2.0 * rho * rho / s2_;
                const double xq = 2.0 * R * R / s2_;
                const double log_area = std::log(std::numbers::pi * R * R);
                const double dist = (rho - R) / std::sqrt(0.5 * s2_);
                if ((std::abs(dist) > 30.0 && rho > 8.0 * std::sqrt(s2_)) || lambda > 1e6) {
                    // Far from the origin in units of the noise: the radial
                    // component is Gaussian to within s/rho.
                    if (dist < -30.0) return -log_area;
                    if (dist > 30.0) return log_normal_tail(dist) - log_area;
                    return std::log(0.5 * std::erfc(dist / std::numbers::sqrt2)) - log_area;
                }
                double cdf;
                if (lambda == 0.0) cdf = -std::expm1(-xq / 2.0);
                else cdf = bm::cdf(bm::non_central_chi_squared_distribution<double>(2.0, lambda), xq);
                cdf = std::max(cdf, std::numeric_limits<double>::min());
                return std::log(cdf) - log_area;
            }
        }
        return 0.0;
    }

private:
    InputLaw law_;
    cd h_;
    double s2_;
    double radius_ = 0.0;
    std::vector<cd> points_;
};

MiEstimate gaussian_auxiliary(const cvec& x, const cvec& y, const InputLaw& law, double peak_power, const MiParams& prm) {
    const std::size_t n = x.size();
    cd xy{};
    double xx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xy += y[i] * std::conj(x[i]);
        xx += std::norm(x[i]);
    }
    if (xx == 0.0) throw std::invalid_argument("estimate_mi: input has zero energy");
    const cd h = xy / xx;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s2 += std::norm(y[i] - h * x[i]);
    s2 /= static_cast<double>(n);
    s2 = std::max(s2, prm.residual_floor * std::norm(h) * xx / static_cast<double>(n));

    const OutputDensity q(law, peak_power, h, s2);
    const double log_norm = -std::log(std::numbers::pi * s2);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lc = log_norm - std::norm(y[i] - h * x[i]) / s2;
        const double v = (lc - q.log_q(y[i])) / kLn2;
        sum += v;
        sum2 += v * v;
    }
    MiEstimate out;
    out.estimator = MiEstimator::gaussian_auxiliary;
    out.n = n;
    out.gain = h;
    out.residual_var = s2;
    out.bits = sum / n;
    const double var = std::max(0.0, sum2 / n - out.bits * out.bits);
    out.standard_error = std::sqrt(var / n);
    return out;
}

// Plug-in estimate on a quantized (x, y) pair with the Miller-Madow
// bias correction. Diagnostic only.
MiEstimate histogram(const cvec& x, const cvec& y, const InputLaw& law, double peak_power, const MiParams& prm) {
    const std::size_t n = x.size();
    const int B = std::max(4, prm.bins);
    const int phase_cells = law.kind == InputLaw::Kind::psk ? law.order : 16;
    const int ring_cells = law.kind == InputLaw::Kind::disk ? 8 : 1;
    const int xcells = phase_cells * ring_cells;

    auto xcell = [&](cd v) {
        double ph = std::arg(v);
        if (ph < 0) ph += 2.0 * std::numbers::pi;
        int pc = static_cast<int>(std::floor(ph / (2.0 * std::numbers::pi) * phase_cells + 0.5)) % phase_cells;
        int rc = 0;
        if (ring_cells > 1) rc = std::min(ring_cells - 1, static_cast<int>(std::norm(v) / peak_power * ring_cells));
        return rc * phase_cells + pc;
    };
    double ymax = 0.0;
    for (const cd& v : y) ymax = std::max({ymax, std::abs(v.real()), std::abs(v.imag())});
    ymax = ymax > 0 ? ymax * (1.0 + 1e-9) : 1.0;
    auto ybin = [&](double v) { return std::min(B - 1, static_cast<int>((v + ymax) / (2.0 * ymax) * B)); };

    std::vector<double> joint(static_cast<std::size_t>(xcells) * B * B, 0.0), px(xcells, 0.0), py(B * B, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = xcell(x[i]);
        const int b = ybin(y[i].real()) * B + ybin(y[i].imag());
        joint[static_cast<std::size_t>(a) * B * B + b] += 1;
        px[a] += 1;
        py[b] += 1;
    }
    auto entropy = [n](const std::vector<double>& counts) {
        double h = 0.0;
        std::size_t occupied = 0;
        for (double c : counts)
            if (c > 0) {
                h -= c / n * std::log(c / n);
                ++occupied;
            }
        return h + (occupied - 1.0) / (2.0 * n);  // Miller-Madow
    };
    MiEstimate out;
    out.estimator = MiEstimator::histogram;
    out.n = n;
    out.bits = std::max(0.0, (entropy(px) + entropy(py) - entropy(joint)) / kLn2);
    out.standard_error = std::nan("");
    return out;
}

}  // namespace

MiEstimate estimate_mi(const cvec& x, const cvec& y, MiEstimator estimator, const InputLaw& law, double peak_power,
                       const MiParams& params) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("estimate_mi: x and y must be non-empty and equal length");
    if (!(peak_power > 0.0)) throw std::invalid_argument("estimate_mi: peak_power must be > 0");
    return estimator == MiEstimator::gaussian_auxiliary ? gaussian_auxiliary(x, y, law, peak_power, params)
                                                        : histogram(x, y, law, peak_power, params);
}

namespace oracle {

double bpsk_awgn_mi(double peak_power, double sigma_sq) {
    // I = 1 - E[log2(1 + exp(-2 a y / s2))], y ~ N(a, s2), a = sqrt(P).
    const double a = std::sqrt(peak_power), s = std::sqrt(sigma_sq);
    const int steps = 40000;
    const double lo = -14.0, hi = 14.0, du = (hi - lo) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double u = lo + i * du;
        const double yv = a + s * u;
        const double t = -2.0 * a * yv / sigma_sq;
        const double l = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        acc += w * std::exp(-0.5 * u * u) * l;
    }
    acc *= du / std::sqrt(2.0 * std::numbers::pi);
    return 1.0 - acc / kLn2;
}

double ring_awgn_mi(double peak_power, double sigma_sq) {
    // h(Y) - h(N) with Y radially symmetric; complex noise variance 2 sigma_sq.
    const double R = std::sqrt(peak_power), v = 2.0 * sigma_sq, s = std::sqrt(v);
    const double lo = std::max(0.0, R - 14.0 * s), hi = R + 14.0 * s;
    const int steps = 200000;
    const double dr = (hi - lo) / steps;
    double hy = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double rho = lo + i * dr;
        const double lq = -(rho * rho + R * R) / v + log_bessel_i0(2.0 * rho * R / v) - std::log(std::numbers::pi * v);
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        hy -= w * 2.0 * std::numbers::pi * rho * std::exp(lq) * lq;
    }
    hy *= dr;
    const double hn = std::log(std::numbers::pi * std::numbers::e * v);
    return (hy - hn) / kLn2;
}

}  // namespace oracle

}  // namespace xpmcap
