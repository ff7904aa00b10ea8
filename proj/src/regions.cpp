// SPDX-License-Identifier: Apache-2.0
#include "xpmcap/regions.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace xpmcap {

std::string kind_name(RateRegion::Kind k) {
    switch (k) {
        case RateRegion::Kind::outer_cuboid: return "outer-cuboid";
        case RateRegion::Kind::tin_cuboid: return "tin-cuboid";
        case RateRegion::Kind::timeshare_polytope: return "timeshare-polytope";
    }
    return "?";
}

RateRegion cuboid(const std::vector<double>& edges, RateRegion::Kind kind) {
    const int K = static_cast<int>(edges.size());
    if (K < 1 || K > 20) throw std::invalid_argument("cuboid: dimension must be in [1, 20]");
    for (double e : edges)
        if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("cuboid: edges must be finite and >= 0");
    RateRegion r;
    r.kind = kind;
    for (unsigned mask = 0; mask < (1u << K); ++mask) {
        RateTuple v(K, 0.0);
        for (int k = 0; k < K; ++k)
            if (mask & (1u << k)) v[k] = edges[k];
        r.vertices.push_back(v);
    }
    for (int k = 0; k < K; ++k) {
        std::vector<double> n(K, 0.0);
        n[k] = 1.0;
        r.halfspaces.push_back({n, edges[k]});
        n[k] = -1.0;
        r.halfspaces.push_back({n, 0.0});
    }
    r.tolerances.assign(r.vertices.size(), 0.0);
    return r;
}

RateRegion outer_region(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq) {
    std::vector<double> edges;
    for (int k = 0; k < table.num_users(); ++k) edges.push_back(outer_bound(k, powers, table, sigma_sq));
    return cuboid(edges, RateRegion::Kind::outer_cuboid);
}

RateRegion tin_region(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq,
                      const std::vector<double>& nli_sq) {
    if (static_cast<int>(nli_sq.size()) != table.num_users()) throw std::invalid_argument("tin_region: nli size");
    std::vector<double> edges;
    for (int k = 0; k < table.num_users(); ++k) edges.push_back(tin_bound(powers.at(k), sigma_sq, nli_sq[k]));
    return cuboid(edges, RateRegion::Kind::tin_cuboid);
}

TimeshareVertices timeshare_vertices(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq,
                                     int psk_order, std::size_t mc_samples, std::uint64_t seed) {
    const int K = table.num_users();
    TimeshareVertices out;
    for (int k = 0; k < K; ++k) {
        RateTuple v(K, 0.0);
        std::vector<double> err(K, 0.0);
        v[k] = inner_bound(k, powers, table, sigma_sq);
        for (int w = 0; w < K; ++w) {
            if (w == k) continue;
            // One frame per focus user; every interferer reads its rate from it.
            const RateEstimate r = psk_interferer_rate(w, k, powers, table, sigma_sq, psk_order, mc_samples,
                                                       seed + 7919ULL * static_cast<std::uint64_t>(k));
            v[w] = std::max(0.0, r.bits);
            err[w] = r.standard_error;
        }
        out.vertices.push_back(v);
        out.errors.push_back(err);
    }
    return out;
}

namespace {

using Mat = std::vector<std::vector<double>>;

// Solve for the hyperplane through K points in R^K: normal n with
// n . (p_i - p_0) = 0. Returns false when the points are degenerate.
bool hyperplane(const std::vector<const RateTuple*>& pts, std::vector<double>& normal, double& offset) {
    const int K = static_cast<int>(pts.front()->size());
    Mat a(K - 1, std::vector<double>(K));
    for (int i = 1; i < K; ++i)
        for (int j = 0; j < K; ++j) a[i - 1][j] = (*pts[i])[j] - (*pts[0])[j];
    // Normal via cofactors: n_j = (-1)^j det(a without column j).
    auto det = [](Mat m) {
        const int n = static_cast<int>(m.size());
        double d = 1.0;
        for (int c = 0; c < n; ++c) {
            int piv = c;
            for (int r = c + 1; r < n; ++r)
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
            if (m[piv][c] == 0.0) return 0.0;
            if (piv != c) {
                std::swap(m[piv], m[c]);
                d = -d;
            }
            d *= m[c][c];
            for (int r = c + 1; r < n; ++r) {
                const double f = m[r][c] / m[c][c];
                for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
            }
        }
        return d;
    };
    normal.assign(K, 0.0);
    for (int j = 0; j < K; ++j) {
        Mat minor(K - 1, std::vector<double>());
        for (int i = 0; i < K - 1; ++i)
            for (int c = 0; c < K; ++c)
                if (c != j) minor[i].push_back(a[i][c]);
        normal[j] = ((j % 2) ? -1.0 : 1.0) * (K == 1 ? 1.0 : det(minor));
    }
    const double len = std::sqrt(std::inner_product(normal.begin(), normal.end(), normal.begin(), 0.0));
    if (len < 1e-12) return false;
    for (double& x : normal) x /= len;
    offset = std::inner_product(normal.begin(), normal.end(), pts[0]->begin(), 0.0);
    return true;
}

double dot(const std::vector<double>& a, const RateTuple& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

}  // namespace

RateRegion timeshare_region(const std::vector<RateTuple>& vertices, const std::vector<double>& tolerances) {
    if (vertices.empty()) throw std::invalid_argument("timeshare_region: no vertices");
    const int K = static_cast<int>(vertices.front().size());
    if (K < 1 || K > 4) throw std::invalid_argument("timeshare_region: exact hull supported for dimension <= 4");
    for (const auto& v : vertices) {
        if (static_cast<int>(v.size()) != K) throw std::invalid_argument("timeshare_region: ragged vertices");
        for (double x : v)
            if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("timeshare_region: rates must be >= 0");
    }

    // Downward closure in the orthant = hull of every coordinate-zeroing
    // projection of every vertex (the origin included).
    std::vector<RateTuple> pts;
    for (const auto& v : vertices)
        for (unsigned mask = 0; mask < (1u << K); ++mask) {
            RateTuple p = v;
            for (int k = 0; k < K; ++k)
                if (mask & (1u << k)) p[k] = 0.0;
            if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
        }

    double scale = 0.0;
    for (const auto& p : pts)
        for (double x : p) scale = std::max(scale, x);
    const double eps = 1e-10 * std::max(1.0, scale);

    RateRegion r;
    r.kind = RateRegion::Kind::timeshare_polytope;
    for (int k = 0; k < K; ++k) {
        std::vector<double> n(K, 0.0);
        n[k] = -1.0;
        r.halfspaces.push_back({n, 0.0});
    }

    // Enumerate K-subsets; keep hyperplanes with every point on one side.
    const int np = static_cast<int>(pts.size());
    std::vector<int> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    auto already = [&](const std::vector<double>& n, double off) {
        for (const auto& h : r.halfspaces) {
            double d = std::abs(h.offset - off);
            for (int k = 0; k < K; ++k) d = std::max(d, std::abs(h.normal[k] - n[k]));
            if (d < 1e-9) return true;
        }
        return false;
    };
    while (np >= K) {
        std::vector<const RateTuple*> sel;
        for (int i : idx) sel.push_back(&pts[i]);
        std::vector<double> n;
        double off = 0.0;
        if (hyperplane(sel, n, off)) {
            bool below = true, above = true;
            for (const auto& p : pts) {
                const double s = dot(n, p) - off;
                if (s > eps) below = false;
                if (s < -eps) above = false;
            }
            if (above && !below) {
                for (double& x : n) x = -x;
                off = -off;
                below = true;
            }
            if (below && !already(n, off)) r.halfspaces.push_back({n, off});
        }
        // next combination
        int i = K - 1;
        while (i >= 0 && idx[i] == np - K + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < K; ++j) idx[j] = idx[j - 1] + 1;
    }
    // A flat point set (all points on one hyperplane) is still closed by
    // the orthant constraints plus that plane; nothing further to do.

    // Vertices: points lying on at least K independent facets.
    for (const auto& p : pts) {
        int tight = 0;
        for (const auto& h : r.halfspaces)
            if (std::abs(dot(h.normal, p) - h.offset) <= eps) ++tight;
        if (tight >= K) r.vertices.push_back(p);
    }
    // Tolerances follow the generating vertex with the largest error.
    const double tol = tolerances.empty() ? 0.0 : *std::max_element(tolerances.begin(), tolerances.end());
    r.tolerances.assign(r.vertices.size(), tol);
    return r;
}

bool contains(const RateRegion& region, const RateTuple& point, double slack) { return excess(region, point) <= slack; }

double excess(const RateRegion& region, const RateTuple& point) {
    if (static_cast<int>(point.size()) != region.dimension()) throw std::invalid_argument("contains: dimension mismatch");
    double worst = -INFINITY;
    for (const auto& h : region.halfspaces) worst = std::max(worst, dot(h.normal, point) - h.offset);
    return worst;
}

std::string region_json(const RateRegion& region, const std::string& provenance_json) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(region.kind);
    j["vertices"] = region.vertices;
    auto hs = nlohmann::ordered_json::array();
    for (const auto& h : region.halfspaces) hs.push_back({{"normal", h.normal}, {"offset", h.offset}});
    j["halfspaces"] = hs;
    j["tolerances"] = region.tolerances;
    j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    return j.dump(2) + "\n";
}

std::string region_facets_csv(const RateRegion& region) {
    const int K = region.dimension();
    std::ostringstream os;
    os << std::setprecision(17) << "facet,vertex";
    for (int k = 0; k < K; ++k) os << ",r" << k + 1;
    os << '\n';
    const double eps = 1e-9;
    int facet = 0;
    for (const auto& h : region.halfspaces) {
        std::vector<RateTuple> on;
        for (const auto& v : region.vertices)
            if (std::abs(dot(h.normal, v) - h.offset) <= eps * std::max(1.0, std::abs(h.offset))) on.push_back(v);
        if (static_cast<int>(on.size()) < K) continue;
        if (K == 3) {
            // Order around the centroid in the facet plane.
            RateTuple c(3, 0.0);
            for (const auto& v : on)
                for (int k = 0; k < 3; ++k) c[k] += v[k] / on.size();
            std::vector<double> u(3), w(3);
            for (int k = 0; k < 3; ++k) u[k] = on[0][k] - c[k];
            const auto& n = h.normal;
            w = {n[1] * u[2] - n[2] * u[1], n[2] * u[0] - n[0] * u[2], n[0] * u[1] - n[1] * u[0]};
            std::sort(on.begin(), on.end(), [&](const RateTuple& a, const RateTuple& b) {
                auto ang = [&](const RateTuple& p) {
                    double x = 0, y = 0;
                    for (int k = 0; k < 3; ++k) {
                        x += (p[k] - c[k]) * u[k];
                        y += (p[k] - c[k]) * w[k];
                    }
                    return std::atan2(y, x);
                };
                return ang(a) < ang(b);
            });
        }
        for (std::size_t i = 0; i < on.size(); ++i) {
            os << facet << ',' << i;
            for (double x : on[i]) os << ',' << x;
            os << '\n';
        }
        ++facet;
    }
    return os.str();
}

}  // namespace xpmcap
