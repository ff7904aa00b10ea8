#include "support.hpp"
#include "xpmcap/regions.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace xpmcap;

namespace {

CoefficientTable decaying_table(int K, int M, double c0) {
    CoefficientTable t(K, M);
    for (int s = 1; s < K; ++s)
        for (int m = -M; m <= M; ++m) t.coef_for_spacing(s)[m + M] = c0 * std::exp(-std::abs(m) / 3.0) / s;
    return t;
}

std::vector<RateTuple> three_vertices() { return {{6.0, 1.0, 0.5}, {0.8, 5.5, 1.2}, {1.1, 0.4, 6.2}}; }

// Random convex combination of vertices and the origin, then shrunk
// coordinate-wise: always a member of the downward-closed hull.
RateTuple random_member(const std::vector<RateTuple>& v, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(v.size() + 1);
    double s = 0.0;
    for (auto& x : w) s += (x = e(rng));
    RateTuple r(v.front().size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t d = 0; d < r.size(); ++d) r[d] += w[i] / s * v[i][d];
    for (auto& x : r) x *= (u(rng) < 0.3 ? u(rng) : 1.0);
    return r;
}

// A point certified outside by a nonnegative separating direction: the
// hull's support value in direction w is max(0, max_v w.v).
RateTuple random_outsider(const std::vector<RateTuple>& v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t K = v.front().size();
    std::vector<double> w(K), dir(K);
    for (auto& x : w) x = u(rng) + 1e-3;
    for (auto& x : dir) x = u(rng) + 1e-3;
    double support = 0.0;
    for (const auto& p : v) {
        double s = 0.0;
        for (std::size_t d = 0; d < K; ++d) s += w[d] * p[d];
        support = std::max(support, s);
    }
    double wd = 0.0;
    for (std::size_t d = 0; d < K; ++d) wd += w[d] * dir[d];
    const double target = support * (1.0 + 0.01 + 0.5 * u(rng));
    RateTuple r(K);
    for (std::size_t d = 0; d < K; ++d) r[d] = dir[d] * target / wd;
    return r;
}

}  // namespace

TEST_SUITE("regions") {
    TEST_CASE("cuboid membership") {
        const auto c = cuboid({2.0, 3.0, 4.0}, RateRegion::Kind::outer_cuboid);
        CHECK(c.vertices.size() == 8);
        CHECK(contains(c, {0.0, 0.0, 0.0}));
        CHECK(contains(c, {2.0, 3.0, 4.0}));
        CHECK_FALSE(contains(c, {2.0 + 1e-6, 0.0, 0.0}));
        CHECK_FALSE(contains(c, {-1e-6, 0.0, 0.0}));
        CHECK(excess(c, {3.0, 0.0, 0.0}) == doctest::Approx(1.0));
    }

    TEST_CASE("outer region is the cube of outer bounds") {
        const auto t = decaying_table(3, 11, 3.0);
        const std::vector<double> P(3, 1.3e-3);
        const auto r = outer_region(P, t, 2e-4);
        const double U = outer_bound(1, P, t, 2e-4);
        CHECK(outer_bound(0, P, t, 2e-4) == doctest::Approx(outer_bound(2, P, t, 2e-4)).epsilon(1e-15));
        CHECK(contains(r, {outer_bound(0, P, t, 2e-4), U, outer_bound(2, P, t, 2e-4)}));
        CHECK_FALSE(contains(r, {outer_bound(0, P, t, 2e-4) + 1e-6, 0.0, 0.0}));
        CHECK(kind_name(r.kind) == "outer-cuboid");
    }

    TEST_CASE("TIN region: edges, vanishing at high power, zero-table limit") {
        const auto t = decaying_table(3, 11, 3.0);
        const double s2 = 2e-4;
        auto edges = [&](double P, const CoefficientTable& tab) {
            std::vector<double> nli(3);
            for (int k = 0; k < 3; ++k) nli[k] = 0.5 * nli_variance(k, std::vector<double>(3, P), tab, InputLaw::disk(), 20000, 1).variance;
            const auto r = tin_region(std::vector<double>(3, P), tab, s2, nli);
            for (int k = 0; k < 3; ++k) CHECK(contains(r, {k == 0 ? tin_bound(P, s2, nli[0]) : 0.0, k == 1 ? tin_bound(P, s2, nli[1]) : 0.0, 0.0}));
            return tin_bound(P, s2, nli[1]);
        };
        const double mid = edges(1e-3, t);
        const double high = edges(1.0, t);
        CHECK(high < 0.01 * mid);
        CHECK(edges(1e-3, CoefficientTable(3, 11)) == doctest::Approx(std::log2(1.0 + 1e-3 / (2.0 * s2 * std::numbers::e))).epsilon(1e-14));
    }

    TEST_CASE("two vertices: segment points, endpoints and just-outside points") {
        const std::vector<RateTuple> v = {{3.0, 1.0}, {1.0, 2.5}};
        const auto r = timeshare_region(v);
        CHECK(contains(r, {2.0, 1.75}));
        CHECK(contains(r, v[0]));
        CHECK(contains(r, v[1]));
        CHECK(contains(r, {0.0, 0.0}));
        CHECK(contains(r, {3.0, 0.0}));
        CHECK_FALSE(contains(r, {2.0, 1.75 + 1e-6}));
        CHECK_FALSE(contains(r, {3.0 + 1e-6, 0.0}));
    }

    TEST_CASE("three vertices: sampled membership against independent oracles") {
        const auto v = three_vertices();
        const auto r = timeshare_region(v);
        CHECK(kind_name(r.kind) == "timeshare-polytope");
        std::mt19937_64 rng(11);
        for (int i = 0; i < 10000; ++i) CHECK(contains(r, random_member(v, rng)));
        for (int i = 0; i < 10000; ++i) CHECK_FALSE(contains(r, random_outsider(v, rng)));
        for (const auto& p : v) {
            CHECK(contains(r, p));
            RateTuple q = p;
            for (auto& x : q) x += 1e-6;
            CHECK_FALSE(contains(r, q));
        }
        // Every listed vertex satisfies every halfspace.
        for (const auto& p : r.vertices)
            for (const auto& h : r.halfspaces) {
                double s = 0.0;
                for (std::size_t d = 0; d < p.size(); ++d) s += h.normal[d] * p[d];
                CHECK(s <= h.offset + 1e-9);
            }
    }

    TEST_CASE("convexity and downward closure hold on samples") {
        const auto v = three_vertices();
        const auto r = timeshare_region(v);
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 2000; ++i) {
            const RateTuple a = random_member(v, rng), b = random_member(v, rng);
            const double lam = u(rng);
            RateTuple c(3), d(3);
            for (int k = 0; k < 3; ++k) {
                c[k] = lam * a[k] + (1 - lam) * b[k];
                d[k] = a[k] * u(rng);
            }
            CHECK(contains(r, c));
            CHECK(contains(r, d));
        }
    }

    TEST_CASE("PSK vertices: cyclic symmetry and exact focus coordinate") {
        const auto t = decaying_table(3, 11, 3.0);
        const std::vector<double> P(3, 1e-3);
        const double s2 = 1e-5;
        const auto tv = timeshare_vertices(P, t, s2, 16, 40000, 3);
        REQUIRE(tv.vertices.size() == 3);
        for (int k = 0; k < 3; ++k) {
            CHECK(tv.vertices[k][k] == inner_bound(k, P, t, s2));
            CHECK(tv.errors[k][k] == 0.0);
        }
        // vertex k, coordinate k+1 (the neighbour "to the right") is the
        // same role for every k up to MC error; likewise k-1.
        auto close = [&](int a, int da, int b, int db) {
            const double x = tv.vertices[a][da], y = tv.vertices[b][db];
            const double tol = 4.0 * std::hypot(tv.errors[a][da], tv.errors[b][db]) + 1e-9;
            CHECK(std::abs(x - y) <= tol);
        };
        close(0, 1, 2, 1);  // middle user seen from either edge focus
        close(0, 2, 2, 0);  // far edge user
        close(1, 0, 1, 2);  // edge users with the middle focus
        const auto r = timeshare_region(tv.vertices);
        const auto outer = outer_region(P, t, s2);
        for (const auto& v : r.vertices) CHECK(contains(outer, v));
    }

    TEST_CASE("export formats") {
        const auto r = timeshare_region(three_vertices(), {0.01, 0.02, 0.03});
        const std::string js = region_json(r, "{\"power_dBm\":1.1}");
        for (const char* key : {"\"kind\"", "\"vertices\"", "\"halfspaces\"", "\"tolerances\"", "\"provenance\""})
            CHECK(js.find(key) != std::string::npos);
        const std::string csv = region_facets_csv(r);
        CHECK(csv.rfind("facet,vertex,r1,r2,r3\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') > 4);
    }

    TEST_CASE("unsupported dimension is rejected") {
        std::vector<RateTuple> v(5, RateTuple(5, 1.0));
        CHECK_THROWS(timeshare_region(v));
    }
}
