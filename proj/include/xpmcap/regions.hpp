// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xpmcap/bounds.hpp"

#include <string>
#include <vector>

namespace xpmcap {

using RateTuple = std::vector<double>;

struct Halfspace {
    std::vector<double> normal;
    double offset = 0.0;  // normal . r <= offset
};

struct RateRegion {
    enum class Kind { outer_cuboid, tin_cuboid, timeshare_polytope };
    Kind kind = Kind::outer_cuboid;
    std::vector<RateTuple> vertices;
    std::vector<Halfspace> halfspaces;
    std::vector<double> tolerances;  // per vertex, bits (MC error bars); 0 for closed forms

    int dimension() const { return vertices.empty() ? 0 : static_cast<int>(vertices.front().size()); }
};

std::string kind_name(RateRegion::Kind k);

// [0,edge_1] x ... x [0,edge_K]
RateRegion cuboid(const std::vector<double>& edges, RateRegion::Kind kind);

RateRegion outer_region(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq);
// nli_sq[k] per real dimension.
RateRegion tin_region(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq,
                      const std::vector<double>& nli_sq);

struct TimeshareVertices {
    std::vector<RateTuple> vertices;          // vertex k has user k as focus
    std::vector<std::vector<double>> errors;  // standard errors, 0 on the focus coordinate
};

TimeshareVertices timeshare_vertices(const std::vector<double>& powers, const CoefficientTable& table, double sigma_sq,
                                     int psk_order, std::size_t mc_samples, std::uint64_t seed);

// Downward closure of conv(vertices + origin) in the nonnegative orthant.
// Exact facet enumeration; dimension <= 4.
RateRegion timeshare_region(const std::vector<RateTuple>& vertices, const std::vector<double>& tolerances = {});

// Halfspace membership with `slack` (default 1e-9).
bool contains(const RateRegion& region, const RateTuple& point, double slack = 1e-9);

// Largest halfspace violation of `point` (<= 0 means inside).
double excess(const RateRegion& region, const RateTuple& point);

std::string region_json(const RateRegion& region, const std::string& provenance_json = "{}");
// One row per facet vertex: facet,vertex,r1,...,rK (3-D facets are convex
// polygons listed in boundary order).
std::string region_facets_csv(const RateRegion& region);

}  // namespace xpmcap
