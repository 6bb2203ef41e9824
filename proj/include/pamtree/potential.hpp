#pragma once
// Double-exponential potential sampling, exceedance thresholds, island
// geometry, peak counters and the binomial Chernoff bound.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pamtree/graph.hpp"

namespace pamtree {

struct PotentialField {
    std::vector<double> xi;  // per vertex of the host tree; unsampled entries are 0
    double rho = 1.0;
};

// i.i.d. xi = max(0, rho*log log(1/U)) on the given vertices. Draws come from
// per-vertex streams, so a vertex's value depends only on (seed, vertex id).
PotentialField sample_potential(std::size_t host_vertices, const VertexSubset& vertices,
                                double rho, std::uint64_t seed);

// a_L = rho*log log L. Requires L >= 16 so the threshold is safely positive.
double exceedance_threshold(std::size_t L, double rho);

enum class SrBase { LogR, LogLr };  // (log r)^alpha per definition; log L_r per the prose variant

struct IslandComponent {
    VertexSubset cells;
    std::uint32_t pi_hits = 0;  // |C ∩ Π|
    std::optional<double> eigenvalue;
};

struct IslandSet {
    std::uint32_t r = 0;
    double A = 0.0;
    double alpha = 0.0;
    double S_r = 0.0;
    double a_Lr = 0.0;
    double threshold = 0.0;  // a_Lr - 2A
    std::size_t L_r = 0;     // |B_r(root)|
    VertexSubset pi;         // Π_{r,A}
    VertexSubset d;          // D_{r,A}
    std::vector<IslandComponent> components;

    std::size_t max_component_size() const;  // C_{r,A}; 0 when empty
};

// Π = {z in B_r : xi(z) > a_{L_r} - 2A}, D = S_r-neighbourhood of Π inside
// B_r, components of the induced subgraph of D. Requires r >= 2.
IslandSet islands(const RootedTree& tree, const PotentialField& field, std::uint32_t r, double A,
                  double alpha, SrBase base = SrBase::LogR);

// M_A = ceil(1/c_A), c_A = e^{-2A/rho}. A = 0 gives 1.
std::uint64_t island_size_cap(double rho, double A);

// P(Bin(n,p) >= u) <= exp(-u[log(u/(np)) - 1]), u > 0.
double chernoff_binomial(std::uint64_t n, double p, double u);

// |{z in the support set : xi(z) > level}|
std::size_t peak_count(std::span<const VertexId> support, const PotentialField& field,
                       double level);

struct MaxDeviationReport {
    double max_xi = 0.0;
    double a_Lr = 0.0;
    double gap = 0.0;        // |max_xi - a_Lr|
    double tolerance = 0.0;  // 2 rho log r / (theta r)
};
MaxDeviationReport potential_max_deviation(const RootedTree& tree, const PotentialField& field,
                                           std::uint32_t r, double theta);

}  // namespace pamtree
