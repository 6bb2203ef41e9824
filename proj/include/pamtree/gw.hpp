#pragma once
// Galton-Watson tree sampling: offspring laws, branching rate, the W_k
// martingale and the super-double-exponential tail checker.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pamtree/graph.hpp"
#include "pamtree/rng.hpp"

namespace pamtree {

class OffspringLaw {
  public:
    enum class Kind { Deterministic, Table, TruncatedGeometric, ConditionedPoisson };

    static OffspringLaw deterministic(std::uint32_t d);
    // probs: (value, probability) pairs, values distinct, probs sum to 1 (1e-12).
    static OffspringLaw table(std::vector<std::pair<std::uint32_t, double>> probs);
    // P(D = d_min + j) = (1-q) q^j, j >= 0.
    static OffspringLaw truncated_geometric(std::uint32_t d_min, double q);
    // Poisson(lambda) conditioned on D >= d_min.
    static OffspringLaw conditioned_poisson(double lambda, std::uint32_t d_min);

    Kind kind() const { return kind_; }
    std::uint32_t d_min() const { return d_min_; }
    double mean() const { return mean_; }

    std::uint32_t draw(RngStream& rng) const;

    // log P(D > m) for real m >= 0; -inf where the tail vanishes.
    double log_upper_tail(double m) const;

  private:
    OffspringLaw() = default;
    void validate() const;

    Kind kind_ = Kind::Deterministic;
    std::uint32_t d_min_ = 2;
    double mean_ = 2.0;
    double geo_q_ = 0.0;
    double pois_lambda_ = 0.0;
    // (value, cumulative probability); inversion table for Table and
    // ConditionedPoisson draws.
    std::vector<std::pair<std::uint32_t, double>> cdf_;
    std::vector<std::pair<std::uint32_t, double>> pmf_;
};

// theta = log E[D]
double growth_rate(const OffspringLaw& law);

// Samples a GW tree down to max_depth. Offspring counts are drawn from
// per-vertex streams keyed by BFS id, so the result is a deterministic
// function of (law, max_depth, seed). Throws resource_error (naming the
// generation reached) when the vertex budget would be exceeded.
RootedTree sample_tree(const OffspringLaw& law, std::uint32_t max_depth, std::uint64_t seed,
                       std::size_t vertex_cap = 16777216);

// Like sample_tree, but stops early (returning the completed prefix) instead
// of throwing when the next generation would exceed the cap.
RootedTree sample_tree_capped(const OffspringLaw& law, std::uint32_t max_depth,
                              std::uint64_t seed, std::size_t vertex_cap);

// W_k = e^{-k theta} Z_k for k = 0..depth.
std::vector<double> martingale_path(const RootedTree& tree, double theta);

struct TailCheckSpec {
    std::function<double(double)> f;  // exponent function in the threshold s^{f(s)}
    std::vector<double> s_grid;       // increasing
    double theta = 0.0;
    double margin_frac = 0.05;   // slack below -2*theta, as a fraction of 2*theta
    double tail_fraction = 0.25; // verdict looks at the last fraction of the grid
};

struct TailCheckRow {
    double s = 0.0;
    double threshold = 0.0;  // s^{f(s)}
    double log_tail = 0.0;   // log P(D > threshold)
    double scaled = 0.0;     // e^{-s} log P(D > threshold)
};

struct TailCheckReport {
    std::vector<TailCheckRow> rows;
    double bound = 0.0;  // -2 theta - margin
    bool pass = false;
    void write_csv(std::ostream& os) const;  // columns: s,threshold,log_tail,scaled,verdict
};

TailCheckReport check_super_de_tail(const OffspringLaw& law, const TailCheckSpec& spec);
TailCheckReport check_super_de_tail(const std::function<double(double)>& log_upper_tail,
                                    const TailCheckSpec& spec);

// Degree envelope delta_r: slowly vanishing exponent in the bound
// max degree in B_2r <= (log r)^{delta_r}. Clamped to [0.05, 1].
double default_delta_r(double r);

}  // namespace pamtree
