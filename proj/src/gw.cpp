#include "pamtree/gw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace pamtree {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum of exp(x_i)) over Poisson log-pmf terms, streamed from k0 upward
// until the remainder is negligible.
double log_poisson_upper_tail_inclusive(double lambda, std::uint64_t k0) {
    // log P(Pois(lambda) >= k0)
    if (k0 == 0) return 0.0;
    double log_term = static_cast<double>(k0) * std::log(lambda) - lambda -
                      std::lgamma(static_cast<double>(k0) + 1.0);
    double log_sum = log_term;
    for (std::uint64_t k = k0 + 1; k < k0 + 100000; ++k) {
        log_term += std::log(lambda) - std::log(static_cast<double>(k));
        const double upd = std::max(log_sum, log_term) +
                           std::log1p(std::exp(-std::abs(log_sum - log_term)));
        const double ratio = lambda / static_cast<double>(k + 1);
        log_sum = upd;
        if (ratio < 1.0) {
            // geometric envelope for the remainder
            const double log_rem = log_term + std::log(ratio) - std::log1p(-ratio);
            if (log_rem < log_sum - 40.0) break;
        }
    }
    return log_sum;
}
}  // namespace

void OffspringLaw::validate() const {
    if (d_min_ < 2) throw input_error("offspring law: d_min must be >= 2");
    if (!(mean_ >= 2.0) || !std::isfinite(mean_)) {
        throw input_error("offspring law: mean offspring must be finite and >= 2");
    }
}

OffspringLaw OffspringLaw::deterministic(std::uint32_t d) {
    OffspringLaw law;
    law.kind_ = Kind::Deterministic;
    law.d_min_ = d;
    law.mean_ = static_cast<double>(d);
    law.validate();
    return law;
}

OffspringLaw OffspringLaw::table(std::vector<std::pair<std::uint32_t, double>> probs) {
    if (probs.empty()) throw input_error("offspring law: empty table");
    std::sort(probs.begin(), probs.end());
    OffspringLaw law;
    law.kind_ = Kind::Table;
    double total = 0.0, mean = 0.0;
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [v, p] : probs) {
        if (!first && v == prev) throw input_error("offspring law: duplicate table value");
        if (p < 0.0) throw input_error("offspring law: negative probability");
        prev = v;
        first = false;
        total += p;
        mean += p * v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw input_error("offspring law: table probabilities must sum to 1");
    }
    law.pmf_ = probs;
    law.cdf_ = std::move(probs);
    double cum = 0.0;
    for (auto& [v, p] : law.cdf_) {
        cum += p;
        p = cum;
    }
    law.cdf_.back().second = 1.0;
    law.d_min_ = law.cdf_.front().first;
    law.mean_ = mean;
    law.validate();
    return law;
}

OffspringLaw OffspringLaw::truncated_geometric(std::uint32_t d_min, double q) {
    if (!(q > 0.0 && q < 1.0)) throw input_error("offspring law: geometric q must be in (0,1)");
    OffspringLaw law;
    law.kind_ = Kind::TruncatedGeometric;
    law.d_min_ = d_min;
    law.geo_q_ = q;
    law.mean_ = d_min + q / (1.0 - q);
    law.validate();
    return law;
}

OffspringLaw OffspringLaw::conditioned_poisson(double lambda, std::uint32_t d_min) {
    if (!(lambda > 0.0)) throw input_error("offspring law: poisson lambda must be > 0");
    OffspringLaw law;
    law.kind_ = Kind::ConditionedPoisson;
    law.d_min_ = d_min;
    law.pois_lambda_ = lambda;

    // Build the conditional pmf table out to negligible mass.
    const double log_norm = log_poisson_upper_tail_inclusive(lambda, d_min);
    const std::uint64_t k_hi =
        static_cast<std::uint64_t>(lambda + 40.0 * std::sqrt(lambda) + d_min + 64);
    double mean = 0.0;
    for (std::uint64_t k = d_min; k <= k_hi; ++k) {
        const double logp = static_cast<double>(k) * std::log(lambda) - lambda -
                            std::lgamma(static_cast<double>(k) + 1.0) - log_norm;
        const double p = std::exp(logp);
        law.pmf_.emplace_back(static_cast<std::uint32_t>(k), p);
        mean += p * static_cast<double>(k);
    }
    law.cdf_ = law.pmf_;
    double cum = 0.0;
    for (auto& [v, p] : law.cdf_) {
        cum += p;
        p = cum;
    }
    law.cdf_.back().second = 1.0;
    law.mean_ = mean;
    law.validate();
    return law;
}

std::uint32_t OffspringLaw::draw(RngStream& rng) const {
    switch (kind_) {
        case Kind::Deterministic:
            return d_min_;
        case Kind::Table:
        case Kind::ConditionedPoisson: {
            const double u = rng.next_unit();
            auto it = std::lower_bound(
                cdf_.begin(), cdf_.end(), u,
                [](const std::pair<std::uint32_t, double>& a, double b) { return a.second <= b; });
            return it == cdf_.end() ? cdf_.back().first : it->first;
        }
        case Kind::TruncatedGeometric: {
            const double u = rng.next_unit_open();
            const auto j = static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(geo_q_)));
            return d_min_ + static_cast<std::uint32_t>(std::min<std::uint64_t>(j, 0x7fffffff));
        }
    }
    throw numeric_error("offspring law: unknown kind");
}

double OffspringLaw::log_upper_tail(double m) const {
    switch (kind_) {
        case Kind::Deterministic:
            return m < d_min_ ? 0.0 : kNegInf;
        case Kind::Table: {
            double tail = 0.0;
            for (const auto& [v, p] : pmf_) {
                if (static_cast<double>(v) > m) tail += p;
            }
            return tail > 0.0 ? std::log(tail) : kNegInf;
        }
        case Kind::TruncatedGeometric: {
            if (m < d_min_) return 0.0;
            const double cnt = std::floor(m) - d_min_ + 1.0;
            return cnt * std::log(geo_q_);
        }
        case Kind::ConditionedPoisson: {
            if (m < d_min_) return 0.0;
            const auto k0 = static_cast<std::uint64_t>(std::floor(m)) + 1;
            return log_poisson_upper_tail_inclusive(pois_lambda_, k0) -
                   log_poisson_upper_tail_inclusive(pois_lambda_, d_min_);
        }
    }
    throw numeric_error("offspring law: unknown kind");
}

double growth_rate(const OffspringLaw& law) {
    return std::log(law.mean());
}

namespace {

RootedTree sample_tree_impl(const OffspringLaw& law, std::uint32_t max_depth, std::uint64_t seed,
                            std::size_t vertex_cap, bool cap_is_soft) {
    std::vector<VertexId> parents{kNoVertex};
    std::size_t gen_begin = 0;  // [gen_begin, gen_end) = current generation
    std::size_t gen_end = 1;
    for (std::uint32_t depth = 0; depth < max_depth; ++depth) {
        // Draw all offspring counts for this generation first so a cap abort
        // cannot leave a partially grown generation.
        std::vector<std::uint32_t> counts(gen_end - gen_begin);
        std::size_t total = 0;
        for (std::size_t i = gen_begin; i < gen_end; ++i) {
            RngStream rng = derive_stream(seed, "offspring", i);
            counts[i - gen_begin] = law.draw(rng);
            total += counts[i - gen_begin];
        }
        if (parents.size() + total > vertex_cap) {
            if (cap_is_soft) return RootedTree::from_parents(std::move(parents));
            throw resource_error("sample_tree: vertex cap (" + std::to_string(vertex_cap) +
                                 ") exceeded at generation " + std::to_string(depth + 1));
        }
        parents.reserve(parents.size() + total);
        for (std::size_t i = gen_begin; i < gen_end; ++i) {
            for (std::uint32_t c = 0; c < counts[i - gen_begin]; ++c) {
                parents.push_back(static_cast<VertexId>(i));
            }
        }
        gen_begin = gen_end;
        gen_end = parents.size();
        if (gen_begin == gen_end) break;
    }
    return RootedTree::from_parents(std::move(parents));
}

}  // namespace

RootedTree sample_tree(const OffspringLaw& law, std::uint32_t max_depth, std::uint64_t seed,
                       std::size_t vertex_cap) {
    return sample_tree_impl(law, max_depth, seed, vertex_cap, false);
}

RootedTree sample_tree_capped(const OffspringLaw& law, std::uint32_t max_depth,
                              std::uint64_t seed, std::size_t vertex_cap) {
    return sample_tree_impl(law, max_depth, seed, vertex_cap, true);
}

std::vector<double> martingale_path(const RootedTree& tree, double theta) {
    std::vector<std::size_t> z(tree.max_depth() + 1, 0);
    for (std::size_t v = 0; v < tree.num_vertices(); ++v) {
        ++z[tree.depth(static_cast<VertexId>(v))];
    }
    std::vector<double> w(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        w[k] = std::exp(-static_cast<double>(k) * theta) * static_cast<double>(z[k]);
    }
    return w;
}

TailCheckReport check_super_de_tail(const std::function<double(double)>& log_upper_tail,
                                    const TailCheckSpec& spec) {
    if (!log_upper_tail) throw input_error("tail check: tail not computable for the law");
    if (!spec.f) throw input_error("tail check: exponent function f missing");
    if (spec.s_grid.empty()) throw input_error("tail check: empty s grid");

    TailCheckReport rep;
    rep.bound = -2.0 * spec.theta * (1.0 + spec.margin_frac);
    rep.rows.reserve(spec.s_grid.size());
    for (double s : spec.s_grid) {
        TailCheckRow row;
        row.s = s;
        row.threshold = std::pow(s, spec.f(s));
        row.log_tail = log_upper_tail(row.threshold);
        row.scaled = std::exp(-s) * row.log_tail;  // -inf stays -inf
        rep.rows.push_back(row);
    }
    const std::size_t n = rep.rows.size();
    const std::size_t tail_n =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(spec.tail_fraction * n)));
    rep.pass = true;
    for (std::size_t i = n - tail_n; i < n; ++i) {
        if (!(rep.rows[i].scaled <= rep.bound)) rep.pass = false;
    }
    return rep;
}

TailCheckReport check_super_de_tail(const OffspringLaw& law, const TailCheckSpec& spec) {
    return check_super_de_tail([&law](double m) { return law.log_upper_tail(m); }, spec);
}

void TailCheckReport::write_csv(std::ostream& os) const {
    os << "s,threshold,log_tail,scaled,verdict\n";
    const char* verdict = pass ? "PASS" : "FAIL";
    for (const auto& r : rows) {
        os << r.s << ',' << r.threshold << ',' << r.log_tail << ',' << r.scaled << ',' << verdict
           << '\n';
    }
}

double default_delta_r(double r) {
    // log log log r / log log r, clamped; vanishes as r grows and the clamp
    // covers the range where the iterated logs are not yet positive.
    double value = 0.05;
    if (r > 1.0) {
        const double ll = std::log(std::log(r));
        if (ll > 0.0) {
            const double lll = std::log(ll);
            if (lll > 0.0) value = lll / ll;
        }
    }
    return std::clamp(value, 0.05, 1.0);
}

}  // namespace pamtree
