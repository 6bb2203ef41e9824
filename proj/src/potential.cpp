#include "pamtree/potential.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pamtree/rng.hpp"

namespace pamtree {

PotentialField sample_potential(std::size_t host_vertices, const VertexSubset& vertices,
                                double rho, std::uint64_t seed) {
    if (!(rho > 0.0)) throw input_error("sample_potential: rho must be > 0");
    PotentialField field;
    field.rho = rho;
    field.xi.assign(host_vertices, 0.0);
    for (VertexId v : vertices.ids) {
        if (v >= host_vertices) throw input_error("sample_potential: vertex id out of range");
        RngStream rng = derive_stream(seed, "xi", v);
        const double u = rng.next_unit_open();
        field.xi[v] = std::max(0.0, rho * std::log(std::log(1.0 / u)));
    }
    return field;
}

double exceedance_threshold(std::size_t L, double rho) {
    if (!(rho > 0.0)) throw input_error("exceedance_threshold: rho must be > 0");
    if (L < 16) throw input_error("exceedance_threshold: L must be >= 16");
    return rho * std::log(std::log(static_cast<double>(L)));
}

std::size_t IslandSet::max_component_size() const {
    std::size_t m = 0;
    for (const auto& c : components) m = std::max(m, c.cells.size());
    return m;
}

IslandSet islands(const RootedTree& tree, const PotentialField& field, std::uint32_t r, double A,
                  double alpha, SrBase base) {
    if (r < 2) throw input_error("islands: r must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("islands: alpha must be in (0,1)");
    if (field.xi.size() != tree.num_vertices()) throw input_error("islands: field size mismatch");
    if (r > tree.max_depth()) throw input_error("islands: ball radius exceeds tree depth");

    IslandSet out;
    out.r = r;
    out.A = A;
    out.alpha = alpha;

    const VertexSubset b = ball(tree, tree.root(), r);
    out.L_r = b.size();
    if (out.L_r < 3) throw input_error("islands: ball too small");
    out.a_Lr = field.rho * std::log(std::log(static_cast<double>(out.L_r)));
    out.threshold = out.a_Lr - 2.0 * A;
    const double sr_arg =
        base == SrBase::LogR ? std::log(static_cast<double>(r))
                             : std::log(static_cast<double>(out.L_r));
    out.S_r = std::pow(sr_arg, alpha);

    const std::size_t n = tree.num_vertices();
    std::vector<std::uint8_t> in_ball = b.flags(n);

    for (VertexId v : b.ids) {
        if (field.xi[v] > out.threshold) out.pi.ids.push_back(v);
    }

    // D = vertices of B_r within graph distance floor(S_r) of Π; multi-source BFS.
    const auto hop_limit = static_cast<std::uint32_t>(std::floor(out.S_r));
    std::vector<std::uint32_t> dist(n, 0xffffffffu);
    std::deque<VertexId> queue;
    for (VertexId v : out.pi.ids) {
        dist[v] = 0;
        queue.push_back(v);
    }
    std::vector<VertexId> d_ids(out.pi.ids);
    while (!queue.empty()) {
        const VertexId v = queue.front();
        queue.pop_front();
        if (dist[v] >= hop_limit) continue;
        auto visit = [&](VertexId w) {
            if (in_ball[w] && dist[w] == 0xffffffffu) {
                dist[w] = dist[v] + 1;
                d_ids.push_back(w);
                queue.push_back(w);
            }
        };
        if (v != tree.root()) visit(tree.parent(v));
        for (VertexId c : tree.children(v)) visit(c);
    }
    std::sort(d_ids.begin(), d_ids.end());
    out.d.ids = std::move(d_ids);

    // Connected components of the subgraph induced by D.
    std::vector<std::uint8_t> in_d = out.d.flags(n);
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::uint8_t> in_pi = out.pi.flags(n);
    for (VertexId start : out.d.ids) {
        if (seen[start]) continue;
        IslandComponent comp;
        std::vector<VertexId> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            comp.cells.ids.push_back(v);
            if (in_pi[v]) ++comp.pi_hits;
            auto visit = [&](VertexId w) {
                if (in_d[w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            };
            if (v != tree.root()) visit(tree.parent(v));
            for (VertexId c : tree.children(v)) visit(c);
        }
        std::sort(comp.cells.ids.begin(), comp.cells.ids.end());
        out.components.push_back(std::move(comp));
    }
    return out;
}

std::uint64_t island_size_cap(double rho, double A) {
    if (!(rho > 0.0)) throw input_error("island_size_cap: rho must be > 0");
    if (A < 0.0) throw input_error("island_size_cap: A must be >= 0");
    const double c_a = std::exp(-2.0 * A / rho);
    return static_cast<std::uint64_t>(std::ceil(1.0 / c_a));
}

double chernoff_binomial(std::uint64_t n, double p, double u) {
    if (!(p > 0.0 && p < 1.0)) throw input_error("chernoff_binomial: p must be in (0,1)");
    if (!(u > 0.0)) throw input_error("chernoff_binomial: u must be > 0");
    const double np = static_cast<double>(n) * p;
    return std::exp(-u * (std::log(u / np) - 1.0));
}

std::size_t peak_count(std::span<const VertexId> support, const PotentialField& field,
                       double level) {
    std::size_t count = 0;
    for (VertexId v : support) {
        if (v >= field.xi.size()) throw input_error("peak_count: vertex id out of range");
        if (field.xi[v] > level) ++count;
    }
    return count;
}

MaxDeviationReport potential_max_deviation(const RootedTree& tree, const PotentialField& field,
                                           std::uint32_t r, double theta) {
    if (r < 2) throw input_error("potential_max_deviation: r must be >= 2");
    if (field.xi.size() != tree.num_vertices()) {
        throw input_error("potential_max_deviation: field size mismatch");
    }
    const VertexSubset b = ball(tree, tree.root(), r);
    MaxDeviationReport rep;
    rep.max_xi = 0.0;
    for (VertexId v : b.ids) rep.max_xi = std::max(rep.max_xi, field.xi[v]);
    rep.a_Lr = field.rho * std::log(std::log(static_cast<double>(b.size())));
    rep.gap = std::abs(rep.max_xi - rep.a_Lr);
    rep.tolerance = 2.0 * field.rho * std::log(static_cast<double>(r)) /
                    (theta * static_cast<double>(r));
    return rep;
}

}  // namespace pamtree
