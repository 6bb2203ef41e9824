#include "pamtree/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace pamtree {

RootedTree RootedTree::from_parents(std::vector<VertexId> parents) {
    if (parents.empty()) throw input_error("tree must have at least one vertex");
    if (parents[0] != kNoVertex) throw input_error("vertex 0 must be the root (parent -1)");
    const std::size_t n = parents.size();

    RootedTree t;
    t.parent_ = std::move(parents);
    t.depth_.assign(n, 0);
    t.child_off_.assign(n + 1, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const VertexId p = t.parent_[i];
        if (p == kNoVertex) throw input_error("more than one root");
        if (p >= i) throw input_error("ids must be BFS-ordered: parent(v) < v");
        t.depth_[i] = t.depth_[p] + 1;
        t.max_depth_ = std::max(t.max_depth_, t.depth_[i]);
        ++t.child_off_[p + 1];
    }
    for (std::size_t v = 0; v < n; ++v) t.child_off_[v + 1] += t.child_off_[v];
    t.child_ids_.resize(n - 1);
    std::vector<std::size_t> cursor(t.child_off_.begin(), t.child_off_.end() - 1);
    for (std::size_t i = 1; i < n; ++i) {
        t.child_ids_[cursor[t.parent_[i]]++] = static_cast<VertexId>(i);
    }
    return t;
}

bool VertexSubset::contains(VertexId v) const {
    return std::binary_search(ids.begin(), ids.end(), v);
}

std::vector<std::uint8_t> VertexSubset::flags(std::size_t n) const {
    std::vector<std::uint8_t> f(n, 0);
    for (VertexId v : ids) {
        if (v >= n) throw input_error("subset id out of range for host");
        f[v] = 1;
    }
    return f;
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges) {
    Graph g;
    g.off_.assign(n + 1, 0);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n || a == b) throw input_error("bad edge");
        ++g.off_[a + 1];
        ++g.off_[b + 1];
    }
    for (std::size_t v = 0; v < n; ++v) g.off_[v + 1] += g.off_[v];
    g.adj_.resize(2 * edges.size());
    std::vector<std::size_t> cursor(g.off_.begin(), g.off_.end() - 1);
    for (const auto& [a, b] : edges) {
        g.adj_[cursor[a]++] = b;
        g.adj_[cursor[b]++] = a;
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(g.adj_.begin() + static_cast<std::ptrdiff_t>(g.off_[v]),
                  g.adj_.begin() + static_cast<std::ptrdiff_t>(g.off_[v + 1]));
    }
    return g;
}

Graph Graph::from_tree(const RootedTree& tree) {
    const std::size_t n = tree.num_vertices();
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t v = 1; v < n; ++v) {
        edges.emplace_back(tree.parent(static_cast<VertexId>(v)), static_cast<VertexId>(v));
    }
    return from_edges(n, edges);
}

namespace {

// BFS over tree adjacency limited to `radius`; returns sorted ids.
VertexSubset tree_bfs(const RootedTree& tree, VertexId center, std::uint32_t radius) {
    std::vector<VertexId> out;
    std::vector<std::uint32_t> dist(tree.num_vertices(), 0xffffffffu);
    std::vector<VertexId> frontier{center};
    dist[center] = 0;
    out.push_back(center);
    for (std::uint32_t d = 0; d < radius && !frontier.empty(); ++d) {
        std::vector<VertexId> next;
        for (VertexId v : frontier) {
            auto visit = [&](VertexId w) {
                if (dist[w] == 0xffffffffu) {
                    dist[w] = d + 1;
                    next.push_back(w);
                    out.push_back(w);
                }
            };
            if (v != tree.root()) visit(tree.parent(v));
            for (VertexId c : tree.children(v)) visit(c);
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return VertexSubset{std::move(out)};
}

}  // namespace

VertexSubset ball(const RootedTree& tree, VertexId center, std::uint32_t radius) {
    if (!tree.valid(center)) throw input_error("ball: invalid vertex id");
    return tree_bfs(tree, center, radius);
}

VertexSubset lower_ball(const RootedTree& tree, VertexId v, std::uint32_t radius) {
    if (!tree.valid(v)) throw input_error("lower_ball: invalid vertex id");
    std::vector<VertexId> out{v};
    std::vector<VertexId> frontier{v};
    for (std::uint32_t d = 0; d < radius && !frontier.empty(); ++d) {
        std::vector<VertexId> next;
        for (VertexId x : frontier) {
            for (VertexId c : tree.children(x)) {
                next.push_back(c);
                out.push_back(c);
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return VertexSubset{std::move(out)};
}

double quadratic_form(const Graph& g, std::span<const double> phi) {
    if (phi.size() != g.num_vertices()) throw input_error("quadratic_form: size mismatch");
    double s = 0.0;
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        for (VertexId w : g.neighbors(static_cast<VertexId>(v))) {
            if (w > v) {
                const double d = phi[v] - phi[w];
                s += d * d;
            }
        }
    }
    return -s;
}

double quadratic_form(const RootedTree& tree, std::span<const double> phi) {
    if (phi.size() != tree.num_vertices()) throw input_error("quadratic_form: size mismatch");
    double s = 0.0;
    for (std::size_t v = 1; v < tree.num_vertices(); ++v) {
        const double d = phi[v] - phi[tree.parent(static_cast<VertexId>(v))];
        s += d * d;
    }
    return -s;
}

namespace {

// Connected-subset enumeration: extend with the first candidate or forbid it.
// Each connected superset of {x} is produced exactly once.
void animal_rec(const RootedTree& tree, std::uint32_t want, std::vector<VertexId>& members,
                std::vector<VertexId> candidates, std::vector<std::uint8_t>& forbidden,
                std::vector<std::uint8_t>& in_set, std::vector<VertexSubset>& out,
                std::size_t cap) {
    if (members.size() == want) {
        if (out.size() >= cap) {
            throw resource_error("tree_animals: enumeration cap (" + std::to_string(cap) +
                                 ") exceeded");
        }
        VertexSubset s;
        s.ids = members;
        std::sort(s.ids.begin(), s.ids.end());
        out.push_back(std::move(s));
        return;
    }
    if (candidates.empty()) return;

    const VertexId c = candidates.back();
    candidates.pop_back();

    // Branch 1: include c.
    {
        std::vector<VertexId> grown = candidates;
        auto consider = [&](VertexId w) {
            if (!in_set[w] && !forbidden[w] &&
                std::find(grown.begin(), grown.end(), w) == grown.end() && w != c) {
                grown.push_back(w);
            }
        };
        if (c != tree.root()) consider(tree.parent(c));
        for (VertexId ch : tree.children(c)) consider(ch);
        members.push_back(c);
        in_set[c] = 1;
        animal_rec(tree, want, members, std::move(grown), forbidden, in_set, out, cap);
        in_set[c] = 0;
        members.pop_back();
    }

    // Branch 2: exclude c everywhere below this point.
    forbidden[c] = 1;
    animal_rec(tree, want, members, std::move(candidates), forbidden, in_set, out, cap);
    forbidden[c] = 0;
}

}  // namespace

std::vector<VertexSubset> tree_animals(const RootedTree& tree, VertexId x, std::uint32_t n,
                                       std::size_t cap) {
    if (!tree.valid(x)) throw input_error("tree_animals: invalid vertex id");
    std::vector<VertexSubset> out;
    std::vector<VertexId> members{x};
    std::vector<std::uint8_t> forbidden(tree.num_vertices(), 0);
    std::vector<std::uint8_t> in_set(tree.num_vertices(), 0);
    in_set[x] = 1;
    std::vector<VertexId> candidates;
    if (x != tree.root()) candidates.push_back(tree.parent(x));
    for (VertexId c : tree.children(x)) candidates.push_back(c);
    animal_rec(tree, n + 1, members, std::move(candidates), forbidden, in_set, out, cap);
    return out;
}

MaxDegreeReport max_degree_in_ball(const RootedTree& tree, std::uint32_t radius) {
    MaxDegreeReport rep;
    rep.truncated = radius > tree.max_depth();
    const VertexSubset b = ball(tree, tree.root(), radius);
    for (VertexId v : b.ids) rep.max_degree = std::max(rep.max_degree, tree.degree(v));
    return rep;
}

void write_tree(std::ostream& os, const RootedTree& tree) {
    os << "pamtree v1 n=" << tree.num_vertices() << " root=0\n";
    for (std::size_t v = 0; v < tree.num_vertices(); ++v) {
        if (v == 0) {
            os << v << " -1\n";
        } else {
            os << v << ' ' << tree.parent(static_cast<VertexId>(v)) << '\n';
        }
    }
}

RootedTree read_tree(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw input_error("tree file: missing header");
    std::size_t n = 0;
    {
        std::istringstream hs(header);
        std::string magic, version, nfield, rootfield;
        hs >> magic >> version >> nfield >> rootfield;
        if (magic != "pamtree" || version != "v1" || nfield.rfind("n=", 0) != 0 ||
            rootfield != "root=0") {
            throw input_error("tree file: bad header '" + header + "'");
        }
        n = std::stoull(nfield.substr(2));
    }
    std::vector<VertexId> parents(n, kNoVertex);
    for (std::size_t i = 0; i < n; ++i) {
        long long id = 0, par = 0;
        if (!(is >> id >> par)) throw input_error("tree file: truncated vertex list");
        if (id != static_cast<long long>(i)) throw input_error("tree file: ids must be 0..n-1 in order");
        if (i == 0) {
            if (par != -1) throw input_error("tree file: root must have parent -1");
        } else {
            if (par < 0 || par >= id) throw input_error("tree file: parent must precede child");
            parents[i] = static_cast<VertexId>(par);
        }
    }
    return RootedTree::from_parents(std::move(parents));
}

}  // namespace pamtree
