#include "pamtree/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <unordered_map>

namespace pamtree {

namespace {

// Subset-local view of the Dirichlet operator.
struct LocalOperator {
    std::size_t n = 0;
    std::vector<double> diag;           // q(x) - deg_G(x)
    std::vector<std::size_t> off;       // CSR over edges inside the subset
    std::vector<std::uint32_t> adj;     // local indices
    std::vector<VertexId> ids;          // local -> global

    void apply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) acc += x[adj[k]];
            y[i] = acc;
        }
    }
};

LocalOperator build_local(const Graph& g, const VertexSubset& subset, std::span<const double> q) {
    if (subset.empty()) throw input_error("spectral: empty subset");
    if (q.size() != g.num_vertices()) throw input_error("spectral: q size mismatch");
    LocalOperator op;
    op.n = subset.size();
    op.ids = subset.ids;
    std::unordered_map<VertexId, std::uint32_t> local;
    local.reserve(op.n);
    for (std::size_t i = 0; i < op.n; ++i) local[op.ids[i]] = static_cast<std::uint32_t>(i);

    op.diag.resize(op.n);
    op.off.assign(op.n + 1, 0);
    for (std::size_t i = 0; i < op.n; ++i) {
        const VertexId v = op.ids[i];
        if (!std::isfinite(q[v])) throw input_error("spectral: q must be finite on the subset");
        op.diag[i] = q[v] - static_cast<double>(g.degree(v));
        for (VertexId w : g.neighbors(v)) {
            if (local.count(w)) ++op.off[i + 1];
        }
    }
    for (std::size_t i = 0; i < op.n; ++i) op.off[i + 1] += op.off[i];
    op.adj.resize(op.off[op.n]);
    std::vector<std::size_t> cursor(op.off.begin(), op.off.end() - 1);
    for (std::size_t i = 0; i < op.n; ++i) {
        for (VertexId w : g.neighbors(op.ids[i])) {
            auto it = local.find(w);
            if (it != local.end()) op.adj[cursor[i]++] = it->second;
        }
    }
    return op;
}

// LDL^T of (sigma I - H) on a forest, eliminating leaves first. No fill.
struct ForestFactor {
    std::vector<std::uint32_t> order;    // elimination order, leaves first
    std::vector<std::uint32_t> parent;   // elimination parent (0xffffffff at roots)
    std::vector<double> d;               // pivots
    std::vector<double> l;               // multiplier toward the parent

    bool factor(const LocalOperator& op, double sigma) {
        const std::size_t n = op.n;
        parent.assign(n, 0xffffffffu);
        order.clear();
        order.reserve(n);
        std::vector<std::uint8_t> seen(n, 0);
        // BFS forest; order filled root-first, consumed in reverse.
        std::vector<std::uint32_t> bfs;
        bfs.reserve(n);
        for (std::uint32_t s = 0; s < n; ++s) {
            if (seen[s]) continue;
            seen[s] = 1;
            bfs.push_back(s);
            for (std::size_t head = bfs.size() - 1; head < bfs.size(); ++head) {
                const std::uint32_t v = bfs[head];
                for (std::size_t k = op.off[v]; k < op.off[v + 1]; ++k) {
                    const std::uint32_t w = op.adj[k];
                    if (!seen[w]) {
                        seen[w] = 1;
                        parent[w] = v;
                        bfs.push_back(w);
                    }
                }
            }
        }
        order.assign(bfs.rbegin(), bfs.rend());
        d.assign(n, 0.0);
        l.assign(n, 0.0);
        for (std::uint32_t v : order) {
            double piv = sigma - op.diag[v];
            for (std::size_t k = op.off[v]; k < op.off[v + 1]; ++k) {
                const std::uint32_t w = op.adj[k];
                if (parent[w] == v) piv -= l[w] * l[w] * d[w];
            }
            if (!(piv > 0.0)) return false;
            d[v] = piv;
            if (parent[v] != 0xffffffffu) l[v] = -1.0 / piv;  // off-diagonal of sigma I - H is -1
        }
        return true;
    }

    void solve(std::span<double> x) const {
        for (std::uint32_t v : order) {
            if (parent[v] != 0xffffffffu) x[parent[v]] -= l[v] * d[v] * x[v];
        }
        for (std::size_t i = 0; i < d.size(); ++i) x[i] /= d[i];
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::uint32_t v = *it;
            if (parent[v] != 0xffffffffu) x[v] -= l[v] * x[parent[v]];
        }
    }
};

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

EigenPair finalize_pair(const LocalOperator& op, std::vector<double> phi) {
    // Normalize, fix sign so the largest-magnitude entry is positive.
    const double nrm = norm2(phi);
    for (double& v : phi) v /= nrm;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (std::abs(phi[i]) > std::abs(phi[imax])) imax = i;
    }
    if (phi[imax] < 0.0) {
        for (double& v : phi) v = -v;
    }
    std::vector<double> hx(op.n);
    op.apply(phi, hx);
    double lambda = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) lambda += phi[i] * hx[i];
    double res = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) {
        const double r = hx[i] - lambda * phi[i];
        res += r * r;
    }
    EigenPair pair;
    pair.lambda = lambda;
    pair.phi = std::move(phi);
    pair.residual = std::sqrt(res);
    return pair;
}

Eigen::MatrixXd dense_matrix(const LocalOperator& op) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(op.n),
                                              static_cast<Eigen::Index>(op.n));
    for (std::size_t i = 0; i < op.n; ++i) {
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = op.diag[i];
        for (std::size_t k = op.off[i]; k < op.off[i + 1]; ++k) {
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(op.adj[k])) = 1.0;
        }
    }
    return h;
}

// ---- optional on-disk memoization of dense eigensystems ----

std::filesystem::path cache_dir() {
    const char* env = std::getenv("PAMTREE_CACHE_DIR");
    if (env == nullptr || *env == '\0') return {};
    return std::filesystem::path(env);
}

std::uint64_t spectrum_key(const LocalOperator& op) {
    std::uint64_t h = fnv1a(&op.n, sizeof(op.n));
    h = fnv1a(op.ids.data(), op.ids.size() * sizeof(VertexId), h);
    h = fnv1a(op.diag.data(), op.diag.size() * sizeof(double), h);
    h = fnv1a(op.adj.data(), op.adj.size() * sizeof(std::uint32_t), h);
    return h;
}

bool load_cached_spectrum(const std::filesystem::path& file, std::size_t n,
                          std::vector<EigenPair>& out) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return false;
    std::uint64_t stored_n = 0;
    is.read(reinterpret_cast<char*>(&stored_n), sizeof(stored_n));
    if (!is || stored_n != n) return false;
    out.assign(n, EigenPair{});
    for (auto& pair : out) {
        pair.phi.resize(n);
        is.read(reinterpret_cast<char*>(&pair.lambda), sizeof(double));
        is.read(reinterpret_cast<char*>(&pair.residual), sizeof(double));
        is.read(reinterpret_cast<char*>(pair.phi.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!is) return false;
    }
    return true;
}

void store_cached_spectrum(const std::filesystem::path& file, const std::vector<EigenPair>& sp) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) return;
        const std::uint64_t n = sp.size();
        os.write(reinterpret_cast<const char*>(&n), sizeof(n));
        for (const auto& pair : sp) {
            os.write(reinterpret_cast<const char*>(&pair.lambda), sizeof(double));
            os.write(reinterpret_cast<const char*>(&pair.residual), sizeof(double));
            os.write(reinterpret_cast<const char*>(pair.phi.data()),
                     static_cast<std::streamsize>(pair.phi.size() * sizeof(double)));
        }
    }
    std::filesystem::rename(tmp, file, ec);
}

}  // namespace

EigenPair principal_eigenpair(const Graph& g, const VertexSubset& subset,
                              std::span<const double> q, const SpectralOptions& opts) {
    const LocalOperator op = build_local(g, subset, q);

    if (op.n == 1) {
        EigenPair pair;
        pair.lambda = op.diag[0];
        pair.phi = {1.0};
        pair.residual = 0.0;
        return pair;
    }

    double max_q = q[op.ids[0]];
    std::uint32_t max_deg = 0;
    for (VertexId v : op.ids) {
        max_q = std::max(max_q, q[v]);
        max_deg = std::max(max_deg, g.degree(v));
    }
    const double sigma = max_q + static_cast<double>(max_deg) + 1.0;

    const bool forest = op.adj.size() / 2 < op.n;  // induced edges < n  =>  acyclic
    if (!forest) {
        if (op.n > opts.dense_cap) {
            throw resource_error("principal_eigenpair: non-tree subset above dense cap");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(op));
        if (es.info() != Eigen::Success) throw numeric_error("principal_eigenpair: dense solve failed");
        const auto top = static_cast<Eigen::Index>(op.n) - 1;
        std::vector<double> phi(op.n);
        for (std::size_t i = 0; i < op.n; ++i) {
            phi[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), top);
        }
        return finalize_pair(op, std::move(phi));
    }

    ForestFactor factor;
    if (!factor.factor(op, sigma)) {
        throw numeric_error("principal_eigenpair: shifted operator lost definiteness");
    }

    std::vector<double> x(op.n, 1.0 / std::sqrt(static_cast<double>(op.n)));
    std::vector<double> hx(op.n);
    double lambda_prev = -1e300;
    double lambda = 0.0;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        factor.solve(x);
        const double nrm = norm2(x);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) {
            throw numeric_error("principal_eigenpair: iteration collapsed");
        }
        for (double& v : x) v /= nrm;
        op.apply(x, hx);
        lambda = 0.0;
        for (std::size_t i = 0; i < op.n; ++i) lambda += x[i] * hx[i];
        if (std::abs(lambda - lambda_prev) < opts.tol) {
            return finalize_pair(op, std::move(x));
        }
        lambda_prev = lambda;
    }
    double res = 0.0;
    for (std::size_t i = 0; i < op.n; ++i) {
        const double r = hx[i] - lambda * x[i];
        res += r * r;
    }
    throw numeric_error("principal_eigenpair: no convergence after max iterations, residual " +
                        std::to_string(std::sqrt(res)));
}

std::vector<EigenPair> full_spectrum(const Graph& g, const VertexSubset& subset,
                                     std::span<const double> q, const SpectralOptions& opts) {
    const LocalOperator op = build_local(g, subset, q);
    if (op.n > opts.dense_cap) {
        throw resource_error("full_spectrum: subset size " + std::to_string(op.n) +
                             " exceeds dense cap " + std::to_string(opts.dense_cap));
    }

    const std::filesystem::path dir = cache_dir();
    std::filesystem::path cache_file;
    if (!dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof(name), "%016llx.eig",
                      static_cast<unsigned long long>(spectrum_key(op)));
        cache_file = dir / name;
        std::vector<EigenPair> cached;
        if (load_cached_spectrum(cache_file, op.n, cached)) return cached;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(op));
    if (es.info() != Eigen::Success) throw numeric_error("full_spectrum: dense solve failed");

    std::vector<EigenPair> out(op.n);
    std::vector<double> hx(op.n);
    for (std::size_t k = 0; k < op.n; ++k) {
        // Eigen sorts ascending; emit descending.
        const auto col = static_cast<Eigen::Index>(op.n - 1 - k);
        EigenPair& pair = out[k];
        pair.lambda = es.eigenvalues()(col);
        pair.phi.resize(op.n);
        for (std::size_t i = 0; i < op.n; ++i) {
            pair.phi[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), col);
        }
        op.apply(pair.phi, hx);
        double res = 0.0;
        for (std::size_t i = 0; i < op.n; ++i) {
            const double r = hx[i] - pair.lambda * pair.phi[i];
            res += r * r;
        }
        pair.residual = std::sqrt(res);
    }
    // Sign convention as in finalize_pair, for reproducible serialization.
    for (auto& pair : out) {
        std::size_t imax = 0;
        for (std::size_t i = 1; i < pair.phi.size(); ++i) {
            if (std::abs(pair.phi[i]) > std::abs(pair.phi[imax])) imax = i;
        }
        if (pair.phi[imax] < 0.0) {
            for (double& v : pair.phi) v = -v;
        }
    }
    if (!cache_file.empty()) store_cached_spectrum(cache_file, out);
    return out;
}

double exit_mass_bound(double deg_bound, std::size_t set_size, double gamma, double lambda) {
    if (!(gamma > lambda)) throw input_error("exit_mass_bound: gamma must exceed lambda");
    return 1.0 + deg_bound * static_cast<double>(set_size) / (gamma - lambda);
}

}  // namespace pamtree
