#pragma once
// Dirichlet spectra of the Anderson Hamiltonian Delta + q on finite subsets.
// The operator row at x is: diagonal q(x) - degree(x) (degree in the FULL
// graph), off-diagonal 1 for edges inside the subset.

#include <cstddef>
#include <span>
#include <vector>

#include "pamtree/graph.hpp"

namespace pamtree {

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> phi;  // aligned with the subset's sorted ids, ||phi||_2 = 1
    double residual = 0.0;    // ||(Delta+q)phi - lambda phi||_2
};

struct SpectralOptions {
    double tol = 1e-10;          // eigenvalue increment convergence
    std::size_t max_iter = 100000;
    std::size_t dense_cap = 2000;
};

// Top eigenpair, shift-inverted power iteration: sigma = max q + max degree + 1
// makes (sigma I - H) positive definite; subsets of trees factor exactly with
// no fill, other graphs fall back to a dense solve.
EigenPair principal_eigenpair(const Graph& g, const VertexSubset& subset,
                              std::span<const double> q, const SpectralOptions& opts = {});

// Complete orthonormal eigensystem, descending; |subset| <= dense_cap.
// Memoized under PAMTREE_CACHE_DIR when that variable is set.
std::vector<EigenPair> full_spectrum(const Graph& g, const VertexSubset& subset,
                                     std::span<const double> q, const SpectralOptions& opts = {});

// 1 + deg_bound*|set|/(gamma - lambda); requires gamma > lambda.
double exit_mass_bound(double deg_bound, std::size_t set_size, double gamma, double lambda);

}  // namespace pamtree
