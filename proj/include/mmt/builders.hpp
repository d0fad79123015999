#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmt/coupling.hpp"
#include "mmt/measure.hpp"

namespace mmt {

// One peeling step of the barcode construction: the region where the current
// mu-density dominates, the mu mass transported there, the nu mass it
// consumed, and the mu mass still to transport afterwards.
struct BarcodeIteration {
    std::vector<Interval> region;
    Measure mu_slice;
    Measure nu_slice;
    double residual_mass;
};

struct BarcodeTrace {
    std::vector<BarcodeIteration> iterations;
};

inline constexpr int kBarcodeIterationCap = 64;

// Left-curtain coupling: discretized mu atoms processed in increasing
// position, each shadowed in the running residual of nu.
Coupling left_curtain(const Measure& mu, const Measure& nu, int resolution = 2048);

// Barcode coupling: iteratively peel the closure of {d_mu >= d_nu} (densities
// w.r.t. mu+nu), transport it to its shadow by a left-curtain pass, and
// recurse on the remainders until the residual mass falls below stop_eps.
std::pair<Coupling, BarcodeTrace> barcode(const Measure& mu, const Measure& nu,
                                          int resolution = 2048, double stop_eps = 1e-10);

// Rearranges the targets of a martingale coupling with atomic first marginal
// and atomless second marginal into mutually singular ones, moving mass only
// within cells of width eps. The result is backward Monge with displacement
// at most eps per unit mass.
Coupling monge_approximate(const Coupling& pi, double eps);

// Mutually singular replacements nu~_i for a decomposition of nu_total:
// parts i >= 2 are collapsed to atoms at their barycenters and shadowed
// sequentially in input order; part 1 absorbs the remainder (and grows in
// convex order). An order permutation is exposed for property tests.
std::vector<Measure> decompose_singular(const std::vector<Measure>& nu_parts,
                                        const Measure& nu_total,
                                        const std::vector<std::size_t>* order = nullptr);

enum class Uniqueness { Unique, NotUnique, Inconclusive };

struct UniquenessReport {
    Uniqueness verdict = Uniqueness::Inconclusive;
    std::string witness;       // offending overlap or residual mismatch
    double max_overlap = 0.0;  // largest pairwise shadow overlap
    double residual_gap = 0.0; // Kolmogorov gap of mu - mu_a vs nu - sum of shadows
};

// Uniqueness test for atomless nu: the martingale transport is
// unique iff the shadows of mu's atoms are mutually singular and exhaust
// nu - (mu - mu_a). Thresholds: overlap 1e-8, residual 1e-7; violations less
// than 100x the threshold are reported Inconclusive.
UniquenessReport uniqueness_check(const Measure& mu, const Measure& nu);

}  // namespace mmt
