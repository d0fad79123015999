#pragma once

#include <cstdint>
#include <vector>

#include "mmt/builders.hpp"
#include "mmt/coupling.hpp"
#include "mmt/measure.hpp"

namespace mmt {

// Cumulative sampling tables for one coupling: source atoms with prefix
// masses, and per-link target quantile data.
struct ForwardKernel {
    std::vector<double> source_prefix;  // inclusive prefix of link masses
};

// A sequence of marginals increasing in convex order, chained by backward
// Monge couplings built with the barcode construction.
struct PeacockChain {
    std::vector<Measure> marginals;
    std::vector<Coupling> couplings;  // couplings[n]: marginals[n] -> marginals[n+1]
    std::vector<ForwardKernel> forward_kernels;
    int resolution = 0;
};

PeacockChain build_chain(const std::vector<Measure>& marginals, int resolution = 4096);

// One row per path, one column per period. X_1 is inverse-cdf sampled from
// the first marginal; X_{n+1} is inverse-cdf sampled from the link target of
// the source atom whose mass window contains X_n's cdf level. Bit
// reproducible for a fixed seed.
std::vector<std::vector<double>> sample_paths(const PeacockChain& chain, int n_paths,
                                              std::uint64_t seed);

// For each n >= 2: bin X_n, return the mass-weighted average variance of
// X_{n-1} within bins. All entries vanish for a backward deterministic chain.
std::vector<double> backward_determinism_score(const PeacockChain& chain,
                                               const std::vector<std::vector<double>>& paths,
                                               double bin_width);

// Refined Strassen transform: maps each nu-sample to the source of the
// barcode link whose target contains it; the output has law ~ mu and
// conditional means matching the martingale property.
std::vector<double> strassen_refine(const std::vector<double>& y_samples, const Measure& mu,
                                    const Measure& nu, int resolution = 4096);

// splitmix64; used to derive per-path seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mmt
