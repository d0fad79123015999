#include "mmt/peacock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mmt/convex_order.hpp"

namespace mmt {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

// uniform double in (0, 1), 53-bit resolution, never exactly 0
double next_uniform(std::uint64_t& state) {
    return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PeacockChain build_chain(const std::vector<Measure>& marginals, int resolution) {
    if (marginals.size() < 2) throw Error("build_chain: need at least two marginals");
    PeacockChain chain;
    chain.marginals = marginals;
    chain.resolution = resolution;
    for (std::size_t n = 0; n + 1 < marginals.size(); ++n) {
        if (!in_convex_order(leq_cx(marginals[n], marginals[n + 1])))
            throw NotInConvexOrder("build_chain: marginals not in convex order at index " +
                                   std::to_string(n));
        auto [coupling, trace] = barcode(marginals[n], marginals[n + 1], resolution);
        (void)trace;
        ForwardKernel fk;
        double cum = 0.0;
        for (const auto& l : coupling.links()) {
            cum += l.mass();
            fk.source_prefix.push_back(cum);
        }
        chain.couplings.push_back(std::move(coupling));
        chain.forward_kernels.push_back(std::move(fk));
    }
    return chain;
}

std::vector<std::vector<double>> sample_paths(const PeacockChain& chain, int n_paths,
                                              std::uint64_t seed) {
    if (n_paths <= 0) throw Error("sample_paths: n_paths must be positive");
    const std::size_t periods = chain.marginals.size();
    std::vector<std::vector<double>> paths(n_paths, std::vector<double>(periods));

    for (int p = 0; p < n_paths; ++p) {
        std::uint64_t mix = seed;
        splitmix64(mix);
        mix ^= 0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(p + 1);
        std::uint64_t rng = splitmix64(mix);

        const Measure& m0 = chain.marginals.front();
        double x = m0.quantile(next_uniform(rng) * m0.mass());
        paths[p][0] = x;
        for (std::size_t n = 0; n + 1 < periods; ++n) {
            const Coupling& c = chain.couplings[n];
            const auto& prefix = chain.forward_kernels[n].source_prefix;
            // snap the running value to the source atom whose mass window
            // contains its cdf level in the exact marginal
            double level = chain.marginals[n].cdf(x);
            level = std::min(level, prefix.back());
            std::size_t j =
                std::lower_bound(prefix.begin(), prefix.end(), level) - prefix.begin();
            if (j >= c.links().size()) j = c.links().size() - 1;
            const auto& target = c.links()[j].target;
            x = target.quantile(next_uniform(rng) * target.mass());
            paths[p][n + 1] = x;
        }
    }
    return paths;
}

std::vector<double> backward_determinism_score(const PeacockChain& chain,
                                               const std::vector<std::vector<double>>& paths,
                                               double bin_width) {
    if (!(bin_width > 0.0)) throw Error("backward_determinism_score: bin_width must be positive");
    const std::size_t periods = chain.marginals.size();
    std::vector<double> scores;
    for (std::size_t n = 1; n < periods; ++n) {
        struct Agg {
            double m = 0.0, s = 0.0, ss = 0.0;
        };
        std::map<long, Agg> bins;
        for (const auto& path : paths) {
            long b = static_cast<long>(std::floor(path[n] / bin_width));
            auto& agg = bins[b];
            agg.m += 1.0;
            agg.s += path[n - 1];
            agg.ss += path[n - 1] * path[n - 1];
        }
        double total = 0.0, acc = 0.0;
        for (const auto& [b, agg] : bins) {
            (void)b;
            total += agg.m;
            double var = agg.ss / agg.m - (agg.s / agg.m) * (agg.s / agg.m);
            acc += agg.m * std::max(0.0, var);
        }
        scores.push_back(total > 0.0 ? acc / total : 0.0);
    }
    return scores;
}

std::vector<double> strassen_refine(const std::vector<double>& y_samples, const Measure& mu,
                                    const Measure& nu, int resolution) {
    auto [coupling, trace] = barcode(mu, nu, resolution);
    (void)trace;

    // index of target support fragments -> source
    struct Frag {
        double left, right, source;
    };
    std::vector<Frag> frags;
    for (const auto& l : coupling.links()) {
        for (const auto& a : l.target.atoms()) frags.push_back({a.pos, a.pos, l.source});
        for (const auto& p : l.target.pieces()) frags.push_back({p.left, p.right, l.source});
    }
    std::sort(frags.begin(), frags.end(),
              [](const Frag& a, const Frag& b) { return a.left < b.left; });

    std::vector<double> out;
    out.reserve(y_samples.size());
    for (double y : y_samples) {
        auto it = std::upper_bound(frags.begin(), frags.end(), y,
                                   [](double v, const Frag& f) { return v < f.left; });
        double best = 0.0, best_d = std::numeric_limits<double>::infinity();
        auto consider = [&](const Frag& f) {
            double d = 0.0;
            if (y < f.left)
                d = f.left - y;
            else if (y > f.right)
                d = y - f.right;
            if (d < best_d) {
                best_d = d;
                best = f.source;
            }
        };
        if (it != frags.begin()) consider(*std::prev(it));
        if (it != frags.end()) consider(*it);
        if (it != frags.begin() && std::prev(it) != frags.begin())
            consider(*std::prev(it, 2));
        out.push_back(best);
    }
    return out;
}

}  // namespace mmt
