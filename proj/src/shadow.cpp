#include "mmt/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmt/convex_order.hpp"

namespace mmt {

namespace detail {

double feasibility_slack(const Measure& nu) {
    double span = nu.empty() ? 0.0 : nu.max_support() - nu.min_support();
    return 1e-9 * (1.0 + span);
}

Measure slice_for_mean(LevelSlicer& slicer, double a, double x, double feas_slack) {
    double total = slicer.total_mass();
    if (a > total + kSubEps)
        throw NotDominatedE("atom shadow: mass " + std::to_string(a) +
                            " exceeds available mass " + std::to_string(total));
    if (a >= total * (1.0 - 1e-14)) {
        double m = slicer.mean_between(0.0, total);
        if (std::abs(m - x) > feas_slack)
            throw NotDominatedE("atom shadow: exhausting slice misses mean by " +
                                std::to_string(m - x));
        return slicer.extract_between(0.0, total);
    }

    double lo = 0.0, hi = total - a;
    double mean_lo = slicer.mean_between(0.0, a);
    double mean_hi = slicer.mean_between(hi, total);
    if (x < mean_lo - feas_slack || x > mean_hi + feas_slack)
        throw NotDominatedE("atom shadow: mean " + std::to_string(x) +
                            " outside feasible range [" + std::to_string(mean_lo) + ", " +
                            std::to_string(mean_hi) + "]");
    if (x <= mean_lo) return slicer.extract_between(0.0, a);
    if (x >= mean_hi) return slicer.extract_between(hi, total);

    // mean of the band (t, t+a] is nondecreasing in t; bisect to fp limit.
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (slicer.mean_between(mid, mid + a) < x)
            lo = mid;
        else
            hi = mid;
    }
    double t = (std::abs(slicer.mean_between(lo, lo + a) - x) <=
                std::abs(slicer.mean_between(hi, hi + a) - x))
                   ? lo
                   : hi;
    return slicer.extract_between(t, t + a);
}

}  // namespace detail

ShadowResult atom_shadow(double a, double x, const Measure& nu) {
    if (!(a > 0.0)) throw Error("atom_shadow: mass must be positive");
    LevelSlicer slicer(nu);
    Measure s = detail::slice_for_mean(slicer, a, x, detail::feasibility_slack(nu));
    ShadowResult res;
    res.residual = slicer.remaining();
    res.links.push_back({x, a, s});
    res.shadow = std::move(s);
    return res;
}

ShadowResult shadow(const Measure& mu, const Measure& nu, int resolution) {
    OrderDiagnostic diag = leq_E_diagnose(mu, nu);
    if (!diag.ok)
        throw NotDominatedE("shadow: extended-order violation at k=" +
                            std::to_string(diag.worst_point) + " (potential deficit " +
                            std::to_string(diag.deficit) + ")");
    Measure atoms = discretize(mu, resolution);
    LevelSlicer slicer(nu);
    double slack = detail::feasibility_slack(nu);

    ShadowResult res;
    std::vector<Measure> slices;
    slices.reserve(atoms.atoms().size());
    for (const auto& at : atoms.atoms()) {
        Measure s = detail::slice_for_mean(slicer, at.mass, at.pos, slack);
        res.links.push_back({at.pos, at.mass, s});
        slices.push_back(std::move(s));
    }
    res.shadow = add_many(slices);
    res.residual = slicer.remaining();
    return res;
}

}  // namespace mmt
