#include "mmt/builders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mmt/convex_order.hpp"
#include "mmt/shadow.hpp"
#include "mmt/slicer.hpp"

namespace mmt {

namespace {

// Shadows the given atoms left-to-right in the slicer, appending links.
void curtain_sweep(LevelSlicer& slicer, const std::vector<Measure::Atom>& atoms, double slack,
                   std::vector<Coupling::Link>& out) {
    for (const auto& at : atoms) {
        Measure s = detail::slice_for_mean(slicer, at.mass, at.pos, slack);
        out.push_back({at.pos, std::move(s)});
    }
}

}  // namespace

Coupling left_curtain(const Measure& mu, const Measure& nu, int resolution) {
    if (!in_convex_order(leq_cx(mu, nu)))
        throw NotInConvexOrder("left_curtain: mu is not <=cx nu");
    Measure atoms = discretize(mu, resolution);
    LevelSlicer slicer(nu);
    std::vector<Coupling::Link> links;
    links.reserve(atoms.atoms().size());
    curtain_sweep(slicer, atoms.atoms(), detail::feasibility_slack(nu), links);
    return Coupling(std::move(links));
}

namespace {

// mu restricted to the closure of {d_mu >= d_nu} (densities w.r.t. mu+nu),
// built directly from the component structure: a mu atom qualifies unless a
// strictly heavier nu atom sits at the same point; a density segment
// qualifies where mu's density dominates. Also reports the qualifying region
// as merged intervals for the trace.
struct DominanceSlice {
    Measure mu_part;
    std::vector<Interval> region;
};

DominanceSlice dominance_slice(const Measure& mu, const Measure& nu) {
    DominanceSlice out;
    std::vector<Measure::Atom> atoms;
    for (const auto& a : mu.atoms())
        if (a.mass >= nu.atom_mass_at(a.pos)) atoms.push_back(a);

    std::vector<double> edges;
    for (const auto& p : mu.pieces()) {
        edges.push_back(p.left);
        edges.push_back(p.right);
    }
    for (const auto& p : nu.pieces()) {
        edges.push_back(p.left);
        edges.push_back(p.right);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<Measure::Piece> pieces;
    std::vector<Interval> region;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double l = edges[i], r = edges[i + 1];
        double mid = 0.5 * (l + r);
        double dm = mu.density_at(mid);
        double dn = nu.density_at(mid);
        if (dm > 0.0 && dm >= dn) {
            pieces.push_back({l, r, dm});
            if (!region.empty() && region.back().right == l)
                region.back().right = r;
            else
                region.push_back({l, r});
        }
    }
    // fold qualifying atoms into the region list
    for (const auto& a : atoms) {
        bool covered = false;
        for (const auto& iv : region)
            if (iv.contains(a.pos)) covered = true;
        if (!covered) region.push_back({a.pos, a.pos});
    }
    std::sort(region.begin(), region.end(),
              [](const Interval& a, const Interval& b) { return a.left < b.left; });
    out.mu_part = Measure(std::move(atoms), std::move(pieces));
    out.region = std::move(region);
    return out;
}

}  // namespace

std::pair<Coupling, BarcodeTrace> barcode(const Measure& mu, const Measure& nu, int resolution,
                                          double stop_eps) {
    if (!in_convex_order(leq_cx(mu, nu)))
        throw NotInConvexOrder("barcode: mu is not <=cx nu");

    const double total = mu.mass();
    Measure mu_n = mu;
    LevelSlicer slicer(nu);
    double slack = detail::feasibility_slack(nu);

    std::vector<Coupling::Link> links;
    BarcodeTrace trace;
    int iter = 0;
    while (mu_n.mass() > stop_eps) {
        if (++iter > kBarcodeIterationCap)
            throw NoConvergence("barcode: residual mass " + std::to_string(mu_n.mass()) +
                                " after " + std::to_string(kBarcodeIterationCap) + " iterations");
        Measure nu_n = slicer.remaining();
        DominanceSlice dom = dominance_slice(mu_n, nu_n);
        if (dom.mu_part.mass() <= std::max(stop_eps, 1e-14 * (1.0 + total)))
            throw NoConvergence("barcode: dominance region carries no mass");

        int share = std::max<int>(
            1, static_cast<int>(std::lround(resolution * dom.mu_part.mass() / total)));
        Measure atoms = discretize(dom.mu_part, share);

        std::size_t first = links.size();
        curtain_sweep(slicer, atoms.atoms(), slack, links);

        std::vector<Measure> slices;
        slices.reserve(links.size() - first);
        for (std::size_t k = first; k < links.size(); ++k) slices.push_back(links[k].target);

        mu_n = subtract(mu_n, dom.mu_part);
        trace.iterations.push_back(
            {std::move(dom.region), std::move(dom.mu_part), add_many(slices), mu_n.mass()});
    }
    return {Coupling(std::move(links)), std::move(trace)};
}

std::vector<Measure> decompose_singular(const std::vector<Measure>& nu_parts,
                                        const Measure& nu_total,
                                        const std::vector<std::size_t>* order) {
    if (nu_total.has_atoms()) throw AtomicInput("decompose_singular: nu_total has atoms");
    double sum = 0.0;
    for (const auto& p : nu_parts) sum += p.mass();
    if (std::abs(sum - nu_total.mass()) > 1e-9 * (1.0 + nu_total.mass()))
        throw NotDecomposition("decompose_singular: parts do not sum to the total");
    if (nu_parts.size() <= 1) return nu_parts;

    std::vector<std::size_t> idx;
    if (order) {
        idx = *order;
        if (idx.size() != nu_parts.size() - 1)
            throw Error("decompose_singular: order must permute parts 2..n");
    } else {
        idx.resize(nu_parts.size() - 1);
        std::iota(idx.begin(), idx.end(), std::size_t{1});
    }

    LevelSlicer slicer(nu_total);
    double slack = detail::feasibility_slack(nu_total);
    std::vector<Measure> out(nu_parts.size());
    for (std::size_t i : idx) {
        const Measure& part = nu_parts[i];
        if (part.mass() < kMassEps) {
            out[i] = Measure();
            continue;
        }
        out[i] = detail::slice_for_mean(slicer, part.mass(), part.barycenter(), slack);
    }
    out[0] = slicer.remaining();
    return out;
}

Coupling monge_approximate(const Coupling& pi, double eps) {
    if (!(eps > 0.0)) throw Error("monge_approximate: eps must be positive");
    if (!check_martingale(pi, 1e-9))
        throw NotMartingale("monge_approximate: input coupling is not a martingale");
    for (const auto& l : pi.links())
        if (l.target.has_atoms())
            throw AtomicSecondMarginal("monge_approximate: second marginal has atoms");
    if (pi.empty()) return pi;

    double y0 = std::numeric_limits<double>::infinity();
    for (const auto& l : pi.links()) y0 = std::min(y0, l.target.min_support());

    // Per cell: the source-indexed parts of each target falling inside.
    struct Cell {
        std::vector<std::size_t> sources;
        std::vector<Measure> parts;
    };
    std::map<long, Cell> cells;
    const auto& links = pi.links();
    for (std::size_t k = 0; k < links.size(); ++k) {
        for (const auto& p : links[k].target.pieces()) {
            long b0 = static_cast<long>(std::floor((p.left - y0) / eps));
            long b1 = static_cast<long>(std::floor((p.right - y0) / eps));
            for (long b = b0; b <= b1; ++b) {
                double lo = std::max(p.left, y0 + b * eps);
                double hi = std::min(p.right, y0 + (b + 1) * eps);
                if (hi <= lo) continue;
                auto& cell = cells[b];
                if (cell.sources.empty() || cell.sources.back() != k) {
                    cell.sources.push_back(k);
                    cell.parts.emplace_back();
                }
                cell.parts.back() = add(cell.parts.back(), Measure({}, {{lo, hi, p.density}}));
            }
        }
    }

    std::vector<std::vector<Measure>> new_targets(links.size());
    for (auto& [b, cell] : cells) {
        (void)b;
        Measure total = add_many(cell.parts);
        std::vector<Measure> singular =
            cell.parts.size() == 1 ? cell.parts : decompose_singular(cell.parts, total);
        for (std::size_t j = 0; j < cell.sources.size(); ++j)
            new_targets[cell.sources[j]].push_back(std::move(singular[j]));
    }

    std::vector<Coupling::Link> out;
    out.reserve(links.size());
    for (std::size_t k = 0; k < links.size(); ++k)
        out.push_back({links[k].source, add_many(new_targets[k])});
    return Coupling(std::move(out));
}

UniquenessReport uniqueness_check(const Measure& mu, const Measure& nu) {
    if (nu.has_atoms()) throw AtomicInput("uniqueness_check: nu must be atomless");
    if (!in_convex_order(leq_cx(mu, nu)))
        throw NotInConvexOrder("uniqueness_check: mu is not <=cx nu");

    constexpr double kOverlapThr = 1e-8;
    constexpr double kResidualThr = 1e-7;
    constexpr double kGrayFactor = 100.0;

    std::vector<Measure> shadows;
    shadows.reserve(mu.atoms().size());
    for (const auto& a : mu.atoms()) shadows.push_back(atom_shadow(a.mass, a.pos, nu).shadow);

    UniquenessReport rep;
    std::size_t oi = 0, oj = 0;
    for (std::size_t i = 0; i < shadows.size(); ++i)
        for (std::size_t j = i + 1; j < shadows.size(); ++j) {
            double ov = overlap_mass(shadows[i], shadows[j]);
            if (ov > rep.max_overlap) {
                rep.max_overlap = ov;
                oi = i;
                oj = j;
            }
        }

    // nu must equal (mu - mu_a) + sum of the atom shadows.
    std::vector<Measure> parts = shadows;
    parts.push_back(Measure({}, mu.pieces()));
    rep.residual_gap = kolmogorov_distance(add_many(parts), nu);

    bool overlap_ok = rep.max_overlap <= kOverlapThr;
    bool residual_ok = rep.residual_gap <= kResidualThr;
    if (overlap_ok && residual_ok) {
        rep.verdict = Uniqueness::Unique;
        return rep;
    }
    bool gray = (!overlap_ok && rep.max_overlap <= kGrayFactor * kOverlapThr && residual_ok) ||
                (!residual_ok && rep.residual_gap <= kGrayFactor * kResidualThr && overlap_ok);
    if (gray) {
        rep.verdict = Uniqueness::Inconclusive;
        rep.witness = "violation within the numerical gray zone";
        return rep;
    }
    rep.verdict = Uniqueness::NotUnique;
    if (!overlap_ok)
        rep.witness = "shadows of atoms at " + std::to_string(mu.atoms()[oi].pos) + " and " +
                      std::to_string(mu.atoms()[oj].pos) + " overlap (mass " +
                      std::to_string(rep.max_overlap) + ")";
    else
        rep.witness = "residual mismatch: nu - sum of atom shadows differs from mu - mu_a by " +
                      std::to_string(rep.residual_gap) + " (Kolmogorov)";
    return rep;
}

}  // namespace mmt
