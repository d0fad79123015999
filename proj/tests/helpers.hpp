#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mmt/coupling.hpp"
#include "mmt/measure.hpp"

namespace mmt::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random purely atomic measure with distinct-ish positions.
inline Measure random_atoms(Rng& rng, int n, double span = 4.0, double total = 1.0) {
    std::vector<Measure::Atom> atoms;
    std::vector<double> w;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w.push_back(uniform(rng, 0.1, 1.0));
        sum += w.back();
    }
    for (int i = 0; i < n; ++i)
        atoms.push_back({uniform(rng, -span, span), total * w[i] / sum});
    return Measure(std::move(atoms), {});
}

// Applies k mean-preserving spreads to a discrete measure; the result
// dominates the input in convex order by construction.
inline Measure mean_preserving_spread(Rng& rng, const Measure& m, int k, double width = 1.0) {
    Measure cur = m;
    for (int s = 0; s < k; ++s) {
        const auto& atoms = cur.atoms();
        if (atoms.empty()) break;
        int pick = uniform_int(rng, 0, static_cast<int>(atoms.size()) - 1);
        auto a = atoms[pick];
        double frac = uniform(rng, 0.3, 1.0);
        double dl = uniform(rng, 0.05, width);
        double dr = uniform(rng, 0.05, width);
        double moved = a.mass * frac;
        double ml = moved * dr / (dl + dr);
        double mr = moved * dl / (dl + dr);
        std::vector<Measure::Atom> next(atoms.begin(), atoms.end());
        next[pick].mass -= moved;
        next.push_back({a.pos - dl, ml});
        next.push_back({a.pos + dr, mr});
        cur = Measure(std::move(next), {});
    }
    return cur;
}

// Piecewise-uniform bell-shaped density on [-3s, 3s] with the given number
// of pieces; total mass 1, mean 0 by symmetry.
inline Measure bell_measure(double s, int n_pieces) {
    std::vector<Measure::Piece> pieces;
    double lo = -3.0 * s, hi = 3.0 * s;
    double w = (hi - lo) / n_pieces;
    double norm = 0.0;
    std::vector<double> dens(n_pieces);
    for (int i = 0; i < n_pieces; ++i) {
        double c = lo + (i + 0.5) * w;
        dens[i] = std::exp(-0.5 * (c / s) * (c / s));
        norm += dens[i] * w;
    }
    for (int i = 0; i < n_pieces; ++i)
        pieces.push_back({lo + i * w, lo + (i + 1) * w, dens[i] / norm});
    // enforce an exactly zero mean by mirror-averaging densities
    std::vector<Measure::Piece> sym;
    for (int i = 0; i < n_pieces; ++i) {
        double d = 0.5 * (pieces[i].density + pieces[n_pieces - 1 - i].density);
        sym.push_back({pieces[i].left, pieces[i].right, d});
    }
    return Measure({}, std::move(sym));
}

// Pushforward under x -> factor * x. For a centered measure and factor >= 1
// this is a dilation, so the result dominates the input in convex order.
inline Measure dilate(const Measure& m, double factor) {
    std::vector<Measure::Atom> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({factor * a.pos, a.mass});
    std::vector<Measure::Piece> pieces;
    for (const auto& p : m.pieces())
        pieces.push_back({factor * p.left, factor * p.right, p.density / factor});
    return Measure(std::move(atoms), std::move(pieces));
}

// Overlapping-kernel martingale transport from (m/2) delta_{-1/4} + (m/2)
// delta_{1/4} to Unif[-1,1]: kernels share all four quarter-cells.
inline Coupling overlapping_kernel_mt() {
    std::vector<Measure::Piece> k1 = {{-1.0, -0.5, 0.375},
                                      {-0.5, 0.0, 0.375},
                                      {0.0, 0.5, 0.125},
                                      {0.5, 1.0, 0.125}};
    std::vector<Measure::Piece> k2 = {{-1.0, -0.5, 0.125},
                                      {-0.5, 0.0, 0.125},
                                      {0.0, 0.5, 0.375},
                                      {0.5, 1.0, 0.375}};
    std::vector<Coupling::Link> links;
    links.push_back({-0.25, Measure({}, std::move(k1))});
    links.push_back({0.25, Measure({}, std::move(k2))});
    return Coupling(std::move(links));
}

inline bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

// Left-monotone support check: no x < x' whose target has a point strictly
// between two target points of x. Links are merged by source; with interval
// targets it suffices to test support points of x' against the hull of x.
inline bool is_left_monotone(const Coupling& c, double pad = 1e-11) {
    struct Hull {
        double source, lo, hi;
        const Measure* target;
    };
    std::vector<Hull> hulls;
    for (const auto& l : c.links()) {
        if (!hulls.empty() && hulls.back().source == l.source) {
            hulls.back().lo = std::min(hulls.back().lo, l.target.min_support());
            hulls.back().hi = std::max(hulls.back().hi, l.target.max_support());
        } else {
            hulls.push_back({l.source, l.target.min_support(), l.target.max_support(), nullptr});
        }
    }
    for (const auto& h : hulls) {
        if (!(h.hi - h.lo > 2 * pad)) continue;
        auto inside = [&](double y) { return y > h.lo + pad && y < h.hi - pad; };
        for (const auto& l : c.links()) {
            if (l.source <= h.source) continue;
            for (const auto& a : l.target.atoms())
                if (inside(a.pos)) return false;
            for (const auto& p : l.target.pieces())
                if (inside(p.left) || inside(p.right) || (p.left <= h.lo && p.right >= h.hi))
                    return false;
        }
    }
    return true;
}

inline Coupling make_coupling(std::vector<Coupling::Link> links) {
    return Coupling(std::move(links));
}

// Brute-force potential evaluation: sum of atom terms plus the closed-form
// piece integrals of |y - x|.
inline double potential_brute(const Measure& m, double x) {
    double u = 0.0;
    for (const auto& a : m.atoms()) u += a.mass * std::abs(a.pos - x);
    for (const auto& p : m.pieces()) {
        if (x <= p.left)
            u += p.mass() * (0.5 * (p.left + p.right) - x);
        else if (x >= p.right)
            u += p.mass() * (x - 0.5 * (p.left + p.right));
        else
            u += p.density * 0.5 *
                 ((x - p.left) * (x - p.left) + (p.right - x) * (p.right - x));
    }
    return u;
}

}  // namespace mmt::testing
