#include "mmt/convex_order.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmt {

namespace {

std::vector<double> breakpoint_union(const Measure& m) {
    std::vector<double> xs;
    xs.reserve(m.component_count() * 2);
    for (const auto& a : m.atoms()) xs.push_back(a.pos);
    for (const auto& p : m.pieces()) {
        xs.push_back(p.left);
        xs.push_back(p.right);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace

Potential Potential::of(const Measure& m) {
    Potential u;
    u.mass_ = m.mass();
    u.m1_ = m.first_moment();
    u.brk_ = breakpoint_union(m);
    const auto& xs = u.brk_;
    u.seg_.resize(xs.size() + 1);

    // u(x) = x*(2F(x0) - mass + 2d(x-x0)) + m1 - 2*M1(x0) - d(x^2 - x0^2)
    // collapses to a*x^2 + b*x + c with a = d, b = 2F - mass - 2d*x0,
    // c = m1 - 2*M1 + d*x0^2, where (F, M1) are inclusive prefixes at x0.
    auto make = [&](double F, double M1, double d, double x0) {
        return Quad{d, 2.0 * F - u.mass_ - 2.0 * d * x0, u.m1_ - 2.0 * M1 + d * x0 * x0};
    };
    u.seg_[0] = make(0.0, 0.0, 0.0, 0.0);

    double F = 0.0, M1 = 0.0, dprev = 0.0, xprev = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i];
        if (i > 0) {
            F += dprev * (x - xprev);
            M1 += dprev * 0.5 * (x * x - xprev * xprev);
        }
        double am = m.atom_mass_at(x);
        F += am;
        M1 += am * x;
        double d = m.density_at(x);
        u.seg_[i + 1] = make(F, M1, d, x);
        dprev = d;
        xprev = x;
    }
    return u;
}

double Potential::operator()(double x) const {
    std::size_t i = std::upper_bound(brk_.begin(), brk_.end(), x) - brk_.begin();
    return seg_[i].eval(x);
}

namespace {

struct DiffGrid {
    std::vector<double> xs;               // refined breakpoints
    std::vector<Potential::Quad> seg;     // xs.size()+1 quads of u_nu - u_mu
    double eval(double x) const {
        std::size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
        return seg[i].eval(x);
    }
};

Potential::Quad quad_at(const Potential& p, double x) {
    std::size_t i = std::upper_bound(p.breakpoints().begin(), p.breakpoints().end(), x) -
                    p.breakpoints().begin();
    return p.segment(i);
}

DiffGrid diff_grid(const Potential& pmu, const Potential& pnu) {
    DiffGrid g;
    g.xs.reserve(pmu.breakpoints().size() + pnu.breakpoints().size());
    g.xs.insert(g.xs.end(), pmu.breakpoints().begin(), pmu.breakpoints().end());
    g.xs.insert(g.xs.end(), pnu.breakpoints().begin(), pnu.breakpoints().end());
    std::sort(g.xs.begin(), g.xs.end());
    g.xs.erase(std::unique(g.xs.begin(), g.xs.end()), g.xs.end());
    g.seg.resize(g.xs.size() + 1);
    for (std::size_t i = 0; i <= g.xs.size(); ++i) {
        double probe;
        if (g.xs.empty())
            probe = 0.0;
        else if (i == 0)
            probe = g.xs.front() - 1.0;
        else if (i == g.xs.size())
            probe = g.xs.back() + 1.0;
        else
            probe = 0.5 * (g.xs[i - 1] + g.xs[i]);
        Potential::Quad qm = quad_at(pmu, probe);
        Potential::Quad qn = quad_at(pnu, probe);
        g.seg[i] = {qn.a - qm.a, qn.b - qm.b, qn.c - qm.c};
    }
    return g;
}

// Scans the difference; reports the global minimum over breakpoints and
// interior parabola vertices, and the minimum over points strictly inside
// the support hull. Also tracks the largest |D|.
struct DiffScan {
    double min_global = std::numeric_limits<double>::infinity();
    double min_interior = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
};

DiffScan scan_difference(const DiffGrid& g) {
    DiffScan s;
    if (g.xs.empty()) {
        s.min_global = s.min_interior = 0.0;
        return s;
    }
    double lo = g.xs.front(), hi = g.xs.back();
    auto consider = [&](double x, double v) {
        s.min_global = std::min(s.min_global, v);
        s.max_abs = std::max(s.max_abs, std::abs(v));
        if (x > lo && x < hi) s.min_interior = std::min(s.min_interior, v);
    };
    for (std::size_t i = 0; i < g.xs.size(); ++i) consider(g.xs[i], g.seg[i + 1].eval(g.xs[i]));
    for (std::size_t i = 1; i < g.xs.size(); ++i) {
        const auto& q = g.seg[i];
        if (q.a > 0.0) {
            double v = -q.b / (2.0 * q.a);
            if (v > g.xs[i - 1] && v < g.xs[i]) consider(v, q.eval(v));
        }
    }
    return s;
}

}  // namespace

Cx leq_cx(const Measure& mu, const Measure& nu, double tol) {
    if (std::abs(mu.mass() - nu.mass()) > tol) return Cx::False;
    if (mu.mass() > tol && nu.mass() > tol &&
        std::abs(mu.barycenter() - nu.barycenter()) > tol)
        return Cx::False;
    if (mu.empty() && nu.empty()) return Cx::True;

    DiffGrid g = diff_grid(Potential::of(mu), Potential::of(nu));
    DiffScan s = scan_difference(g);
    if (s.min_global < -tol) return Cx::False;
    if (s.max_abs <= tol) return Cx::True;
    if (s.min_interior <= tol) return Cx::Boundary;
    return Cx::True;
}

OrderDiagnostic leq_E_diagnose(const Measure& mu, const Measure& nu, double tol) {
    OrderDiagnostic diag;
    if (mu.mass() > nu.mass() + tol) {
        diag.ok = false;
        diag.deficit = nu.mass() - mu.mass();
        diag.worst_point = nu.empty() ? 0.0 : nu.min_support();
        return diag;
    }
    if (mu.empty()) return diag;

    Potential pmu = Potential::of(mu);
    Potential pnu = Potential::of(nu);
    DiffGrid g = diff_grid(pmu, pnu);

    // E(k) = D(k) - |G(k)| with G(k) = dm1 - k*dmass must stay >= -tol;
    // equivalent to call and put dominance at every strike. In both tails E
    // is monotone toward the support, so breakpoint evaluation covers them.
    double dmass = nu.mass() - mu.mass();
    double dm1 = nu.first_moment() - mu.first_moment();
    auto G = [&](double k) { return dm1 - k * dmass; };

    std::vector<double> xs = g.xs;
    if (dmass != 0.0) {
        double root = dm1 / dmass;
        if (std::isfinite(root)) {
            xs.push_back(root);
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        }
    }

    double worst = std::numeric_limits<double>::infinity();
    double at = 0.0;
    auto consider = [&](double x) {
        double e = g.eval(x) - std::abs(G(x));
        if (e < worst) {
            worst = e;
            at = x;
        }
    };
    for (double x : xs) consider(x);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        double l = xs[i], r = xs[i + 1];
        double mid = 0.5 * (l + r);
        std::size_t si = std::upper_bound(g.xs.begin(), g.xs.end(), mid) - g.xs.begin();
        const auto& q = g.seg[si];
        if (q.a > 0.0) {
            double sgn = G(mid) >= 0.0 ? 1.0 : -1.0;
            // E = a x^2 + (b + sgn*dmass) x + (c - sgn*dm1) on this segment
            double v = -(q.b + sgn * dmass) / (2.0 * q.a);
            if (v > l && v < r) consider(v);
        }
    }
    diag.ok = worst >= -tol;
    diag.worst_point = at;
    diag.deficit = std::min(worst, 0.0);
    return diag;
}

bool leq_E(const Measure& mu, const Measure& nu, double tol) {
    return leq_E_diagnose(mu, nu, tol).ok;
}

namespace {

// Roots of q(x) = level inside (l, r), sorted.
std::vector<double> quad_level_roots(const Potential::Quad& q, double level, double l, double r) {
    std::vector<double> roots;
    double a = q.a, b = q.b, c = q.c - level;
    if (std::abs(a) < 1e-300) {
        if (b != 0.0) roots.push_back(-c / b);
    } else {
        double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            double t = -0.5 * (b + (b >= 0.0 ? sq : -sq));
            double r1 = t / a;
            double r2 = (t != 0.0) ? c / t : r1;
            roots.push_back(r1);
            if (r2 != r1) roots.push_back(r2);
        }
    }
    std::vector<double> inside;
    for (double x : roots)
        if (x > l && x < r) inside.push_back(x);
    std::sort(inside.begin(), inside.end());
    return inside;
}

}  // namespace

std::vector<IrreducibleComponent> irreducible_components(const Measure& mu, const Measure& nu,
                                                         double tol) {
    Cx v = leq_cx(mu, nu, tol);
    if (v == Cx::False) throw NotInConvexOrder("irreducible_components: mu not <=cx nu");

    Potential pmu = Potential::of(mu);
    Potential pnu = Potential::of(nu);
    DiffGrid g = diff_grid(pmu, pnu);
    DiffScan s = scan_difference(g);
    if (s.max_abs <= tol) return {};  // mu == nu up to tolerance

    double span = g.xs.back() - g.xs.front();
    double snap = std::max(16.0 * tol, 1e-12 * (1.0 + span));

    // Maximal intervals where D > tol, assembled from per-segment runs.
    struct Run {
        double l, r;
    };
    std::vector<Run> runs;
    auto push_run = [&](double l, double r) {
        if (!(r > l)) return;
        if (!runs.empty() && l - runs.back().r <= snap)
            runs.back().r = r;
        else
            runs.push_back({l, r});
    };
    for (std::size_t i = 1; i < g.xs.size(); ++i) {
        double l = g.xs[i - 1], r = g.xs[i];
        const auto& q = g.seg[i];
        std::vector<double> cuts = quad_level_roots(q, tol, l, r);
        cuts.insert(cuts.begin(), l);
        cuts.push_back(r);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double m = 0.5 * (cuts[k] + cuts[k + 1]);
            if (q.eval(m) > tol) push_run(cuts[k], cuts[k + 1]);
        }
    }

    // Level-tol detection misplaces a boundary by up to sqrt(tol / curvature)
    // at a smooth touch. Refine each run end to the nearest exact zero
    // candidate: a grid breakpoint, the parabola vertex, or a D = 0 root.
    auto refine = [&](double p, bool hull_end) {
        if (hull_end) return p;
        std::size_t si = std::upper_bound(g.xs.begin(), g.xs.end(), p) - g.xs.begin();
        const auto& q = g.seg[si];
        double radius = 4.0 * tol / std::max(std::abs(2.0 * q.a * p + q.b), 1e-12);
        if (q.a > 1e-12) radius = std::max(radius, 4.0 * std::sqrt(tol / q.a));
        radius = std::min(radius, 0.125 * (1.0 + span));
        double best = p, best_d = radius;
        auto consider = [&](double c) {
            double d = std::abs(c - p);
            if (d <= best_d && g.eval(c) <= tol) {
                best_d = d;
                best = c;
            }
        };
        auto lb = std::lower_bound(g.xs.begin(), g.xs.end(), p - radius);
        for (auto it = lb; it != g.xs.end() && *it <= p + radius; ++it) consider(*it);
        if (q.a > 1e-12) consider(-q.b / (2.0 * q.a));
        double lo = si > 0 ? g.xs[si - 1] : p - radius;
        double hi = si < g.xs.size() ? g.xs[si] : p + radius;
        for (double root : quad_level_roots(q, 0.0, lo, hi)) consider(root);
        return best;
    };
    for (auto& run : runs) {
        run.l = refine(run.l, run.l == g.xs.front());
        run.r = refine(run.r, run.r == g.xs.back());
    }

    std::vector<IrreducibleComponent> out;
    double prev_right = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < runs.size(); ++k) {
        double a = runs[k].l, b = runs[k].r;
        // Swallow atoms sitting at (numerically shifted) boundaries; an atom
        // shared between two adjacent components has no valid attribution.
        for (const Measure* m : {&nu, &mu}) {
            for (const auto& at : m->atoms()) {
                bool near_left = std::abs(at.pos - a) <= snap;
                bool near_right = std::abs(at.pos - b) <= snap;
                if (!near_left && !near_right) continue;
                bool shared_prev = near_left && std::abs(at.pos - prev_right) <= snap && k > 0;
                bool shared_next =
                    near_right && k + 1 < runs.size() && std::abs(at.pos - runs[k + 1].l) <= snap;
                if (shared_prev || shared_next)
                    throw BoundaryAtom("irreducible_components: atom at component endpoint " +
                                       std::to_string(at.pos));
                if (near_left) a = std::min(a, at.pos);
                if (near_right) b = std::max(b, at.pos);
            }
        }
        prev_right = b;
        Interval iv(a, b);
        out.push_back({iv, restrict(mu, iv), restrict(nu, iv)});
    }
    return out;
}

}  // namespace mmt
