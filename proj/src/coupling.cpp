#include "mmt/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mmt/slicer.hpp"

namespace mmt {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlWeight[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

}  // namespace

Coupling::Coupling(std::vector<Link> links) : links_(std::move(links)) {
    std::stable_sort(links_.begin(), links_.end(),
                     [](const Link& a, const Link& b) { return a.source < b.source; });
    links_.erase(std::remove_if(links_.begin(), links_.end(),
                                [](const Link& l) { return l.target.mass() < kMassEps; }),
                 links_.end());
}

double Coupling::mass() const {
    double m = 0.0;
    for (const auto& l : links_) m += l.mass();
    return m;
}

Measure Coupling::first_marginal() const {
    std::vector<Measure::Atom> atoms;
    atoms.reserve(links_.size());
    for (const auto& l : links_) atoms.push_back({l.source, l.mass()});
    return Measure(std::move(atoms), {});
}

Measure Coupling::second_marginal() const {
    std::vector<Measure> parts;
    parts.reserve(links_.size());
    for (const auto& l : links_) parts.push_back(l.target);
    return add_many(parts);
}

double Coupling::min_support() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& l : links_) lo = std::min({lo, l.source, l.target.min_support()});
    return lo;
}

double Coupling::max_support() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& l : links_) hi = std::max({hi, l.source, l.target.max_support()});
    return hi;
}

bool check_martingale(const Coupling& c, double tol) {
    for (const auto& l : c.links())
        if (std::abs(l.target.barycenter() - l.source) > tol) return false;
    return true;
}

namespace {

struct BinAgg {
    double m = 0.0, mx = 0.0, mxx = 0.0;
    double first_source = 0.0;
    bool any = false, multi = false;
    void deposit(double mass, double x) {
        m += mass;
        mx += mass * x;
        mxx += mass * x * x;
        if (!any) {
            any = true;
            first_source = x;
        } else if (x != first_source) {
            multi = true;
        }
    }
};

template <typename Fn>
void deposit_bins(const Coupling& c, double bin_width, double y0, Fn&& per_deposit) {
    for (const auto& l : c.links()) {
        for (const auto& a : l.target.atoms()) {
            long bin = static_cast<long>(std::floor((a.pos - y0) / bin_width));
            per_deposit(bin, a.mass, l.source);
        }
        for (const auto& p : l.target.pieces()) {
            long b0 = static_cast<long>(std::floor((p.left - y0) / bin_width));
            long b1 = static_cast<long>(std::floor((p.right - y0) / bin_width));
            for (long b = b0; b <= b1; ++b) {
                double lo = std::max(p.left, y0 + b * bin_width);
                double hi = std::min(p.right, y0 + (b + 1) * bin_width);
                if (hi > lo) per_deposit(b, p.density * (hi - lo), l.source);
            }
        }
    }
}

}  // namespace

MongeReport monge_report(const Coupling& c, double bin_width) {
    if (!(bin_width > 0.0)) throw Error("monge_report: bin_width must be positive");
    MongeReport rep;
    rep.bin_width = bin_width;
    if (c.empty()) return rep;
    double y0 = std::numeric_limits<double>::infinity();
    for (const auto& l : c.links()) y0 = std::min(y0, l.target.min_support());

    std::map<long, BinAgg> bins;
    deposit_bins(c, bin_width, y0,
                 [&](long b, double mass, double src) { bins[b].deposit(mass, src); });

    double total = 0.0, acc = 0.0, overlap = 0.0;
    for (const auto& [b, agg] : bins) {
        (void)b;
        total += agg.m;
        if (agg.m <= 0.0) continue;
        double var = agg.mxx / agg.m - (agg.mx / agg.m) * (agg.mx / agg.m);
        acc += agg.m * std::max(0.0, var);
        if (agg.multi) overlap += agg.m;
    }
    rep.score = total > 0.0 ? acc / total : 0.0;
    rep.overlap_mass = overlap;
    return rep;
}

namespace {

// Walks the common refinement of the link targets and reports each maximal
// region with a fixed conditional source distribution: visit(mass,
// conditional mean, conditional variance).
template <typename Fn>
void refine_backward_kernel(const Coupling& c, Fn&& visit) {
    if (c.empty()) return;
    std::map<double, BinAgg> at;  // atoms grouped by exact position
    struct Event {
        double x;
        double source;
        double ddens;
    };
    std::vector<Event> ev;
    for (const auto& l : c.links()) {
        for (const auto& a : l.target.atoms()) at[a.pos].deposit(a.mass, l.source);
        for (const auto& p : l.target.pieces()) {
            ev.push_back({p.left, l.source, p.density});
            ev.push_back({p.right, l.source, -p.density});
        }
    }
    for (const auto& [pos, agg] : at) {
        (void)pos;
        double mean = agg.mx / agg.m;
        double var = agg.mxx / agg.m - mean * mean;
        visit(agg.m, mean, std::max(0.0, var));
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
    std::map<double, double> dens;  // source -> density
    double sd = 0.0, sdx = 0.0, sdxx = 0.0;
    std::size_t i = 0;
    double prev = 0.0;
    bool open = false;
    while (i < ev.size()) {
        double x = ev[i].x;
        if (open && sd > 1e-300 && x > prev) {
            double mean = sdx / sd;
            double var = sdxx / sd - mean * mean;
            visit(sd * (x - prev), mean, std::max(0.0, var));
        }
        while (i < ev.size() && ev[i].x == x) {
            auto& d = dens[ev[i].source];
            sd -= d;
            sdx -= d * ev[i].source;
            sdxx -= d * ev[i].source * ev[i].source;
            d += ev[i].ddens;
            if (d < 0.0) d = 0.0;
            sd += d;
            sdx += d * ev[i].source;
            sdxx += d * ev[i].source * ev[i].source;
            ++i;
        }
        prev = x;
        open = true;
    }
}

}  // namespace

double monge_score_exact(const Coupling& c) {
    double total = 0.0, acc = 0.0;
    refine_backward_kernel(c, [&](double m, double mean, double var) {
        (void)mean;
        total += m;
        acc += m * var;
    });
    return total > 0.0 ? acc / total : 0.0;
}

double cost(const Coupling& c, const std::function<double(double, double)>& cost_fn) {
    double acc = 0.0;
    for (const auto& l : c.links()) {
        for (const auto& a : l.target.atoms()) acc += a.mass * cost_fn(l.source, a.pos);
        for (const auto& p : l.target.pieces()) {
            double mid = 0.5 * (p.left + p.right), half = 0.5 * (p.right - p.left);
            double s = 0.0;
            for (int k = 0; k < 16; ++k)
                s += kGlWeight[k] * cost_fn(l.source, mid + half * kGlNode[k]);
            acc += p.density * half * s;
        }
    }
    return acc;
}

namespace {

// First term of the weak cost: links grouped by source, f(barycenter - x).
double forward_term(const Coupling& c, const std::function<double(double)>& f) {
    double term1 = 0.0;
    const auto& ls = c.links();
    for (std::size_t i = 0; i < ls.size();) {
        std::size_t j = i;
        double m = 0.0, m1 = 0.0;
        while (j < ls.size() && ls[j].source == ls[i].source) {
            m += ls[j].mass();
            m1 += ls[j].target.first_moment();
            ++j;
        }
        term1 += m * f(m1 / m - ls[i].source);
        i = j;
    }
    return term1;
}

}  // namespace

double weak_cost(const Coupling& c, const std::function<double(double)>& f,
                 const std::function<double(double)>& g, double bin_width) {
    if (c.empty()) return 0.0;
    double lo = c.min_support(), hi = c.max_support();
    if (bin_width <= 0.0) bin_width = std::max(hi - lo, 1e-12) / 4096.0;

    double total = c.mass();
    double term1 = forward_term(c, f);

    // Second term: binned backward kernel, E[X | Y-bin].
    std::map<long, BinAgg> bins;
    deposit_bins(c, bin_width, lo,
                 [&](long b, double mass, double src) { bins[b].deposit(mass, src); });
    double term2 = 0.0;
    for (const auto& [b, agg] : bins) {
        (void)b;
        if (agg.m > 0.0) term2 += agg.m * g(agg.mx / agg.m);
    }
    return (term1 - term2) / total;
}

double weak_cost_exact(const Coupling& c, const std::function<double(double)>& f,
                       const std::function<double(double)>& g) {
    if (c.empty()) return 0.0;
    double term1 = forward_term(c, f);
    double term2 = 0.0;
    refine_backward_kernel(c, [&](double m, double mean, double var) {
        (void)var;
        term2 += m * g(mean);
    });
    return (term1 - term2) / c.mass();
}

double w1_distance(const Coupling& a, const Coupling& b, double marginal_tol) {
    double scale = 1.0 + std::max(a.mass(), b.mass());
    if (kolmogorov_distance(a.first_marginal(), b.first_marginal()) > marginal_tol * scale)
        throw MarginalMismatch("w1_distance: first marginals differ");
    if (kolmogorov_distance(a.second_marginal(), b.second_marginal()) > marginal_tol * scale)
        throw MarginalMismatch("w1_distance: second marginals differ");

    const auto& la = a.links();
    const auto& lb = b.links();
    double bound = 0.0;
    std::size_t ia = 0, ib = 0;
    double used_a = 0.0, used_b = 0.0;  // consumed mass within current links
    LevelSlicer* sa = nullptr;
    LevelSlicer* sb = nullptr;
    std::vector<LevelSlicer> store;
    store.reserve(la.size() + lb.size());

    while (ia < la.size() && ib < lb.size()) {
        double ma = la[ia].mass() - used_a;
        double mb = lb[ib].mass() - used_b;
        if (ma < kMassEps) {
            ++ia;
            used_a = 0.0;
            sa = nullptr;
            continue;
        }
        if (mb < kMassEps) {
            ++ib;
            used_b = 0.0;
            sb = nullptr;
            continue;
        }
        if (!sa) {
            store.emplace_back(la[ia].target);
            sa = &store.back();
        }
        if (!sb) {
            store.emplace_back(lb[ib].target);
            sb = &store.back();
        }
        double frag = std::min(ma, mb);
        Measure band_a = sa->extract_between(0.0, frag);
        Measure band_b = sb->extract_between(0.0, frag);
        bound += frag * std::abs(la[ia].source - lb[ib].source);
        bound += w1_distance_1d(band_a, band_b);
        used_a += frag;
        used_b += frag;
    }
    return bound;
}

}  // namespace mmt
