#include "mmt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmt {

namespace {

// Neumaier-compensated accumulator for mass/moment sums.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

bool finite(double x) { return std::isfinite(x); }

// Combines the piece lists of two measures on their common refinement and
// applies op(density_a, density_b) per elementary segment.
template <typename Op>
std::vector<Measure::Piece> combine_pieces(const std::vector<Measure::Piece>& pa,
                                           const std::vector<Measure::Piece>& pb, Op op) {
    std::vector<double> edges;
    edges.reserve(2 * (pa.size() + pb.size()));
    for (const auto& p : pa) {
        edges.push_back(p.left);
        edges.push_back(p.right);
    }
    for (const auto& p : pb) {
        edges.push_back(p.left);
        edges.push_back(p.right);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<Measure::Piece> out;
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double l = edges[k], r = edges[k + 1];
        while (ia < pa.size() && pa[ia].right <= l) ++ia;
        while (ib < pb.size() && pb[ib].right <= l) ++ib;
        double da = (ia < pa.size() && pa[ia].left <= l && r <= pa[ia].right) ? pa[ia].density : 0.0;
        double db = (ib < pb.size() && pb[ib].left <= l && r <= pb[ib].right) ? pb[ib].density : 0.0;
        double d = op(da, db, l, r);
        if (d > 0.0) out.push_back({l, r, d});
    }
    return out;
}

}  // namespace

Measure::Measure(std::vector<Atom> atoms, std::vector<Piece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    canonicalize();
}

Measure Measure::point(double x, double m) { return Measure({{x, m}}, {}); }

Measure Measure::uniform(double left, double right, double total_mass) {
    if (!(right > left)) throw Error("uniform: requires left < right");
    return Measure({}, {{left, right, total_mass / (right - left)}});
}

void Measure::canonicalize() {
    for (const auto& a : atoms_) {
        if (!finite(a.pos) || !finite(a.mass)) throw Error("measure: non-finite atom");
        if (a.mass < -kSubEps) throw Error("measure: negative atom mass");
    }
    for (const auto& p : pieces_) {
        if (!finite(p.left) || !finite(p.right) || !finite(p.density) || !(p.left < p.right))
            throw Error("measure: malformed piece");
        if (p.density < -kSubEps) throw Error("measure: negative density");
    }

    std::stable_sort(atoms_.begin(), atoms_.end(),
                     [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        if (!merged.empty() && merged.back().pos == a.pos)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    atoms_.clear();
    for (const auto& a : merged)
        if (a.mass >= kMassEps) atoms_.push_back(a);

    // Sweep-line over piece edges; overlapping pieces sum their densities.
    if (!pieces_.empty()) {
        std::vector<std::pair<double, double>> events;  // (pos, +-density)
        events.reserve(2 * pieces_.size());
        for (const auto& p : pieces_) {
            if (p.density <= 0.0) continue;
            events.emplace_back(p.left, p.density);
            events.emplace_back(p.right, -p.density);
        }
        std::sort(events.begin(), events.end());
        std::vector<Piece> segs;
        double depth = 0.0;
        std::size_t i = 0;
        double prev = 0.0;
        bool open = false;
        while (i < events.size()) {
            double x = events[i].first;
            if (open && depth > 0.0 && x > prev) segs.push_back({prev, x, depth});
            while (i < events.size() && events[i].first == x) {
                depth += events[i].second;
                ++i;
            }
            if (depth < 0.0) depth = 0.0;
            prev = x;
            open = true;
        }
        pieces_.clear();
        for (const auto& s : segs) {
            if (s.mass() < kMassEps) continue;
            if (!pieces_.empty() && pieces_.back().right == s.left &&
                pieces_.back().density == s.density)
                pieces_.back().right = s.right;
            else
                pieces_.push_back(s);
        }
    }

    Accum m, m1;
    for (const auto& a : atoms_) {
        m.add(a.mass);
        m1.add(a.mass * a.pos);
    }
    for (const auto& p : pieces_) {
        m.add(p.mass());
        m1.add(p.density * 0.5 * (p.right * p.right - p.left * p.left));
    }
    mass_ = m.value();
    m1_ = m1.value();
}

double Measure::second_moment() const {
    Accum m2;
    for (const auto& a : atoms_) m2.add(a.mass * a.pos * a.pos);
    for (const auto& p : pieces_)
        m2.add(p.density * (p.right * p.right * p.right - p.left * p.left * p.left) / 3.0);
    return m2.value();
}

double Measure::barycenter() const {
    if (mass_ <= 0.0) throw ZeroMass();
    return m1_ / mass_;
}

double Measure::min_support() const {
    double lo = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) lo = std::min(lo, atoms_.front().pos);
    if (!pieces_.empty()) lo = std::min(lo, pieces_.front().left);
    return lo;
}

double Measure::max_support() const {
    double hi = -std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) hi = std::max(hi, atoms_.back().pos);
    if (!pieces_.empty()) hi = std::max(hi, pieces_.back().right);
    return hi;
}

double Measure::cdf(double x) const {
    Accum s;
    for (const auto& a : atoms_) {
        if (a.pos > x) break;
        s.add(a.mass);
    }
    for (const auto& p : pieces_) {
        if (p.left >= x) break;
        s.add(p.density * (std::min(x, p.right) - p.left));
    }
    return s.value();
}

double Measure::quantile(double q) const {
    if (!(q > 0.0) || q > mass_ * (1.0 + 1e-12) + 1e-300)
        throw OutOfRange("quantile: level outside (0, mass]");
    q = std::min(q, mass_);
    double cum = 0.0;
    std::size_t ia = 0, ip = 0;
    // Merge-walk atoms and pieces in position order; pieces are consumed in
    // sub-segments up to the next atom.
    double piece_pos = ip < pieces_.size() ? pieces_[ip].left : 0.0;
    while (ia < atoms_.size() || ip < pieces_.size()) {
        double apos = ia < atoms_.size() ? atoms_[ia].pos : std::numeric_limits<double>::infinity();
        if (ip < pieces_.size() && pieces_[ip].left <= apos) {
            const auto& p = pieces_[ip];
            if (piece_pos < p.left) piece_pos = p.left;
            double seg_end = std::min(p.right, apos);
            if (seg_end > piece_pos) {
                double gain = p.density * (seg_end - piece_pos);
                if (cum + gain >= q) return piece_pos + (q - cum) / p.density;
                cum += gain;
                piece_pos = seg_end;
            }
            if (piece_pos >= p.right) {
                ++ip;
                piece_pos = ip < pieces_.size() ? pieces_[ip].left : 0.0;
                continue;
            }
            // an atom interrupts this piece
            if (cum + atoms_[ia].mass >= q) return atoms_[ia].pos;
            cum += atoms_[ia].mass;
            ++ia;
        } else {
            if (cum + atoms_[ia].mass >= q) return atoms_[ia].pos;
            cum += atoms_[ia].mass;
            ++ia;
        }
    }
    return max_support();
}

double Measure::atom_mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.pos < v; });
    if (it != atoms_.end() && it->pos == x) return it->mass;
    return 0.0;
}

double Measure::density_at(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.right; });
    if (it != pieces_.end() && it->left <= x && x < it->right) return it->density;
    return 0.0;
}

Measure add(const Measure& a, const Measure& b) {
    std::vector<Measure::Atom> atoms = a.atoms();
    atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
    std::vector<Measure::Piece> pieces = a.pieces();
    pieces.insert(pieces.end(), b.pieces().begin(), b.pieces().end());
    return Measure(std::move(atoms), std::move(pieces));
}

Measure add_many(const std::vector<Measure>& parts) {
    std::vector<Measure::Atom> atoms;
    std::vector<Measure::Piece> pieces;
    for (const auto& m : parts) {
        atoms.insert(atoms.end(), m.atoms().begin(), m.atoms().end());
        pieces.insert(pieces.end(), m.pieces().begin(), m.pieces().end());
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Measure subtract(const Measure& a, const Measure& b) {
    std::vector<Measure::Atom> atoms;
    std::size_t ia = 0, ib = 0;
    const auto& aa = a.atoms();
    const auto& ba = b.atoms();
    while (ia < aa.size() || ib < ba.size()) {
        if (ib == ba.size() || (ia < aa.size() && aa[ia].pos < ba[ib].pos)) {
            atoms.push_back(aa[ia]);
            ++ia;
        } else if (ia == aa.size() || ba[ib].pos < aa[ia].pos) {
            if (ba[ib].mass > kSubEps)
                throw NotDominated("subtract: atom at " + std::to_string(ba[ib].pos) +
                                   " absent from minuend");
            ++ib;
        } else {
            double d = aa[ia].mass - ba[ib].mass;
            if (d < -kSubEps)
                throw NotDominated("subtract: atom mass at " + std::to_string(aa[ia].pos) +
                                   " exceeded");
            if (d > 0.0) atoms.push_back({aa[ia].pos, d});
            ++ia;
            ++ib;
        }
    }
    auto pieces = combine_pieces(a.pieces(), b.pieces(),
                                 [](double da, double db, double l, double r) {
                                     double d = da - db;
                                     if (d < -kSubEps * (1.0 + da + db))
                                         throw NotDominated(
                                             "subtract: density exceeded on [" +
                                             std::to_string(l) + ", " + std::to_string(r) + "]");
                                     return d > 0.0 ? d : 0.0;
                                 });
    return Measure(std::move(atoms), std::move(pieces));
}

Measure restrict(const Measure& m, const Interval& iv) {
    std::vector<Measure::Atom> atoms;
    for (const auto& a : m.atoms())
        if (iv.contains(a.pos)) atoms.push_back(a);
    std::vector<Measure::Piece> pieces;
    for (const auto& p : m.pieces()) {
        double l = std::max(p.left, iv.left);
        double r = std::min(p.right, iv.right);
        if (r > l) pieces.push_back({l, r, p.density});
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Measure scale(const Measure& m, double factor) {
    if (factor < 0.0) throw Error("scale: negative factor");
    std::vector<Measure::Atom> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({a.pos, a.mass * factor});
    std::vector<Measure::Piece> pieces;
    for (const auto& p : m.pieces()) pieces.push_back({p.left, p.right, p.density * factor});
    return Measure(std::move(atoms), std::move(pieces));
}

Measure discretize(const Measure& m, int n_atoms) {
    if (n_atoms < 1) throw Error("discretize: n_atoms must be positive");
    if (m.pieces().empty()) return m;

    double piece_mass = 0.0;
    for (const auto& p : m.pieces()) piece_mass += p.mass();

    // Allocate cells to pieces by largest remainder, at least one per piece.
    const auto& ps = m.pieces();
    std::vector<int> cells(ps.size(), 1);
    int budget = std::max<int>(n_atoms, static_cast<int>(ps.size()));
    std::vector<std::pair<double, std::size_t>> rema(ps.size());
    int used = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double share = budget * ps[i].mass() / piece_mass;
        cells[i] = std::max(1, static_cast<int>(std::floor(share)));
        used += cells[i];
        rema[i] = {share - std::floor(share), i};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& x, const auto& y) {
        return x.first > y.first || (x.first == y.first && x.second < y.second);
    });
    for (std::size_t k = 0; used < budget && k < rema.size(); ++k, ++used) ++cells[rema[k].second];

    std::vector<Measure::Atom> atoms = m.atoms();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps[i];
        int k = cells[i];
        double w = (p.right - p.left) / k;
        double cm = p.mass() / k;
        for (int j = 0; j < k; ++j) atoms.push_back({p.left + (j + 0.5) * w, cm});
    }
    return Measure(std::move(atoms), {});
}

std::pair<Measure, Measure> split_at(const Measure& m, double x, double atom_share_left) {
    std::vector<Measure::Atom> la, ra;
    for (const auto& a : m.atoms()) {
        if (a.pos < x)
            la.push_back(a);
        else if (a.pos > x)
            ra.push_back(a);
        else {
            double lm = a.mass * atom_share_left;
            if (lm > 0.0) la.push_back({a.pos, lm});
            if (a.mass - lm > 0.0) ra.push_back({a.pos, a.mass - lm});
        }
    }
    std::vector<Measure::Piece> lp, rp;
    for (const auto& p : m.pieces()) {
        if (p.right <= x)
            lp.push_back(p);
        else if (p.left >= x)
            rp.push_back(p);
        else {
            lp.push_back({p.left, x, p.density});
            rp.push_back({x, p.right, p.density});
        }
    }
    return {Measure(std::move(la), std::move(lp)), Measure(std::move(ra), std::move(rp))};
}

namespace {

// Walks the merged cdf difference F_a - F_b over the union of breakpoints.
// Visitor sees affine segments: visit(l, r, value_at_l, slope) plus jump
// points visit_jump(x, value_before, value_after).
template <typename SegFn, typename JumpFn>
void walk_cdf_difference(const Measure& a, const Measure& b, SegFn seg, JumpFn jump) {
    std::vector<double> xs;
    xs.reserve(a.component_count() * 2 + b.component_count() * 2);
    for (const auto& t : a.atoms()) xs.push_back(t.pos);
    for (const auto& t : b.atoms()) xs.push_back(t.pos);
    for (const auto& p : a.pieces()) {
        xs.push_back(p.left);
        xs.push_back(p.right);
    }
    for (const auto& p : b.pieces()) {
        xs.push_back(p.left);
        xs.push_back(p.right);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.empty()) return;

    double val = 0.0;  // F_a - F_b just after previous breakpoint
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = xs[i];
        double before = val;
        double j = a.atom_mass_at(x) - b.atom_mass_at(x);
        val = before + j;
        jump(x, before, val);
        if (i + 1 < xs.size()) {
            double slope = a.density_at(x) - b.density_at(x);
            seg(x, xs[i + 1], val, slope);
            val += slope * (xs[i + 1] - x);
        }
    }
}

}  // namespace

double kolmogorov_distance(const Measure& a, const Measure& b) {
    double worst = 0.0;
    walk_cdf_difference(
        a, b,
        [&](double l, double r, double v0, double s) {
            worst = std::max(worst, std::abs(v0));
            worst = std::max(worst, std::abs(v0 + s * (r - l)));
        },
        [&](double, double before, double after) {
            worst = std::max(worst, std::max(std::abs(before), std::abs(after)));
        });
    return worst;
}

double w1_distance_1d(const Measure& a, const Measure& b) {
    if (std::abs(a.mass() - b.mass()) > kSubEps * (1.0 + a.mass() + b.mass()))
        throw MarginalMismatch("w1_distance_1d: masses differ");
    double total = 0.0;
    walk_cdf_difference(
        a, b,
        [&](double l, double r, double v0, double s) {
            double v1 = v0 + s * (r - l);
            if (v0 * v1 >= 0.0) {
                total += 0.5 * std::abs(v0 + v1) * (r - l);
            } else {
                double xz = l + (0.0 - v0) / s;
                total += 0.5 * std::abs(v0) * (xz - l) + 0.5 * std::abs(v1) * (r - xz);
            }
        },
        [&](double, double, double) {});
    return total;
}

double overlap_mass(const Measure& a, const Measure& b) {
    Accum s;
    std::size_t ib = 0;
    for (const auto& x : a.atoms()) {
        while (ib < b.atoms().size() && b.atoms()[ib].pos < x.pos) ++ib;
        if (ib < b.atoms().size() && b.atoms()[ib].pos == x.pos)
            s.add(std::min(x.mass, b.atoms()[ib].mass));
    }
    auto mins = combine_pieces(a.pieces(), b.pieces(), [](double da, double db, double, double) {
        return std::min(da, db);
    });
    for (const auto& p : mins) s.add(p.mass());
    return s.value();
}

}  // namespace mmt
