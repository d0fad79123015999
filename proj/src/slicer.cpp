#include "mmt/slicer.hpp"

#include <algorithm>
#include <cmath>

namespace mmt {

LevelSlicer::LevelSlicer(const Measure& m) {
    comps_.reserve(m.component_count());
    const auto& atoms = m.atoms();
    const auto& pieces = m.pieces();
    std::size_t ia = 0, ip = 0;
    double pos = 0.0;  // consumed-up-to position inside the current piece
    bool in_piece = false;
    // Position-ordered components; atoms interior to a piece split it.
    while (ia < atoms.size() || ip < pieces.size()) {
        double apos = ia < atoms.size() ? atoms[ia].pos : std::numeric_limits<double>::infinity();
        if (ip < pieces.size()) {
            const auto& p = pieces[ip];
            if (!in_piece) {
                pos = p.left;
                in_piece = true;
            }
            if (apos <= pos) {
                comps_.push_back({true, apos, apos, atoms[ia].mass});
                ++ia;
                continue;
            }
            double seg_end = std::min(p.right, apos);
            if (seg_end > pos) comps_.push_back({false, pos, seg_end, p.density});
            pos = seg_end;
            if (pos >= p.right) {
                ++ip;
                in_piece = false;
            }
        } else {
            comps_.push_back({true, apos, apos, atoms[ia].mass});
            ++ia;
        }
    }
    rebuild();
}

void LevelSlicer::rebuild() {
    cmass_.resize(comps_.size());
    cm1_.resize(comps_.size());
    double m = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        const auto& c = comps_[i];
        if (c.is_atom) {
            m += c.w;
            m1 += c.w * c.a;
        } else {
            m += c.w * (c.b - c.a);
            m1 += c.w * 0.5 * (c.b * c.b - c.a * c.a);
        }
        cmass_[i] = m;
        cm1_[i] = m1;
    }
}

double LevelSlicer::moment_below(double level) const {
    if (comps_.empty() || level <= 0.0) return 0.0;
    level = std::min(level, cmass_.back());
    std::size_t k = std::lower_bound(cmass_.begin(), cmass_.end(), level) - cmass_.begin();
    if (k >= comps_.size()) return cm1_.back();
    double base_mass = k > 0 ? cmass_[k - 1] : 0.0;
    double base_m1 = k > 0 ? cm1_[k - 1] : 0.0;
    double q = level - base_mass;
    const auto& c = comps_[k];
    if (c.is_atom) return base_m1 + q * c.a;
    double xe = c.a + q / c.w;
    xe = std::min(xe, c.b);
    return base_m1 + c.w * 0.5 * (xe * xe - c.a * c.a);
}

double LevelSlicer::mean_between(double lo, double hi) const {
    return (moment_below(hi) - moment_below(lo)) / (hi - lo);
}

void LevelSlicer::collect_between(double lo, double hi, std::vector<Comp>& slice,
                                  std::vector<Comp>& kept) const {
    double cum = 0.0;
    for (const auto& c : comps_) {
        double cm = c.mass();
        double c_lo = cum, c_hi = cum + cm;
        cum = c_hi;
        double take_lo = std::max(lo, c_lo), take_hi = std::min(hi, c_hi);
        if (take_hi <= take_lo) {
            kept.push_back(c);
            continue;
        }
        if (c.is_atom) {
            double t = take_hi - take_lo;
            slice.push_back({true, c.a, c.a, t});
            if (c.w - t > 0.0) kept.push_back({true, c.a, c.a, c.w - t});
        } else {
            double xl = (take_lo == c_lo) ? c.a : c.a + (take_lo - c_lo) / c.w;
            double xr = (take_hi == c_hi) ? c.b : c.a + (take_hi - c_lo) / c.w;
            xl = std::max(xl, c.a);
            xr = std::min(xr, c.b);
            if (xr > xl) slice.push_back({false, xl, xr, c.w});
            if (xl > c.a) kept.push_back({false, c.a, xl, c.w});
            if (c.b > xr) kept.push_back({false, xr, c.b, c.w});
        }
    }
}

Measure LevelSlicer::slice_between(double lo, double hi) const {
    std::vector<Comp> slice, kept;
    collect_between(lo, hi, slice, kept);
    std::vector<Measure::Atom> atoms;
    std::vector<Measure::Piece> pieces;
    for (const auto& c : slice) {
        if (c.is_atom)
            atoms.push_back({c.a, c.w});
        else
            pieces.push_back({c.a, c.b, c.w});
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Measure LevelSlicer::extract_between(double lo, double hi) {
    std::vector<Comp> slice, kept;
    collect_between(lo, hi, slice, kept);
    std::vector<Measure::Atom> atoms;
    std::vector<Measure::Piece> pieces;
    for (const auto& c : slice) {
        if (c.is_atom)
            atoms.push_back({c.a, c.w});
        else
            pieces.push_back({c.a, c.b, c.w});
    }
    comps_ = std::move(kept);
    rebuild();
    return Measure(std::move(atoms), std::move(pieces));
}

Measure LevelSlicer::remaining() const {
    std::vector<Measure::Atom> atoms;
    std::vector<Measure::Piece> pieces;
    for (const auto& c : comps_) {
        if (c.is_atom)
            atoms.push_back({c.a, c.w});
        else
            pieces.push_back({c.a, c.b, c.w});
    }
    return Measure(std::move(atoms), std::move(pieces));
}

}  // namespace mmt
