#pragma once

#include <vector>

#include "mmt/measure.hpp"

namespace mmt {

// Mutable consumption view over a measure, indexed by cdf level (cumulative
// mass in position order). A slice between two levels is the corresponding
// quantile band: an interval restriction with partial masses at endpoint
// atoms. Extraction removes the band and relabels the remaining levels.
class LevelSlicer {
public:
    explicit LevelSlicer(const Measure& m);

    double total_mass() const { return cmass_.empty() ? 0.0 : cmass_.back(); }
    // Mean of the band (lo, hi]; requires 0 <= lo < hi <= total_mass.
    double mean_between(double lo, double hi) const;
    // First moment of everything below the given level.
    double moment_below(double level) const;
    Measure slice_between(double lo, double hi) const;
    // Removes the band and returns it as a measure.
    Measure extract_between(double lo, double hi);
    Measure remaining() const;

private:
    struct Comp {
        bool is_atom;
        double a;  // atom position, or piece left edge
        double b;  // piece right edge (unused for atoms)
        double w;  // atom mass, or piece density
        double mass() const { return is_atom ? w : w * (b - a); }
    };
    std::vector<Comp> comps_;
    std::vector<double> cmass_;  // inclusive prefix masses
    std::vector<double> cm1_;    // inclusive prefix first moments

    void rebuild();
    void collect_between(double lo, double hi, std::vector<Comp>& slice,
                         std::vector<Comp>& kept) const;
};

}  // namespace mmt
