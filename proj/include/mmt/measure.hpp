#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "mmt/errors.hpp"

namespace mmt {

// Canonical-form thresholds. Components whose mass falls below kMassEps are
// dropped; subtract clamps negative residues up to kSubEps.
inline constexpr double kMassEps = 1e-13;
inline constexpr double kSubEps = 1e-10;

struct Interval {
    double left = -std::numeric_limits<double>::infinity();
    double right = std::numeric_limits<double>::infinity();

    Interval() = default;
    Interval(double l, double r) : left(l), right(r) {}

    bool contains(double x) const { return left <= x && x <= right; }
    double length() const { return right - left; }
    static Interval all() { return Interval(); }
};

// A finite positive measure on the real line: point masses plus
// piecewise-constant density segments, kept in canonical form (sorted,
// deduplicated positions, disjoint pieces, adjacent equal-density pieces
// merged, sub-threshold masses dropped).
class Measure {
public:
    struct Atom {
        double pos;
        double mass;
    };
    struct Piece {
        double left;
        double right;
        double density;
        double mass() const { return density * (right - left); }
    };

    Measure() = default;
    Measure(std::vector<Atom> atoms, std::vector<Piece> pieces);

    static Measure point(double x, double m);
    static Measure uniform(double left, double right, double total_mass);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    bool empty() const { return atoms_.empty() && pieces_.empty(); }
    bool has_atoms() const { return !atoms_.empty(); }
    std::size_t component_count() const { return atoms_.size() + pieces_.size(); }

    double mass() const { return mass_; }
    double first_moment() const { return m1_; }
    double second_moment() const;
    double barycenter() const;

    double min_support() const;
    double max_support() const;

    // mass of (-inf, x]
    double cdf(double x) const;
    // left-continuous generalized inverse of the cdf, defined for 0 < q <= mass
    double quantile(double q) const;

    double atom_mass_at(double x) const;
    double density_at(double x) const;

private:
    std::vector<Atom> atoms_;
    std::vector<Piece> pieces_;
    double mass_ = 0.0;
    double m1_ = 0.0;

    void canonicalize();
    friend Measure add_many(const std::vector<Measure>& parts);
};

Measure add(const Measure& a, const Measure& b);
Measure add_many(const std::vector<Measure>& parts);
// Pointwise difference a - b; requires b <= a setwise up to kSubEps.
Measure subtract(const Measure& a, const Measure& b);
// Closed-interval restriction: atoms at finite endpoints are included.
Measure restrict(const Measure& m, const Interval& iv);
Measure scale(const Measure& m, double factor);
// Purely atomic approximation: each density piece is split into equal-mass
// cells replaced by atoms at cell barycenters; existing atoms pass through.
Measure discretize(const Measure& m, int n_atoms);

// Splits m at x into (m restricted to (-inf, x], m restricted to (x, inf)),
// with atom_share_left of any atom at x assigned to the left part.
std::pair<Measure, Measure> split_at(const Measure& m, double x, double atom_share_left = 1.0);

// sup_x |F_a(x) - F_b(x)|
double kolmogorov_distance(const Measure& a, const Measure& b);
// Exact 1d Wasserstein-1 distance; requires equal masses (within kSubEps).
double w1_distance_1d(const Measure& a, const Measure& b);
// Mass of the lattice meet a /\ b: summed min of densities on the common
// refinement plus min of co-located atom masses.
double overlap_mass(const Measure& a, const Measure& b);

}  // namespace mmt
