#pragma once

#include <functional>
#include <vector>

#include "mmt/measure.hpp"

namespace mmt {

// A transport plan stored as source-atom -> target sub-measure links. The
// first marginal is atomic by construction; the second is the sum of the
// targets.
class Coupling {
public:
    struct Link {
        double source;
        Measure target;
        double mass() const { return target.mass(); }
    };

    Coupling() = default;
    explicit Coupling(std::vector<Link> links);

    const std::vector<Link>& links() const { return links_; }
    bool empty() const { return links_.empty(); }
    double mass() const;

    Measure first_marginal() const;
    Measure second_marginal() const;

    // Support bounds over sources and targets combined.
    double min_support() const;
    double max_support() const;

private:
    std::vector<Link> links_;  // sorted by source
};

struct MongeReport {
    double score = 0.0;         // binned estimate of E[Var(X|Y)]
    double overlap_mass = 0.0;  // mass of bins fed by >= 2 distinct sources
    double bin_width = 0.0;
};

// True iff every link's target barycenter deviates from its source by <= tol.
bool check_martingale(const Coupling& c, double tol = 1e-9);

// Bins the target axis at the given width; per bin, the variance of source
// positions weighted by deposited mass. score = mass-weighted average.
MongeReport monge_report(const Coupling& c, double bin_width);

// Exact E[Var(X|Y)] computed on the common refinement of the link targets;
// the bin_width -> 0 limit of monge_report. Zero iff the targets are
// mutually singular.
double monge_score_exact(const Coupling& c);

// Integral of cost(x, y) against the plan; piece integrals use 16-point
// Gauss-Legendre per piece.
double cost(const Coupling& c, const std::function<double(double, double)>& cost_fn);

// E[f(E[Y|X] - X)] - E[g(E[X|Y])]; the backward kernel is approximated by
// target-axis binning (default bin width: support diameter / 4096). The
// binning bias is bounded by the modulus of continuity of g times the bin
// width; weak_cost_exact evaluates the kernel on the common refinement of
// the targets instead (the bin-width -> 0 limit).
double weak_cost(const Coupling& c, const std::function<double(double)>& f,
                 const std::function<double(double)>& g, double bin_width = 0.0);
double weak_cost_exact(const Coupling& c, const std::function<double(double)>& f,
                       const std::function<double(double)>& g);

// Upper bound on W1 between two plans with (near-)equal marginals: sources
// are matched by the quantile coupling of the first marginals, target bands
// are matched level-by-level within each fragment, and the exact 1d W1 of
// matched bands is summed.
double w1_distance(const Coupling& a, const Coupling& b, double marginal_tol = 1e-6);

}  // namespace mmt
