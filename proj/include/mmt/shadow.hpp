#pragma once

#include <vector>

#include "mmt/measure.hpp"
#include "mmt/slicer.hpp"

namespace mmt {

struct ShadowLink {
    double source;
    double mass;
    Measure target;
};

// The shadow S^nu(mu) together with the residual nu - S^nu(mu) and the
// per-atom transport links that produced it.
struct ShadowResult {
    Measure shadow;
    Measure residual;
    std::vector<ShadowLink> links;
};

// Shadow of the atom a*delta_x in nu: the quantile band of nu with mass a
// and mean x (an interval restriction, with partial masses at endpoint atoms
// when nu has atoms). Located by monotone bisection on the left cdf level.
ShadowResult atom_shadow(double a, double x, const Measure& nu);

// Shadow of a general mu: mu is discretized, then its atoms are shadowed
// left-to-right in the running residual; associativity of shadows makes the
// aggregate order-independent.
ShadowResult shadow(const Measure& mu, const Measure& nu, int resolution = 2048);

namespace detail {

// Extracts the mass-a band of the residual whose mean is x (bisection on the
// left level). feas_slack absorbs boundary saturation up to the stated
// barycenter tolerance; beyond it the request is infeasible.
Measure slice_for_mean(LevelSlicer& slicer, double a, double x, double feas_slack);

double feasibility_slack(const Measure& nu);

}  // namespace detail

}  // namespace mmt
