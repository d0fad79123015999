#pragma once

#include <functional>
#include <vector>

#include "mmt/coupling.hpp"
#include "mmt/measure.hpp"

namespace mmt {

inline constexpr int kLpMaxX = 40;
inline constexpr int kLpMaxY = 60;

// Discrete martingale-transport instance on a grid.
struct LPInstance {
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    std::vector<double> mu_weights;  // sums to 1
    std::vector<double> nu_weights;  // sums to 1
    std::vector<std::vector<double>> objective;  // c(x_i, y_j)

    static LPInstance from_measures(const Measure& mu, const Measure& nu,
                                    const std::function<double(double, double)>& c);
};

struct MotSolution {
    double value = 0.0;
    std::vector<std::vector<double>> plan;  // row i: mass sent from x_i to y_j
    double min_reduced_cost = 0.0;
    bool certified = false;
    Coupling as_coupling(const LPInstance& inst) const;
};

// Minimizes sum c_ij p_ij over row sums = mu, column sums = nu, and
// martingale rows sum_j y_j p_ij = x_i mu_i. Dense two-phase simplex with
// Bland's rule.
MotSolution solve_mot(const LPInstance& inst);

// Minimizes sum y_j^2 eta_j over 0 <= eta <= nu, mass/mean matching mu, and
// call dominance at every support point; the unique optimizer is the shadow.
Measure solve_shadow_lp(const Measure& mu, const Measure& nu);

struct GapRow {
    double eps;
    double mmt_value;
    double lp_value;
};

// Compares the LP optimum on a discretized grid against the cheapest
// constructed Monge martingale transport (barcode, and the LP plan lifted
// back to measures then pushed through monge_approximate at each eps).
std::vector<GapRow> value_gap(const Measure& mu, const Measure& nu,
                              const std::function<double(double, double)>& c,
                              const std::vector<double>& eps_list, int y_resolution = 48,
                              int builder_resolution = 2048);

// Equal-mass quantile cells of an atomless measure: boundaries, restrictions
// and barycenters; the lift grid shared by value_gap and its tests.
struct QuantileCells {
    std::vector<Measure> cells;
    std::vector<double> barycenters;
};
QuantileCells quantile_cells(const Measure& nu, int n);

}  // namespace mmt
