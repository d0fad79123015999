#include "mmt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmt/builders.hpp"
#include "mmt/convex_order.hpp"
#include "mmt/simplex.hpp"

namespace mmt {

LPInstance LPInstance::from_measures(const Measure& mu, const Measure& nu,
                                     const std::function<double(double, double)>& c) {
    if (!mu.pieces().empty() || !nu.pieces().empty())
        throw Error("LPInstance: marginals must be purely atomic");
    LPInstance inst;
    for (const auto& a : mu.atoms()) {
        inst.x_grid.push_back(a.pos);
        inst.mu_weights.push_back(a.mass / mu.mass());
    }
    for (const auto& a : nu.atoms()) {
        inst.y_grid.push_back(a.pos);
        inst.nu_weights.push_back(a.mass / nu.mass());
    }
    inst.objective.resize(inst.x_grid.size());
    for (std::size_t i = 0; i < inst.x_grid.size(); ++i) {
        inst.objective[i].resize(inst.y_grid.size());
        for (std::size_t j = 0; j < inst.y_grid.size(); ++j)
            inst.objective[i][j] = c(inst.x_grid[i], inst.y_grid[j]);
    }
    return inst;
}

Coupling MotSolution::as_coupling(const LPInstance& inst) const {
    std::vector<Coupling::Link> links;
    for (std::size_t i = 0; i < inst.x_grid.size(); ++i) {
        std::vector<Measure::Atom> atoms;
        for (std::size_t j = 0; j < inst.y_grid.size(); ++j)
            if (plan[i][j] > kMassEps) atoms.push_back({inst.y_grid[j], plan[i][j]});
        if (!atoms.empty()) links.push_back({inst.x_grid[i], Measure(std::move(atoms), {})});
    }
    return Coupling(std::move(links));
}

MotSolution solve_mot(const LPInstance& inst) {
    const int nx = static_cast<int>(inst.x_grid.size());
    const int ny = static_cast<int>(inst.y_grid.size());
    if (nx > kLpMaxX || ny > kLpMaxY)
        throw SizeCap("solve_mot: grid exceeds " + std::to_string(kLpMaxX) + "x" +
                      std::to_string(kLpMaxY));
    if (nx == 0 || ny == 0) throw Infeasible("solve_mot: empty grid");

    {
        std::vector<Measure::Atom> ma, na;
        for (int i = 0; i < nx; ++i) ma.push_back({inst.x_grid[i], inst.mu_weights[i]});
        for (int j = 0; j < ny; ++j) na.push_back({inst.y_grid[j], inst.nu_weights[j]});
        if (!in_convex_order(leq_cx(Measure(std::move(ma), {}), Measure(std::move(na), {}), 1e-9)))
            throw Infeasible("solve_mot: marginals not in convex order");
    }

    // variables p_ij, column index i*ny + j. The last column-sum row is
    // implied by the others (masses both sum to 1) and the last martingale
    // row by the equal-means identity; dropping them keeps the system
    // full-rank so the simplex basis stays invertible.
    const int nvar = nx * ny;
    const int nrow = nx + (ny - 1) + (nx - 1) + (nx == 1 ? 1 : 0);
    std::vector<std::vector<double>> A(nrow, std::vector<double>(nvar, 0.0));
    std::vector<double> b(nrow, 0.0);
    std::vector<double> c(nvar, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) c[i * ny + j] = inst.objective[i][j];
    int r = 0;
    for (int i = 0; i < nx; ++i, ++r) {
        for (int j = 0; j < ny; ++j) A[r][i * ny + j] = 1.0;
        b[r] = inst.mu_weights[i];
    }
    for (int j = 0; j + 1 < ny; ++j, ++r) {
        for (int i = 0; i < nx; ++i) A[r][i * ny + j] = 1.0;
        b[r] = inst.nu_weights[j];
    }
    const int mart_rows = nx == 1 ? 1 : nx - 1;
    for (int i = 0; i < mart_rows; ++i, ++r) {
        for (int j = 0; j < ny; ++j) A[r][i * ny + j] = inst.y_grid[j] - inst.x_grid[i];
        b[r] = 0.0;
    }

    LpResult lp = simplex_solve(A, b, c);
    if (lp.status == LpStatus::Infeasible)
        throw Infeasible("solve_mot: LP infeasible");
    if (lp.status == LpStatus::Unbounded) throw Error("solve_mot: LP unbounded");

    MotSolution sol;
    sol.value = lp.objective;
    sol.plan.assign(nx, std::vector<double>(ny, 0.0));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) sol.plan[i][j] = lp.x[i * ny + j];
    sol.min_reduced_cost = lp.min_reduced_cost;
    sol.certified = lp.certified;
    return sol;
}

Measure solve_shadow_lp(const Measure& mu, const Measure& nu) {
    if (!mu.pieces().empty() || !nu.pieces().empty())
        throw Error("solve_shadow_lp: marginals must be purely atomic");
    const auto& ma = mu.atoms();
    const auto& na = nu.atoms();
    const int nx = static_cast<int>(ma.size());
    const int ny = static_cast<int>(na.size());
    if (nx + ny > kLpMaxX) throw SizeCap("solve_shadow_lp: more than 40 support points");
    if (!leq_E(mu, nu)) throw Infeasible("solve_shadow_lp: mu not <=_E nu");

    // variables: eta_j (ny), slack for eta_j <= nu_j (ny), surplus for each
    // call-dominance constraint (nk)
    std::vector<double> ks;
    for (const auto& a : ma) ks.push_back(a.pos);
    for (const auto& a : na) ks.push_back(a.pos);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    const int nk = static_cast<int>(ks.size());

    const int nvar = 2 * ny + nk;
    const int nrow = ny + 2 + nk;
    std::vector<std::vector<double>> A(nrow, std::vector<double>(nvar, 0.0));
    std::vector<double> b(nrow, 0.0);
    std::vector<double> c(nvar, 0.0);
    for (int j = 0; j < ny; ++j) c[j] = na[j].pos * na[j].pos;

    int r = 0;
    for (int j = 0; j < ny; ++j, ++r) {  // eta_j + s_j = nu_j
        A[r][j] = 1.0;
        A[r][ny + j] = 1.0;
        b[r] = na[j].mass;
    }
    for (int j = 0; j < ny; ++j) A[r][j] = 1.0;  // total mass
    b[r] = mu.mass();
    ++r;
    for (int j = 0; j < ny; ++j) A[r][j] = na[j].pos;  // first moment
    b[r] = mu.first_moment();
    ++r;
    for (int k = 0; k < nk; ++k, ++r) {  // sum (y_j - k)_+ eta_j - t_k = call_mu(k)
        for (int j = 0; j < ny; ++j) A[r][j] = std::max(0.0, na[j].pos - ks[k]);
        A[r][2 * ny + k] = -1.0;
        double rhs = 0.0;
        for (const auto& a : ma) rhs += a.mass * std::max(0.0, a.pos - ks[k]);
        b[r] = rhs;
    }

    LpResult lp = simplex_solve(A, b, c);
    if (lp.status != LpStatus::Optimal) throw Infeasible("solve_shadow_lp: LP infeasible");
    std::vector<Measure::Atom> atoms;
    for (int j = 0; j < ny; ++j)
        if (lp.x[j] > kMassEps) atoms.push_back({na[j].pos, lp.x[j]});
    return Measure(std::move(atoms), {});
}

QuantileCells quantile_cells(const Measure& nu, int n) {
    if (nu.has_atoms()) throw AtomicInput("quantile_cells: measure must be atomless");
    QuantileCells out;
    double m = nu.mass();
    double prev = nu.min_support();
    for (int j = 1; j <= n; ++j) {
        double edge = j == n ? nu.max_support() : nu.quantile(m * j / n);
        Measure cell = restrict(nu, {prev, edge});
        out.barycenters.push_back(cell.barycenter());
        out.cells.push_back(std::move(cell));
        prev = edge;
    }
    return out;
}

std::vector<GapRow> value_gap(const Measure& mu, const Measure& nu,
                              const std::function<double(double, double)>& c,
                              const std::vector<double>& eps_list, int y_resolution,
                              int builder_resolution) {
    if (!mu.pieces().empty()) throw Error("value_gap: mu must be discrete");
    if (nu.has_atoms()) throw AtomicInput("value_gap: nu must be atomless");
    if (static_cast<int>(mu.atoms().size()) > kLpMaxX)
        throw SizeCap("value_gap: mu exceeds the LP grid cap");
    y_resolution = std::min(y_resolution, kLpMaxY);

    QuantileCells cells = quantile_cells(nu, y_resolution);
    std::vector<Measure::Atom> ny_atoms;
    for (int j = 0; j < y_resolution; ++j)
        ny_atoms.push_back({cells.barycenters[j], cells.cells[j].mass()});
    Measure nu_grid(std::move(ny_atoms), {});

    LPInstance inst = LPInstance::from_measures(mu, nu_grid, c);
    MotSolution sol = solve_mot(inst);
    double lp_value = sol.value * mu.mass();  // weights were normalized

    // lift the LP plan back onto nu's pieces: p_ij spreads over cell j
    std::vector<Coupling::Link> lifted;
    for (std::size_t i = 0; i < inst.x_grid.size(); ++i) {
        std::vector<Measure> parts;
        for (int j = 0; j < y_resolution; ++j) {
            double p = sol.plan[i][j] * mu.mass();
            if (p > kMassEps) parts.push_back(scale(cells.cells[j], p / cells.cells[j].mass()));
        }
        if (!parts.empty()) lifted.push_back({inst.x_grid[i], add_many(parts)});
    }
    Coupling lifted_plan(std::move(lifted));

    auto [bar, trace] = barcode(mu, nu, builder_resolution);
    (void)trace;
    double barcode_cost = cost(bar, c);

    std::vector<GapRow> rows;
    for (double eps : eps_list) {
        Coupling approx = monge_approximate(lifted_plan, eps);
        double mmt_value = std::min(barcode_cost, cost(approx, c));
        rows.push_back({eps, mmt_value, lp_value});
    }
    return rows;
}

}  // namespace mmt
