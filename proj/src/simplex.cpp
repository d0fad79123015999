#include "mmt/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "mmt/errors.hpp"

namespace mmt {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

struct Tableau {
    int m, n;                             // rows, structural+artificial columns
    std::vector<std::vector<double>> t;   // m rows of n+1 (rhs last)
    std::vector<double> obj;              // n+1, reduced-cost row
    std::vector<int> basis;               // size m

    void pivot(int pr, int pc) {
        double piv = t[pr][pc];
        for (int j = 0; j <= n; ++j) t[pr][j] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == pr) continue;
            double f = t[i][pc];
            if (f == 0.0) continue;
            for (int j = 0; j <= n; ++j) t[i][j] -= f * t[pr][j];
        }
        double f = obj[pc];
        if (f != 0.0)
            for (int j = 0; j <= n; ++j) obj[j] -= f * t[pr][j];
        basis[pr] = pc;
    }

    // Entering: most negative reduced cost (Dantzig); after a run of
    // degenerate pivots, Bland's lowest-index rule until progress resumes.
    // Leaving: lexicographic ratio test over (rhs, B^-1) -- the artificial
    // columns hold B^-1, so the lex rows are already in the tableau. The lex
    // minimum is unique, which rules out cycling under any entering rule.
    int degenerate_streak = 0;
    int art0 = 0;  // first artificial column

    // lexicographic comparison of row a / t[a][pc] vs row b / t[b][pc]
    bool lex_less(int a, int b, int pc) const {
        double fa = t[a][pc], fb = t[b][pc];
        double ra = t[a][n] / fa, rb = t[b][n] / fb;
        if (ra != rb) return ra < rb;
        for (int j = art0; j < n; ++j) {
            double va = t[a][j] / fa, vb = t[b][j] / fb;
            if (va != vb) return va < vb;
        }
        return false;
    }

    bool step(int limit_cols) {
        int pc = -1;
        if (degenerate_streak < 32) {
            double most = -kPivotTol;
            for (int j = 0; j < limit_cols; ++j)
                if (obj[j] < most) {
                    most = obj[j];
                    pc = j;
                }
        } else {
            for (int j = 0; j < limit_cols; ++j)
                if (obj[j] < -kPivotTol) {
                    pc = j;
                    break;
                }
        }
        if (pc < 0) return false;
        int pr = -1;
        for (int i = 0; i < m; ++i) {
            if (t[i][pc] <= kPivotTol) continue;
            if (pr < 0 || lex_less(i, pr, pc)) pr = i;
        }
        if (pr < 0) throw Error("simplex: unbounded column");
        degenerate_streak = t[pr][n] / t[pr][pc] <= kPivotTol ? degenerate_streak + 1 : 0;
        pivot(pr, pc);
        return true;
    }
};

}  // namespace

LpResult simplex_solve(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<double>& c) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    Tableau tb;
    tb.m = m;
    tb.n = n + m;  // structural + artificial
    tb.art0 = n;
    tb.t.assign(m, std::vector<double>(tb.n + 1, 0.0));
    tb.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        double s = b[i] >= 0.0 ? 1.0 : -1.0;
        for (int j = 0; j < n; ++j) tb.t[i][j] = s * A[i][j];
        tb.t[i][n + i] = 1.0;
        tb.t[i][tb.n] = s * b[i];
        tb.basis[i] = n + i;
    }

    // Phase I: minimize the sum of artificials.
    tb.obj.assign(tb.n + 1, 0.0);
    for (int j = n; j < tb.n; ++j) tb.obj[j] = 1.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= tb.n; ++j) tb.obj[j] -= tb.t[i][j];
    while (tb.step(tb.n)) {
    }
    double art = -tb.obj[tb.n];
    LpResult res;
    if (art > kFeasTol) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive any residual artificials out of the basis.
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        int pc = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tb.t[i][j]) > kPivotTol) {
                pc = j;
                break;
            }
        if (pc >= 0) tb.pivot(i, pc);
        // else: redundant row, harmless to leave the artificial at zero
    }

    // Phase II.
    tb.obj.assign(tb.n + 1, 0.0);
    for (int j = 0; j < n; ++j) tb.obj[j] = c[j];
    for (int i = 0; i < m; ++i) {
        double cb = tb.basis[i] < n ? c[tb.basis[i]] : 0.0;
        if (cb != 0.0)
            for (int j = 0; j <= tb.n; ++j) tb.obj[j] -= cb * tb.t[i][j];
    }
    // Forbid re-entering artificial columns.
    tb.degenerate_streak = 0;
    while (true) {
        bool moved;
        try {
            moved = tb.step(n);
        } catch (const Error&) {
            res.status = LpStatus::Unbounded;
            return res;
        }
        if (!moved) break;
    }

    res.status = LpStatus::Optimal;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.t[i][tb.n];
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += c[j] * res.x[j];
    res.objective = obj;
    res.basis = tb.basis;

    // Independent certificate: solve B^T y = c_B by Gaussian elimination on
    // the original columns, then check c - A^T y >= 0 up to tolerance.
    {
        // (B^T)[k][i] = A[i][basis[k]]; artificial k is sign(b_k) * e_k.
        std::vector<std::vector<double>> sys(m, std::vector<double>(m + 1, 0.0));
        for (int k = 0; k < m; ++k) {
            int col = tb.basis[k];
            for (int i = 0; i < m; ++i)
                sys[k][i] = col < n ? A[i][col] : ((col - n) == i ? (b[i] >= 0.0 ? 1.0 : -1.0) : 0.0);
            sys[k][m] = col < n ? c[col] : 0.0;
        }
        double scale = 1e-300;
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(sys[k][i]));
        // Gauss-Jordan with row pivoting; rank-deficient directions get a
        // zero dual (any consistent candidate works, the reduced-cost check
        // below is the actual certificate).
        std::vector<int> pivot_row(m, -1);
        int row = 0;
        for (int col = 0; col < m; ++col) {
            int piv = -1;
            double best = 0.0;
            for (int r = row; r < m; ++r)
                if (std::abs(sys[r][col]) > best) {
                    best = std::abs(sys[r][col]);
                    piv = r;
                }
            if (piv < 0 || best < 1e-12 * scale) continue;
            std::swap(sys[row], sys[piv]);
            for (int r = 0; r < m; ++r) {
                if (r == row) continue;
                double f = sys[r][col] / sys[row][col];
                if (f == 0.0) continue;
                for (int j = 0; j <= m; ++j) sys[r][j] -= f * sys[row][j];
            }
            pivot_row[col] = row;
            ++row;
        }
        res.duals.assign(m, 0.0);
        for (int col = 0; col < m; ++col)
            if (pivot_row[col] >= 0)
                res.duals[col] = sys[pivot_row[col]][m] / sys[pivot_row[col]][col];
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            double rc = c[j];
            for (int i = 0; i < m; ++i) rc -= res.duals[i] * A[i][j];
            worst = std::min(worst, rc);
        }
        res.min_reduced_cost = worst;
        res.certified = worst >= -1e-10 * (1.0 + std::abs(obj));
    }
    return res;
}

}  // namespace mmt
