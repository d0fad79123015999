#pragma once

#include <vector>

#include "mmt/measure.hpp"

namespace mmt {

// Potential function u_mu(x) = integral of |y - x| d mu(y): convex, Lipschitz
// with constant mass(mu), piecewise quadratic with kinks exactly at atoms and
// curvature exactly on density pieces, affine tails u(x) ~ |x*mass - m1|.
class Potential {
public:
    struct Quad {
        double a, b, c;  // a*x^2 + b*x + c
        double eval(double x) const { return (a * x + b) * x + c; }
    };

    static Potential of(const Measure& m);

    double operator()(double x) const;
    const std::vector<double>& breakpoints() const { return brk_; }
    // segment(i) is valid on [brk[i-1], brk[i]]; segment(0) and
    // segment(brk.size()) are the affine tails.
    const Quad& segment(std::size_t i) const { return seg_[i]; }
    std::size_t segment_count() const { return seg_.size(); }
    double mass() const { return mass_; }
    double first_moment() const { return m1_; }

private:
    std::vector<double> brk_;
    std::vector<Quad> seg_;
    double mass_ = 0.0, m1_ = 0.0;
};

inline constexpr double kOrderTol = 1e-9;

enum class Cx { False, True, Boundary };

// Convex-order test via potential domination. True when masses and
// barycenters agree within tol and u_nu - u_mu >= -tol everywhere; Boundary
// when, in addition, the difference touches [-tol, tol] strictly inside the
// combined support hull while being positive elsewhere (the pinch case that
// irreducibility and uniqueness must treat explicitly). Identical potentials
// report True.
Cx leq_cx(const Measure& mu, const Measure& nu, double tol = kOrderTol);

inline bool in_convex_order(Cx v) { return v != Cx::False; }

// Extended order: integral of phi d mu <= integral of phi d nu for every
// nonnegative convex phi. Checked as u_nu - u_mu >= |G| - tol where
// G(k) = (m1_nu - m1_mu) - k*(mass_nu - mass_mu), which is equivalent to
// call/put dominance at every strike.
bool leq_E(const Measure& mu, const Measure& nu, double tol = kOrderTol);

// Same check, reporting the strike with the worst call/put deficit.
struct OrderDiagnostic {
    bool ok = true;
    double worst_point = 0.0;
    double deficit = 0.0;  // most negative margin found
};
OrderDiagnostic leq_E_diagnose(const Measure& mu, const Measure& nu, double tol = kOrderTol);

struct IrreducibleComponent {
    Interval interval;
    Measure mu_part;
    Measure nu_part;
};

// Maximal open intervals where u_mu < u_nu, each with the marginal
// restrictions. Requires mu, nu in convex order and no atoms at component
// endpoints.
std::vector<IrreducibleComponent> irreducible_components(const Measure& mu, const Measure& nu,
                                                         double tol = kOrderTol);

}  // namespace mmt
