// Vector-field multipliers for the energy-current diagnostics.  Each
// multiplier is V = f_v(r) d_v + f_r(r) d_r in the (v,r) chart; the X-family
// is specified as f(r*) d_{r*} and converted on evaluation.  Cutoff blends are
// C^2 quintic Hermite segments on the stated intervals.

#ifndef HORIZONLAB_MULTIPLIERS_HPP
#define HORIZONLAB_MULTIPLIERS_HPP

#include "horizonlab/geometry.hpp"

#include <functional>
#include <string>

namespace horizonlab {

enum class MultiplierName { T, N, P, X_alpha, X_d, X_0, L_k };

enum class ModificationKind { none, first_kind, second_kind, redshift_mod };

struct Modification {
    ModificationKind kind = ModificationKind::none;
    double h = 0.0;      // redshift_mod: the constant zeroth-order weight (-1/2)
    double alpha = 0.0;  // second_kind: the X^alpha parameter
};

struct MultiplierField {
    MultiplierName name;
    std::string label;
    Modification modification;
    double valid_rmin = 0.0;
    double valid_rmax = 0.0;
    double param = 0.0; // alpha for X_alpha, k for L_k

    // components in the (v,r) chart with analytic first derivatives
    std::function<double(double)> f_v, f_r, df_v, df_r;
    // X-family: f as a function of r (derivatives w.r.t. r* handled by chart rules)
    std::function<double(double)> f_of_r, df_of_r, d2f_of_r, d3f_of_r;
    bool is_x_family = false;

    // g(V,V) = -D f_v^2 + 2 f_v f_r  (causal iff <= 0)
    double norm_squared(const BlackHoleBackground& bg, double r) const;
};

// T = d_v everywhere.
MultiplierField multiplier_T();
// N per the redshift construction: (f_v, f_r) = (16r, -(3/2)r + M) on
// [M, 9M/8], C^2-blended to (1, 0) by 8M/7.  The "N_mod" variant carries the
// zeroth-order modification h = -1/2 with the cutoff delta.
MultiplierField multiplier_N(const BlackHoleBackground& bg, bool modified);
// P: f_r = -sqrt(D) on [M, 9M/8] with f_v = 1 + 6(r - M)/M, blended to (1, 0).
MultiplierField multiplier_P(const BlackHoleBackground& bg);
// X^0 = -r^-3 d_{r*}.
MultiplierField multiplier_X0(const BlackHoleBackground& bg);
// X^d = f^d d_{r*} with (f^d)' = 1/((r*)^2 + 1), f^d(r* = 0) = 0.
MultiplierField multiplier_Xd(const BlackHoleBackground& bg);
// X^alpha = f^alpha d_{r*} with (f^alpha)' = 1/(alpha^2 + x^2),
// x = r* - alpha - sqrt(alpha), f^alpha(r = 2M) = 0.
MultiplierField multiplier_Xalpha(const BlackHoleBackground& bg, double alpha);
// L (the d_r-commutation multiplier): supported on [M, 5M/4], timelike inside.
MultiplierField multiplier_L(const BlackHoleBackground& bg);

MultiplierField multiplier_by_name(const BlackHoleBackground& bg, const std::string& name);

// Smooth C^2 cutoff: 1 on [.., a], 0 on [b, ..) (quintic smoothstep between).
double cutoff_c2(double r, double a, double b);
double cutoff_c2_deriv(double r, double a, double b);

// The Lagrangian-current weights of the X machinery: f = D^{3/2}/r^3 and the
// piecewise h^d (negative, vanishing to second order at the photon sphere,
// equal to -1/((r*)^2+1) near the horizon and -1/r^2 far out).
double lagrangian_weight_f(const BlackHoleBackground& bg, double r);
double lagrangian_weight_hd(const BlackHoleBackground& bg, double r);

} // namespace horizonlab

#endif
