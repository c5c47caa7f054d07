// Energy-momentum tensor machinery: bulk terms K^V, modified currents,
// fluxes through t*-slices and the horizon, and the weighted energies used by
// the decay diagnostics.  Normalization: K^V = T_{mu nu} (nabla^mu V)^nu.

#ifndef HORIZONLAB_CURRENTS_HPP
#define HORIZONLAB_CURRENTS_HPP

#include "horizonlab/evolution.hpp"
#include "horizonlab/geometry.hpp"
#include "horizonlab/multipliers.hpp"

#include <array>
#include <string>
#include <vector>

namespace horizonlab {

// Quadratic form of the 1-jet at a radius, in either the (v,r) or (t,r*)
// chart (a, b) = (d_v, d_r) or (d_t, d_r*).  C_cross_b0 and C_00 appear only
// for modified currents.
struct QuadraticForm {
    Chart chart = Chart::v_r;
    double C_aa = 0.0;      // (d_a psi)^2
    double C_bb = 0.0;      // (d_b psi)^2
    double C_ab = 0.0;      // d_a psi d_b psi
    double C_ang = 0.0;     // |slash-grad psi|^2
    double C_a0 = 0.0;      // psi d_a psi (cutoff-slope terms)
    double C_b0 = 0.0;      // psi d_b psi (second-kind modification)
    double C_00 = 0.0;      // psi^2 (modified currents)

    // eigenvalues of the symmetric 2x2 (d_a, d_b) block
    std::pair<double, double> block_eigenvalues() const;
    // smallest eigenvalue of the full 3x3 (d_a, d_b, psi) block
    double min_eigenvalue_3x3() const;
    // contract with a mode-l jet (value, d_a, d_b) at radius r
    double contract(double psi, double da, double db, double r, int l) const;
};

// K^V(psi) for the named multiplier, including its modification:
//   none:          plain K^V
//   redshift_mod:  K^{V,h} = K^V + h grad psi . grad psi          ((v,r) chart)
//   first_kind:    K^{X,1} = K^X + 2G grad.grad - (Box G) psi^2   ((t,r*) chart)
//   second_kind:   K^{X,2} = K^{X,1} + Div((f'/D) beta psi^2 d_r*)
QuadraticForm bulk_form(const BlackHoleBackground& bg, const MultiplierField& V,
                        double r, int l);

// Div(w psi grad psi) for a radial weight w (the Lagrangian current)
QuadraticForm lagrangian_bulk(const BlackHoleBackground& bg,
                              const std::function<double(double)>& w,
                              const std::function<double(double)>& dw_dr, double r);

// The ten coefficients of nabla^mu J^L_mu(d_r psi) for the commuted multiplier
// (K^L plus the commutator source), ordered as H1..H10.
std::array<double, 10> commuted_bulk_coefficients(const BlackHoleBackground& bg,
                                                  const MultiplierField& L, double r);

struct PositivityReport {
    std::string multiplier;
    double r_min = 0.0, r_max = 0.0;
    int samples = 0;
    double min_eigenvalue = 0.0;
    double witness_r = 0.0;
    double min_c_ang = 0.0;
    bool angular_nonnegative = true;
    std::vector<std::pair<double, std::pair<double, double>>> samples_out; // r -> eigs
};

PositivityReport positivity_scan(const BlackHoleBackground& bg, const MultiplierField& V,
                                 double r_min, double r_max, int samples, int l = 1,
                                 bool record_samples = false);

// J^V_mu n^mu against the t*-slice normal, two algebraically independent
// routes: the direct T contraction and the GENERALT square decomposition.
double flux_density_direct(const BlackHoleBackground& bg, const MultiplierField& V,
                           double r, int l, double psi, double dv_psi, double dr_psi);
double flux_density_generalt(const BlackHoleBackground& bg, const MultiplierField& V,
                             double r, int l, double psi, double dv_psi, double dr_psi);

struct FluxReport {
    std::string multiplier;
    double tstar = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double value = 0.0;
    std::vector<std::pair<double, double>> integrand; // (r, density) samples
};

// Flux of J^V through the slice segment [r_lo, r_hi] at the field's time.
// (v,r)-chart derivatives are reconstructed from the slice state.
FluxReport flux_through_slice(const BlackHoleBackground& bg, const RadialGrid& grid,
                              const MultiplierField& V, const ModeField& field,
                              double r_lo, double r_hi, bool keep_integrand = false);

// int (d_v psi)^2 M^2 dv over a horizon trace segment (per-mode normalization)
double horizon_flux_T(const std::vector<double>& times, const std::vector<double>& dv_psi,
                      double mass, double v1, double v2);

// int r^{p-2} (d_v phi)^2 over the far slice segment, phi = r psi, d_v in the
// (u,v) chart; requires p < 3.
double rweighted_energy(const BlackHoleBackground& bg, const RadialGrid& grid,
                        const ModeField& field, double p, double r_lo, double r_hi);

// int_{Sigma cap [r_plus, r0]} (d_v d_r^k psi)^2 + (d_r^{k+1} psi)^2
//                              + |slash-grad d_r^k psi|^2   ((v,r)-chart d_r)
double higher_order_energy(const BlackHoleBackground& bg, const RadialGrid& grid,
                           const ModeField& field, double r0, int k);

// ModeField of the transversal derivative chi = d_r|_v psi, built from the
// slice jet (used to feed d_r psi into the flux machinery).
ModeField derived_transversal_field(const BlackHoleBackground& bg, const RadialGrid& grid,
                                    const ModeField& field);

} // namespace horizonlab

#endif
