// Horizon-penetrating evolution of one angular mode on r in [r_plus, r_max],
// marching in t* = v - r.  First-order reduction (psi, Phi = d_r psi,
// Pi = d_t* psi); the principal part is advected in characteristic variables
//     w_in  = c Phi + Pi   (coordinate speed -1, exits through the horizon)
//     w_out = Phi - Pi     (coordinate speed D/(2-D), zero on the horizon)
// with c = D/(2-D), so no boundary condition is needed at r = r_plus.

#ifndef HORIZONLAB_EVOLUTION_HPP
#define HORIZONLAB_EVOLUTION_HPP

#include "horizonlab/geometry.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace horizonlab {

struct RadialGrid {
    double r_min = 1.0; // always r_plus
    double r_max = 0.0;
    int n_points = 0;
    double h = 0.0;

    static RadialGrid make(const BlackHoleBackground& bg, double r_max, int n_points);
    double r(int i) const { return r_min + h * i; }
    int index_at(double r) const; // nearest node
};

struct ModeField {
    int l = 0;
    double time = 0.0;
    std::vector<double> psi;
    std::vector<double> pi;     // d_t* psi
    std::vector<double> phi_r;  // d_r psi at fixed t*
};

struct InitialDataSpec {
    enum class Kind { gaussian_bump, constant, custom } kind = Kind::gaussian_bump;
    double center = 1.5;
    double width = 0.25;
    double amplitude = 1.0;
    // bump support is truncated at |r - center| > support_sigmas * width so the
    // far grid holds exact zeros (the causal buffer relies on this)
    double support_sigmas = 10.0;
    std::vector<double> custom_psi; // Kind::custom
    std::vector<double> custom_pi;
};

ModeField make_initial_data(const BlackHoleBackground& bg, const RadialGrid& grid,
                            const InitialDataSpec& spec, int l);

enum class OuterBoundary { causal_buffer, sommerfeld };

struct EvolutionConfig {
    double cfl = 0.5;
    double t_final = 0.0;
    double output_cadence = 1.0;
    int spatial_order = 2;        // 2 or 4
    OuterBoundary outer_boundary = OuterBoundary::causal_buffer;
    bool dissipation = false;     // optional Kreiss-Oliger term for stress tests
    double dissipation_eps = 0.02;
};

// One RK4 step of size dt = cfl * h / c_max (c_max = 1 in these coordinates).
// Throws std::runtime_error naming the step if a non-finite value appears.
ModeField step(const BlackHoleBackground& bg, const RadialGrid& grid,
               const ModeField& field, const EvolutionConfig& config);

// Transversal (v,r)-chart derivatives d_r^k|_v psi on a t*-slice, reconstructed
// from the slice jet of (psi, Pi) by expanding (d_r|t* - d_t*)^k and replacing
// every time derivative through the evolution equations.  The background
// coefficient expansions are exact Taylor jets, not finite differences.
class TransversalJetCalculator {
  public:
    TransversalJetCalculator(const BlackHoleBackground& bg, double r0, int l, int kmax);
    // dpsi[j] = d_r^j psi, dpi[j] = d_r^j Pi on the slice at r0 (j <= kmax+2)
    double transversal(const std::vector<double>& dpsi, const std::vector<double>& dpi,
                       int k) const;
    // d_v of the order-k transversal derivative at the same point
    double transversal_dv(const std::vector<double>& dpsi, const std::vector<double>& dpi,
                          int k) const;
    int kmax() const { return kmax_; }

  private:
    int l_, kmax_;
    std::vector<std::vector<double>> c_; // derivative tables of the 5 RHS coefficients
    double mixed(const std::vector<double>& dpsi, const std::vector<double>& dpi,
                 int i, int j, std::vector<std::vector<double>>& memo,
                 std::vector<std::vector<char>>& have) const;
};

// One-sided / interior finite-difference derivatives d_r^j f (j <= jmax) at
// node i0, stencil width chosen for >= 2nd-order accuracy at the top order.
std::vector<double> radial_derivatives(const std::vector<double>& f, const RadialGrid& grid,
                                       int i0, int jmax, int extra_width = 2);

struct HorizonSample {
    double tstar;
    double psi;
    std::vector<double> dr; // d_r^k|_v psi at r = r_plus, k = 1 .. kmax
    double h_l;             // H_l for extreme runs, pseudo-H_0 otherwise
};

struct EvolutionResult {
    std::vector<ModeField> snapshots;       // at the output cadence
    std::vector<HorizonSample> trace;       // per step
    // discrete T-energy balance bookkeeping (per-step accumulation)
    std::vector<double> balance_times;
    std::vector<double> slice_energy;       // E(t*) over the full grid
    std::vector<double> horizon_flux_cum;   // int_0^t M^2 (d_v psi)^2 dt*
    std::vector<double> outer_flux_cum;     // energy through r = r_max
    int steps_taken = 0;
};

using SnapshotCallback = std::function<void(const ModeField&)>;

EvolutionResult evolve(const BlackHoleBackground& bg, const RadialGrid& grid,
                       const InitialDataSpec& initial, int l, const EvolutionConfig& config,
                       int trace_kmax = -1 /* default l + 2 */,
                       const SnapshotCallback& on_snapshot = nullptr,
                       bool keep_snapshots = true);

// Pointwise (v,r)-chart residual of the reduced equation, evaluated from three
// consecutive snapshots (time derivatives by central differencing, so the
// check is independent of the stepping path).
std::vector<double> reduced_equation_residual(const BlackHoleBackground& bg,
                                              const RadialGrid& grid,
                                              const ModeField& prev,
                                              const ModeField& mid,
                                              const ModeField& next);

struct ConvergenceReport {
    std::string diagnostic;
    std::vector<double> values;   // coarse, medium, fine
    double observed_order;
    bool monotone;
};

std::vector<ConvergenceReport> convergence_study(const BlackHoleBackground& bg,
                                                 double r_max, int n_points_base,
                                                 const InitialDataSpec& initial, int l,
                                                 const EvolutionConfig& config,
                                                 int refinements = 2);

} // namespace horizonlab

#endif
