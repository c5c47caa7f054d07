#include "horizonlab/evolution.hpp"
#include "horizonlab/horizon_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horizonlab {

RadialGrid RadialGrid::make(const BlackHoleBackground& bg, double r_max, int n_points) {
    if (n_points < 16) throw std::invalid_argument("RadialGrid: n_points must be >= 16");
    if (!(r_max > photon_sphere(bg)))
        throw std::invalid_argument("RadialGrid: r_max must exceed the photon sphere");
    RadialGrid g;
    g.r_min = bg.r_plus;
    g.r_max = r_max;
    g.n_points = n_points;
    g.h = (r_max - bg.r_plus) / (n_points - 1);
    return g;
}

int RadialGrid::index_at(double r) const {
    int i = static_cast<int>(std::lround((r - r_min) / h));
    return std::clamp(i, 0, n_points - 1);
}

ModeField make_initial_data(const BlackHoleBackground& bg, const RadialGrid& grid,
                            const InitialDataSpec& spec, int l) {
    (void)bg;
    ModeField f;
    f.l = l;
    f.time = 0.0;
    const int n = grid.n_points;
    f.psi.assign(n, 0.0);
    f.pi.assign(n, 0.0);
    f.phi_r.assign(n, 0.0);
    switch (spec.kind) {
        case InitialDataSpec::Kind::gaussian_bump: {
            const double rc = spec.center, s = spec.width, A = spec.amplitude;
            for (int i = 0; i < n; ++i) {
                const double r = grid.r(i);
                if (std::abs(r - rc) > spec.support_sigmas * s) continue;
                const double g = A * std::exp(-(r - rc) * (r - rc) / (2.0 * s * s));
                f.psi[i] = g;
                f.phi_r[i] = -(r - rc) / (s * s) * g;
            }
            break;
        }
        case InitialDataSpec::Kind::constant:
            std::fill(f.psi.begin(), f.psi.end(), spec.amplitude);
            break;
        case InitialDataSpec::Kind::custom: {
            if (static_cast<int>(spec.custom_psi.size()) != n)
                throw std::invalid_argument("custom initial data size mismatch");
            f.psi = spec.custom_psi;
            if (!spec.custom_pi.empty()) {
                if (static_cast<int>(spec.custom_pi.size()) != n)
                    throw std::invalid_argument("custom pi size mismatch");
                f.pi = spec.custom_pi;
            }
            // phi_r by centered differences (compatible to truncation order)
            for (int i = 1; i + 1 < n; ++i)
                f.phi_r[i] = (f.psi[i + 1] - f.psi[i - 1]) / (2.0 * grid.h);
            f.phi_r[0] = (f.psi[1] - f.psi[0]) / grid.h;
            f.phi_r[n - 1] = (f.psi[n - 1] - f.psi[n - 2]) / grid.h;
            break;
        }
    }
    return f;
}

namespace {

struct SchemeTables {
    // per-node background coefficients
    std::vector<double> D, Dp, R, c, cp; // c = D/(2-D), cp = dc/dr
    std::vector<double> low_phi, low_pi_a, low_pi_b, low_psi; // lower-order RHS pieces
    int l = 0;

    SchemeTables(const BlackHoleBackground& bg, const RadialGrid& grid, int l_) {
        const int n = grid.n_points;
        l = l_;
        D.resize(n); Dp.resize(n); R.resize(n); c.resize(n); cp.resize(n);
        low_phi.resize(n); low_pi_a.resize(n); low_pi_b.resize(n); low_psi.resize(n);
        for (int i = 0; i < n; ++i) {
            const double r = grid.r(i);
            D[i] = metric_potential(bg, r, 0);
            Dp[i] = metric_potential(bg, r, 1);
            R[i] = Dp[i] + 2.0 * D[i] / r;
            c[i] = D[i] / (2.0 - D[i]);
            cp[i] = 2.0 * Dp[i] / ((2.0 - D[i]) * (2.0 - D[i]));
            const double w = 2.0 - D[i];
            low_phi[i] = R[i] / w;
            low_pi_a[i] = (2.0 / r - R[i]) / w;
            low_psi[i] = -static_cast<double>(l) * (l + 1) / (r * r) / w;
        }
    }
};

// biased first derivatives: forward uses nodes {i, i+1, i+2}, backward {i-2, i-1, i}
void deriv_forward(const std::vector<double>& f, double h, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    for (int i = 0; i + 2 < n; ++i)
        d[i] = (-3.0 * f[i] + 4.0 * f[i + 1] - f[i + 2]) / (2.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
}

void deriv_backward(const std::vector<double>& f, double h, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    for (int i = 2; i < n; ++i)
        d[i] = (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    d[0] = (f[1] - f[0]) / h;
}

// 4th-order upwind-biased variants (5-point stencils, shifted one node against
// the wind); boundary rows fall back to the widest available bias.
void deriv_forward4(const std::vector<double>& f, double h, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    for (int i = 1; i + 3 < n; ++i)
        d[i] = (-3.0 * f[i - 1] - 10.0 * f[i] + 18.0 * f[i + 1] - 6.0 * f[i + 2] + f[i + 3]) / (12.0 * h);
    if (n >= 5)
        d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[n - 3] = (f[n - 2] - f[n - 4]) / (2.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
}

void deriv_backward4(const std::vector<double>& f, double h, std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    for (int i = 3; i + 1 < n; ++i)
        d[i] = (3.0 * f[i + 1] + 10.0 * f[i] - 18.0 * f[i - 1] + 6.0 * f[i - 2] - f[i - 3]) / (12.0 * h);
    if (n >= 5)
        d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    d[2] = (f[3] - f[1]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    d[0] = (f[1] - f[0]) / h;
}

struct Workspace {
    std::vector<double> win, wout, dwin, dwout;
    explicit Workspace(int n) {
        for (auto* v : {&win, &wout, &dwin, &dwout}) v->assign(n, 0.0);
    }
};

void rhs(const SchemeTables& tb, const RadialGrid& grid, const EvolutionConfig& cfg,
         const std::vector<double>& psi, const std::vector<double>& phi,
         const std::vector<double>& pi, Workspace& ws,
         std::vector<double>& out_psi, std::vector<double>& out_phi,
         std::vector<double>& out_pi) {
    const int n = grid.n_points;
    const double h = grid.h;
    for (int i = 0; i < n; ++i) {
        ws.win[i] = tb.c[i] * phi[i] + pi[i];
        ws.wout[i] = phi[i] - pi[i];
    }
    if (cfg.spatial_order == 4) {
        deriv_forward4(ws.win, h, ws.dwin);
        deriv_backward4(ws.wout, h, ws.dwout);
    } else {
        deriv_forward(ws.win, h, ws.dwin);
        deriv_backward(ws.wout, h, ws.dwout);
    }
    for (int i = 0; i < n; ++i) {
        // principal part A d_r U recombined from the characteristic derivatives
        const double a1 = ws.dwin[i] - tb.cp[i] * phi[i]; // speed +1 branch (w_in)
        const double a2 = -tb.c[i] * ws.dwout[i];         // speed -c branch (w_out)
        const double inv = 1.0 / (1.0 + tb.c[i]);
        out_psi[i] = pi[i];
        out_phi[i] = (a1 + a2) * inv;
        out_pi[i] = (a1 - tb.c[i] * a2) * inv + tb.low_phi[i] * phi[i] +
                    tb.low_pi_a[i] * pi[i] + tb.low_psi[i] * psi[i];
    }
    if (cfg.dissipation) {
        // 4th-difference Kreiss-Oliger term, interior nodes only
        const double s = -cfg.dissipation_eps / (16.0 * h);
        auto apply = [&](const std::vector<double>& f, std::vector<double>& o) {
            for (int i = 2; i + 2 < n; ++i)
                o[i] += s * (f[i - 2] - 4.0 * f[i - 1] + 6.0 * f[i] - 4.0 * f[i + 1] + f[i + 2]);
        };
        apply(psi, out_psi);
        apply(phi, out_phi);
        apply(pi, out_pi);
    }
    if (cfg.outer_boundary == OuterBoundary::sommerfeld) {
        // outgoing condition on phi = r psi at the last node:
        //   Pi -> -v_out (psi/r + Phi), advanced consistently
        const int i = n - 1;
        const double r = grid.r(i);
        const double vout = tb.c[i];
        out_pi[i] = -vout * (pi[i] / r + out_phi[i]); // d/dt of  Pi = -v_out(psi/r + Phi)
    }
}

} // namespace

ModeField step(const BlackHoleBackground& bg, const RadialGrid& grid,
               const ModeField& field, const EvolutionConfig& config) {
    SchemeTables tb(bg, grid, field.l);
    Workspace ws(grid.n_points);
    const double dt = config.cfl * grid.h;
    ModeField out = field;
    const int n = grid.n_points;
    std::vector<double> k1p(n), k1f(n), k1q(n), k2p(n), k2f(n), k2q(n),
        k3p(n), k3f(n), k3q(n), k4p(n), k4f(n), k4q(n), tp(n), tf(n), tq(n);
    auto axpy = [&](const std::vector<double>& base, const std::vector<double>& k,
                    double a, std::vector<double>& out_v) {
        for (int i = 0; i < n; ++i) out_v[i] = base[i] + a * k[i];
    };
    rhs(tb, grid, config, field.psi, field.phi_r, field.pi, ws, k1p, k1f, k1q);
    axpy(field.psi, k1p, dt / 2, tp); axpy(field.phi_r, k1f, dt / 2, tf); axpy(field.pi, k1q, dt / 2, tq);
    rhs(tb, grid, config, tp, tf, tq, ws, k2p, k2f, k2q);
    axpy(field.psi, k2p, dt / 2, tp); axpy(field.phi_r, k2f, dt / 2, tf); axpy(field.pi, k2q, dt / 2, tq);
    rhs(tb, grid, config, tp, tf, tq, ws, k3p, k3f, k3q);
    axpy(field.psi, k3p, dt, tp); axpy(field.phi_r, k3f, dt, tf); axpy(field.pi, k3q, dt, tq);
    rhs(tb, grid, config, tp, tf, tq, ws, k4p, k4f, k4q);
    for (int i = 0; i < n; ++i) {
        out.psi[i] = field.psi[i] + dt / 6 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]);
        out.phi_r[i] = field.phi_r[i] + dt / 6 * (k1f[i] + 2 * k2f[i] + 2 * k3f[i] + k4f[i]);
        out.pi[i] = field.pi[i] + dt / 6 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]);
    }
    out.time = field.time + dt;
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(out.psi[i]) || !std::isfinite(out.pi[i]) || !std::isfinite(out.phi_r[i]))
            throw std::runtime_error("step: non-finite value after step at t*=" + std::to_string(out.time));
    return out;
}

// ---------------------------------------------------------------------------
// finite-difference radial jets

namespace {

// Fornberg weights for the m-th derivative at x0 from nodes xs
std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
    const int n = static_cast<int>(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

} // namespace

std::vector<double> radial_derivatives(const std::vector<double>& f, const RadialGrid& grid,
                                       int i0, int jmax, int extra_width) {
    const int n = static_cast<int>(f.size());
    const int width = jmax + 1 + extra_width;
    if (width > n) throw std::invalid_argument("radial_derivatives: stencil exceeds grid");
    // prefer a centered window, clipped at the ends
    int start = std::max(0, std::min(i0 - width / 2, n - width));
    std::vector<double> xs(width);
    for (int i = 0; i < width; ++i) xs[i] = (start + i - i0) * grid.h;
    std::vector<double> out(jmax + 1, 0.0);
    for (int j = 0; j <= jmax; ++j) {
        if (j == 0) { out[0] = f[i0]; continue; }
        const auto w = fd_weights(0.0, xs, j);
        double s = 0.0;
        for (int i = 0; i < width; ++i) s += w[i] * f[start + i];
        out[j] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// transversal jets

TransversalJetCalculator::TransversalJetCalculator(const BlackHoleBackground& bg, double r0,
                                                   int l, int kmax)
    : l_(l), kmax_(kmax) {
    const std::size_t n = 2 * static_cast<std::size_t>(kmax) + 6;
    const auto D = series_D(bg, r0, n);
    const auto R = series_R(bg, r0, n);
    const auto w = 2.0 - D;
    const auto invr = TaylorSeries::inverse_power(r0, 1, n);
    const auto invr2 = TaylorSeries::inverse_power(r0, 2, n);
    const auto one = TaylorSeries::constant(1.0, n);
    const TaylorSeries cs[5] = {
        D / w,                                  // c1: coefficient of d_r Phi
        (one - D) * 2.0 / w,                    // c2: coefficient of d_r Pi
        R / w,                                  // c3: coefficient of Phi
        (invr * 2.0 - R) / w,                   // c4: coefficient of Pi
        invr2 * (-static_cast<double>(l) * (l + 1)) / w, // c5: coefficient of psi
    };
    c_.resize(5);
    for (int m = 0; m < 5; ++m) {
        c_[m].resize(n);
        for (std::size_t j = 0; j < n; ++j) c_[m][j] = cs[m].derivative(j);
    }
}

double TransversalJetCalculator::mixed(const std::vector<double>& dpsi,
                                       const std::vector<double>& dpi, int i, int j,
                                       std::vector<std::vector<double>>& memo,
                                       std::vector<std::vector<char>>& have) const {
    if (i == 0) return dpsi.at(j);
    if (i == 1) return dpi.at(j);
    if (have[i][j]) return memo[i][j];
    // d_t^i d_r^j psi = d_t^{i-2} d_r^j [ c1 d_r^2 psi + c2 d_r Pi + c3 d_r psi
    //                                     + c4 Pi + c5 psi ]
    double val = 0.0;
    double binom = 1.0;
    for (int m = 0; m <= j; ++m) {
        val += binom * (c_[0][m] * mixed(dpsi, dpi, i - 2, j - m + 2, memo, have) +
                        c_[1][m] * mixed(dpsi, dpi, i - 1, j - m + 1, memo, have) +
                        c_[2][m] * mixed(dpsi, dpi, i - 2, j - m + 1, memo, have) +
                        c_[3][m] * mixed(dpsi, dpi, i - 1, j - m, memo, have) +
                        c_[4][m] * mixed(dpsi, dpi, i - 2, j - m, memo, have));
        binom *= static_cast<double>(j - m) / static_cast<double>(m + 1);
    }
    memo[i][j] = val;
    have[i][j] = 1;
    return val;
}

double TransversalJetCalculator::transversal(const std::vector<double>& dpsi,
                                             const std::vector<double>& dpi, int k) const {
    if (k > kmax_ + 1) throw std::invalid_argument("TransversalJetCalculator: order exceeds kmax");
    std::vector<std::vector<double>> memo(k + 2, std::vector<double>(2 * k + 5, 0.0));
    std::vector<std::vector<char>> have(k + 2, std::vector<char>(2 * k + 5, 0));
    double out = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        out += sign * binom * mixed(dpsi, dpi, i, k - i, memo, have);
        binom *= static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    return out;
}

double TransversalJetCalculator::transversal_dv(const std::vector<double>& dpsi,
                                                const std::vector<double>& dpi, int k) const {
    // d_v (d_r^k|_v psi) = d_t* acting on the transversal combination
    std::vector<std::vector<double>> memo(k + 3, std::vector<double>(2 * k + 7, 0.0));
    std::vector<std::vector<char>> have(k + 3, std::vector<char>(2 * k + 7, 0));
    double out = 0.0, binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        out += sign * binom * mixed(dpsi, dpi, i + 1, k - i, memo, have);
        binom *= static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// evolve

EvolutionResult evolve(const BlackHoleBackground& bg, const RadialGrid& grid,
                       const InitialDataSpec& initial, int l, const EvolutionConfig& config,
                       int trace_kmax, const SnapshotCallback& on_snapshot,
                       bool keep_snapshots) {
    if (trace_kmax < 0) trace_kmax = l + 2;
    const int kmax = std::max(trace_kmax, l + 2); // the trace always carries H_l's orders
    SchemeTables tb(bg, grid, l);
    Workspace ws(grid.n_points);
    const int n = grid.n_points;
    const double h = grid.h;
    const double dt_raw = config.cfl * h;
    const int per_output = std::max(1, static_cast<int>(std::ceil(config.output_cadence / dt_raw - 1e-12)));
    const double dt = config.output_cadence / per_output;
    const int n_outputs = static_cast<int>(std::lround(config.t_final / config.output_cadence));

    ModeField f = make_initial_data(bg, grid, initial, l);
    TransversalJetCalculator jets(bg, bg.r_plus, l, kmax);
    std::optional<ConservationLaw> law;
    if (bg.extreme()) law = derive_conservation_law(l);

    EvolutionResult res;
    std::vector<double> k1p(n), k1f(n), k1q(n), k2p(n), k2f(n), k2q(n),
        k3p(n), k3f(n), k3q(n), k4p(n), k4f(n), k4q(n), tp(n), tf(n), tq(n);
    auto axpy = [&](const std::vector<double>& base, const std::vector<double>& k,
                    double a, std::vector<double>& out_v) {
        for (int i = 0; i < n; ++i) out_v[i] = base[i] + a * k[i];
    };

    auto energy_density = [&](const ModeField& fld, int i) {
        // -T^{t*}_{t*} r^2, per-mode angular normalization
        const double D = tb.D[i];
        const double r = grid.r(i);
        const double ang = static_cast<double>(l) * (l + 1) / (r * r) * fld.psi[i] * fld.psi[i];
        const double L = -(2.0 - D) * fld.pi[i] * fld.pi[i] +
                         2.0 * (1.0 - D) * fld.pi[i] * fld.phi_r[i] +
                         D * fld.phi_r[i] * fld.phi_r[i] + ang;
        const double Ttt = fld.pi[i] * fld.pi[i] + 0.5 * D * L;
        const double Trt = fld.pi[i] * fld.phi_r[i] - 0.5 * (1.0 - D) * L;
        return -((-(2.0 - D)) * Ttt + (1.0 - D) * Trt) * r * r;
    };
    auto radial_flux = [&](const ModeField& fld, int i) {
        // r^2 T^r_{t*}: energy current through r = const (positive means inward bookkeeping)
        const double D = tb.D[i];
        const double r = grid.r(i);
        const double ang = static_cast<double>(l) * (l + 1) / (r * r) * fld.psi[i] * fld.psi[i];
        const double L = -(2.0 - D) * fld.pi[i] * fld.pi[i] +
                         2.0 * (1.0 - D) * fld.pi[i] * fld.phi_r[i] +
                         D * fld.phi_r[i] * fld.phi_r[i] + ang;
        const double Ttt = fld.pi[i] * fld.pi[i] + 0.5 * D * L;
        const double Trt = fld.pi[i] * fld.phi_r[i] - 0.5 * (1.0 - D) * L;
        return ((1.0 - D) * Ttt + D * Trt) * r * r;
    };
    auto slice_energy = [&](const ModeField& fld) {
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            e += w * energy_density(fld, i);
        }
        return e * h;
    };

    auto record_trace = [&](const ModeField& fld) {
        HorizonSample s;
        s.tstar = fld.time;
        s.psi = fld.psi[0];
        const auto dpsi = radial_derivatives(fld.psi, grid, 0, kmax + 2);
        const auto dpi = radial_derivatives(fld.pi, grid, 0, kmax + 2);
        s.dr.resize(kmax);
        std::vector<double> drv(kmax + 2);
        drv[0] = fld.psi[0];
        for (int k = 1; k <= kmax; ++k) {
            drv[k] = jets.transversal(dpsi, dpi, k);
            s.dr[k - 1] = drv[k];
        }
        if (law) {
            s.h_l = law->evaluate(std::vector<double>(drv.begin(), drv.begin() + l + 2), bg.mass);
        } else {
            s.h_l = s.dr[0] + s.psi / bg.mass; // pseudo-Aretakis quantity at r_plus
        }
        res.trace.push_back(std::move(s));
    };

    double horizon_cum = 0.0, outer_cum = 0.0;
    double flux_h_prev = bg.mass * bg.mass * f.pi[0] * f.pi[0];
    double flux_o_prev = -radial_flux(f, n - 1);

    auto record_output = [&](const ModeField& fld) {
        res.balance_times.push_back(fld.time);
        res.slice_energy.push_back(slice_energy(fld));
        res.horizon_flux_cum.push_back(horizon_cum);
        res.outer_flux_cum.push_back(outer_cum);
        if (on_snapshot) on_snapshot(fld);
        if (keep_snapshots) res.snapshots.push_back(fld);
    };

    record_trace(f);
    record_output(f);
    for (int o = 0; o < n_outputs; ++o) {
        for (int sstep = 0; sstep < per_output; ++sstep) {
            rhs(tb, grid, config, f.psi, f.phi_r, f.pi, ws, k1p, k1f, k1q);
            axpy(f.psi, k1p, dt / 2, tp); axpy(f.phi_r, k1f, dt / 2, tf); axpy(f.pi, k1q, dt / 2, tq);
            rhs(tb, grid, config, tp, tf, tq, ws, k2p, k2f, k2q);
            axpy(f.psi, k2p, dt / 2, tp); axpy(f.phi_r, k2f, dt / 2, tf); axpy(f.pi, k2q, dt / 2, tq);
            rhs(tb, grid, config, tp, tf, tq, ws, k3p, k3f, k3q);
            axpy(f.psi, k3p, dt, tp); axpy(f.phi_r, k3f, dt, tf); axpy(f.pi, k3q, dt, tq);
            rhs(tb, grid, config, tp, tf, tq, ws, k4p, k4f, k4q);
            for (int i = 0; i < n; ++i) {
                f.psi[i] += dt / 6 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i]);
                f.phi_r[i] += dt / 6 * (k1f[i] + 2 * k2f[i] + 2 * k3f[i] + k4f[i]);
                f.pi[i] += dt / 6 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i]);
            }
            f.time = (o * per_output + sstep + 1) * dt;
            ++res.steps_taken;
            if (!std::isfinite(f.psi[0]) || !std::isfinite(f.pi[n / 2]))
                throw std::runtime_error("evolve: non-finite value at step " +
                                         std::to_string(res.steps_taken) + " (t*=" +
                                         std::to_string(f.time) + ")");
            // trapezoid accumulation of the boundary fluxes
            const double fh = bg.mass * bg.mass * f.pi[0] * f.pi[0];
            const double fo = -radial_flux(f, n - 1);
            horizon_cum += 0.5 * dt * (flux_h_prev + fh);
            outer_cum += 0.5 * dt * (flux_o_prev + fo);
            flux_h_prev = fh;
            flux_o_prev = fo;
            record_trace(f);
        }
        record_output(f);
    }
    return res;
}

std::vector<double> reduced_equation_residual(const BlackHoleBackground& bg,
                                              const RadialGrid& grid,
                                              const ModeField& prev,
                                              const ModeField& mid,
                                              const ModeField& next) {
    const int n = grid.n_points;
    const double dt2 = next.time - prev.time;
    if (dt2 <= 0.0) throw std::invalid_argument("reduced_equation_residual: snapshots out of order");
    std::vector<double> out(n, 0.0);
    const double h = grid.h;
    auto ddr = [&](const std::vector<double>& v, int i) {
        if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        if (i == n - 1) return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        return (v[i + 1] - v[i - 1]) / (2.0 * h);
    };
    for (int i = 0; i < n; ++i) {
        const double r = grid.r(i);
        const double D = metric_potential(bg, r, 0);
        const double R = metric_potential(bg, r, 1) + 2.0 * D / r;
        const double phidot = (next.phi_r[i] - prev.phi_r[i]) / dt2;
        const double pidot = (next.pi[i] - prev.pi[i]) / dt2;
        const double dv_psi = mid.pi[i];
        const double dr_psi = mid.phi_r[i] - mid.pi[i];
        const double dvdr_psi = phidot - pidot;
        const double drr_psi = ddr(mid.phi_r, i) - ddr(mid.pi, i) - phidot + pidot;
        out[i] = D * drr_psi + 2.0 * dvdr_psi + (2.0 / r) * dv_psi + R * dr_psi -
                 static_cast<double>(mid.l) * (mid.l + 1) / (r * r) * mid.psi[i];
    }
    return out;
}

std::vector<ConvergenceReport> convergence_study(const BlackHoleBackground& bg,
                                                 double r_max, int n_points_base,
                                                 const InitialDataSpec& initial, int l,
                                                 const EvolutionConfig& config,
                                                 int refinements) {
    if (refinements < 2) throw std::invalid_argument("convergence_study: need >= 2 refinements");
    std::vector<double> psi_h, drift, resid;
    for (int level = 0; level <= refinements; ++level) {
        const int np = (n_points_base - 1) * (1 << level) + 1;
        const RadialGrid grid = RadialGrid::make(bg, r_max, np);
        auto res = evolve(bg, grid, initial, l, config, -1, nullptr, true);
        psi_h.push_back(res.trace.back().psi);
        double h0 = res.trace.front().h_l, dmax = 0.0;
        for (const auto& s : res.trace) dmax = std::max(dmax, std::abs(s.h_l - h0));
        drift.push_back(dmax / std::max(std::abs(h0), 1e-300));
        // residual L2 at the midpoint output
        const auto& snaps = res.snapshots;
        if (snaps.size() >= 3) {
            const std::size_t m = snaps.size() / 2;
            auto rr = reduced_equation_residual(bg, grid, snaps[m - 1], snaps[m], snaps[m + 1]);
            double s2 = 0.0;
            for (double x : rr) s2 += x * x;
            resid.push_back(std::sqrt(s2 * grid.h));
        }
    }
    std::vector<ConvergenceReport> reports;
    auto triple_order = [](double a, double b, double c) {
        const double num = std::abs(a - b), den = std::abs(b - c);
        if (den == 0.0) return 0.0;
        return std::log2(num / den);
    };
    auto pair_order = [](double coarse, double fine) {
        if (fine == 0.0) return 0.0;
        return std::log2(coarse / fine);
    };
    {
        ConvergenceReport r;
        r.diagnostic = "psi(t_final, r_plus)";
        r.values = psi_h;
        r.observed_order = triple_order(psi_h[psi_h.size() - 3], psi_h[psi_h.size() - 2], psi_h.back());
        r.monotone = std::abs(psi_h[psi_h.size() - 3] - psi_h[psi_h.size() - 2]) >
                     std::abs(psi_h[psi_h.size() - 2] - psi_h.back());
        reports.push_back(std::move(r));
    }
    {
        ConvergenceReport r;
        r.diagnostic = "H_l max relative drift";
        r.values = drift;
        r.observed_order = pair_order(drift[drift.size() - 2], drift.back());
        r.monotone = true;
        for (std::size_t i = 1; i < drift.size(); ++i)
            if (drift[i] > drift[i - 1]) r.monotone = false;
        reports.push_back(std::move(r));
    }
    if (resid.size() >= 2) {
        ConvergenceReport r;
        r.diagnostic = "reduced-equation residual L2";
        r.values = resid;
        r.observed_order = pair_order(resid[resid.size() - 2], resid.back());
        r.monotone = true;
        for (std::size_t i = 1; i < resid.size(); ++i)
            if (resid[i] > resid[i - 1]) r.monotone = false;
        reports.push_back(std::move(r));
    }
    return reports;
}

} // namespace horizonlab
