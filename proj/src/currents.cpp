#include "horizonlab/currents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horizonlab {

std::pair<double, double> QuadraticForm::block_eigenvalues() const {
    const double tr = C_aa + C_bb;
    const double det = C_aa * C_bb - 0.25 * C_ab * C_ab;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return {0.5 * tr - disc, 0.5 * tr + disc};
}

double QuadraticForm::min_eigenvalue_3x3() const {
    // symmetric matrix over (d_a psi, d_b psi, psi)
    const double m[3][3] = {{C_aa, 0.5 * C_ab, 0.5 * C_a0},
                            {0.5 * C_ab, C_bb, 0.5 * C_b0},
                            {0.5 * C_a0, 0.5 * C_b0, C_00}};
    // characteristic polynomial roots via the standard symmetric 3x3 closed form
    const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    double p2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p2 += m[i][j] * m[i][j];
    p2 = p2 - 3.0 * q * q;
    if (p2 <= 0.0) return q;
    const double p = std::sqrt(p2 / 6.0);
    double B[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
    const double detB =
        B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
        B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
        B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    const double phi = std::acos(std::clamp(detB / 2.0, -1.0, 1.0)) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
}

double QuadraticForm::contract(double psi, double da, double db, double r, int l) const {
    const double ang = static_cast<double>(l) * (l + 1) / (r * r) * psi * psi;
    return C_aa * da * da + C_bb * db * db + C_ab * da * db + C_ang * ang +
           C_a0 * psi * da + C_b0 * psi * db + C_00 * psi * psi;
}

namespace {

struct Bg {
    double D, Dp, Dpp, R, Rp;
    Bg(const BlackHoleBackground& bg, double r) {
        D = metric_potential(bg, r, 0);
        Dp = metric_potential(bg, r, 1);
        Dpp = metric_potential(bg, r, 2);
        R = Dp + 2.0 * D / r;
        Rp = Dpp + 2.0 * Dp / r - 2.0 * D / (r * r);
    }
};

} // namespace

QuadraticForm bulk_form(const BlackHoleBackground& bg, const MultiplierField& V,
                        double r, int l) {
    if (r < V.valid_rmin)
        throw std::domain_error("bulk_form: r below the multiplier's validity region");
    const Bg b(bg, r);
    QuadraticForm q;
    if (!V.is_x_family) {
        q.chart = Chart::v_r;
        const double fv = V.f_v(r), fr = V.f_r(r);
        const double dfv = V.df_v(r), dfr = V.df_r(r);
        q.C_aa = dfv;
        q.C_bb = b.D * (0.5 * dfr - fr / r) - 0.5 * fr * b.Dp;
        q.C_ab = b.D * dfv - 2.0 * fr / r;
        q.C_ang = -0.5 * dfr;
        if (V.modification.kind == ModificationKind::redshift_mod) {
            // K^{V,delta,h} = K^V + h delta grad.grad + h delta' psi (d_v + D d_r) psi
            const double M = bg.mass;
            const double delta = cutoff_c2(r, 9.0 * M / 8.0, 8.0 * M / 7.0);
            const double ddelta = cutoff_c2_deriv(r, 9.0 * M / 8.0, 8.0 * M / 7.0);
            const double h = V.modification.h;
            q.C_ab += 2.0 * h * delta;
            q.C_bb += h * delta * b.D;
            q.C_ang += h * delta;
            q.C_a0 += h * ddelta;
            q.C_b0 += h * ddelta * b.D;
        }
        return q;
    }
    // X-family, evaluated in the (t, r*) chart; primes are d/dr*
    if (!(r > bg.r_plus))
        throw std::domain_error("bulk_form: X-family forms are defined off the horizon");
    q.chart = Chart::t_rstar;
    const double f = V.f_of_r(r);
    const double fp = V.df_of_r(r), fpp = V.d2f_of_r(r), fppp = V.d3f_of_r(r);
    const double P = r * r - 3.0 * bg.mass * r + 2.0 * bg.charge * bg.charge;
    switch (V.modification.kind) {
        case ModificationKind::none:
            q.C_aa = 0.5 * fp / b.D + f / r;
            q.C_bb = 0.5 * fp / b.D - f / r;
            q.C_ang = -0.5 * fp - 0.5 * f * b.Dp;
            break;
        case ModificationKind::first_kind: {
            // K^{X,1}: zeroth-order modification g = 2G, w = -G kills the
            // (d_t psi)^2 coefficient and every psi d psi cross term
            q.C_aa = 0.0;
            q.C_bb = fp / b.D;
            q.C_ang = f * P / (r * r * r);
            const double Ddot = b.D * b.Dp;                       // d D/dr*
            const double Dddot = b.D * (b.Dp * b.Dp + b.D * b.Dpp); // d^2 D/dr*^2
            const double boxG = 0.25 * fppp / b.D + fpp / r + Ddot * fp / (b.D * r) +
                                (Dddot / (2.0 * b.D * r) - Ddot / (2.0 * r * r)) * f;
            q.C_00 = -boxG;
            break;
        }
        case ModificationKind::second_kind: {
            const double alpha = V.modification.alpha;
            if (!(alpha > 0.0)) throw std::invalid_argument("second_kind needs alpha > 0");
            const double x = tortoise(bg, r) - alpha - std::sqrt(alpha);
            const double ax = alpha * alpha + x * x;
            const double beta = b.D / r - x / ax;
            // r*-derivative of beta
            const double Ddot = b.D * b.Dp;
            const double Dddot = b.D * (b.Dp * b.Dp + b.D * b.Dpp);
            const double betap = Ddot / r - b.D * b.D / (r * r) - (alpha * alpha - x * x) / (ax * ax);
            q.C_aa = 0.0;
            q.C_bb = fp / b.D;
            q.C_b0 = 2.0 * beta * fp / b.D;
            q.C_ang = f * P / (r * r * r);
            const double bracket = -0.25 * fppp / b.D + (beta - b.D / r) * fpp / b.D +
                                   (betap - beta * beta + 2.0 * b.D * beta / r - Ddot / r) * fp / b.D +
                                   (Ddot / (2.0 * r * r) - Dddot / (2.0 * b.D * r)) * f;
            q.C_00 = beta * beta * fp / b.D + bracket;
            break;
        }
        case ModificationKind::redshift_mod:
            throw std::invalid_argument("redshift modification applies to (v,r) multipliers");
    }
    return q;
}

QuadraticForm lagrangian_bulk(const BlackHoleBackground& bg,
                              const std::function<double(double)>& w,
                              const std::function<double(double)>& dw_dr, double r) {
    // Div(w psi grad psi) = w grad.grad + psi (grad w . grad psi), w radial:
    // grad w = (dw/dr) (d_v + D d_r) after raising, so in (t,r*) terms
    // Div(L) = -(w/D)(d_t psi)^2 + (w/D)(d_r* psi)^2 + w ang + (w'/D) psi d_r* psi
    const Bg b(bg, r);
    if (!(r > bg.r_plus)) throw std::domain_error("lagrangian_bulk: needs r > r_plus");
    QuadraticForm q;
    q.chart = Chart::t_rstar;
    const double wv = w(r);
    const double wp_star = b.D * dw_dr(r); // d/dr* = D d/dr
    q.C_aa = -wv / b.D;
    q.C_bb = wv / b.D;
    q.C_ang = wv;
    q.C_b0 = wp_star / b.D;
    return q;
}

std::array<double, 10> commuted_bulk_coefficients(const BlackHoleBackground& bg,
                                                  const MultiplierField& L, double r) {
    const Bg b(bg, r);
    const double fv = L.f_v(r), fr = L.f_r(r);
    const double dfv = L.df_v(r), dfr = L.df_r(r);
    std::array<double, 10> H{};
    H[0] = dfv;                                                // (d_v d_r psi)^2
    H[1] = b.D * (0.5 * dfr - fr / r) - 1.5 * b.Dp * fr;       // (d_r d_r psi)^2
    H[2] = -0.5 * dfr;                                         // |grad_slash d_r psi|^2
    H[3] = 2.0 * fv / (r * r);                                 // (d_v d_r psi)(d_v psi)
    H[4] = -fv * b.Rp;                                         // (d_v d_r psi)(d_r psi)
    H[5] = 2.0 * fr / (r * r);                                 // (d_r d_r psi)(d_v psi)
    H[6] = 2.0 * fv / r;                                       // (d_v d_r psi) lap psi
    H[7] = 2.0 * fr / r;                                       // (d_r d_r psi) lap psi
    H[8] = b.D * dfv - b.Dp * fv - 2.0 * fr / r;               // (d_v d_r psi)(d_r d_r psi)
    H[9] = -fr * b.Rp;                                         // (d_r d_r psi)(d_r psi)
    return H;
}

PositivityReport positivity_scan(const BlackHoleBackground& bg, const MultiplierField& V,
                                 double r_min, double r_max, int samples, int l,
                                 bool record_samples) {
    if (samples < 2) throw std::invalid_argument("positivity_scan: samples must be >= 2");
    PositivityReport rep;
    rep.multiplier = V.label;
    rep.r_min = r_min;
    rep.r_max = r_max;
    rep.samples = samples;
    rep.min_eigenvalue = 1e300;
    rep.min_c_ang = 1e300;
    for (int i = 0; i < samples; ++i) {
        const double r = r_min + (r_max - r_min) * i / (samples - 1);
        const QuadraticForm q = bulk_form(bg, V, r, l);
        double lo, hi;
        if (q.C_a0 == 0.0 && q.C_b0 == 0.0 && q.C_00 == 0.0) {
            std::tie(lo, hi) = q.block_eigenvalues();
        } else {
            lo = q.min_eigenvalue_3x3();
            hi = lo;
        }
        if (lo < rep.min_eigenvalue) {
            rep.min_eigenvalue = lo;
            rep.witness_r = r;
        }
        rep.min_c_ang = std::min(rep.min_c_ang, q.C_ang);
        if (record_samples) rep.samples_out.push_back({r, {lo, hi}});
    }
    rep.angular_nonnegative = rep.min_c_ang >= -1e-14;
    return rep;
}

double flux_density_direct(const BlackHoleBackground& bg, const MultiplierField& V,
                           double r, int l, double psi, double dv_psi, double dr_psi) {
    const double D = metric_potential(bg, r, 0);
    const SliceGeometry s = slice_geometry(bg, r);
    const double Vv = V.f_v(r), Vr = V.f_r(r);
    const double nv = s.n_v, nr = s.n_r;
    const double ang = static_cast<double>(l) * (l + 1) / (r * r) * psi * psi;
    return Vv * nv * dv_psi * dv_psi +
           (0.5 * D * D * Vv * nv - 0.5 * D * Vv * nr - 0.5 * D * Vr * nv + Vr * nr) *
               dr_psi * dr_psi +
           D * Vv * nv * dv_psi * dr_psi +
           (0.5 * D * Vv * nv - 0.5 * Vv * nr - 0.5 * Vr * nv) * ang;
}

double flux_density_generalt(const BlackHoleBackground& bg, const MultiplierField& V,
                             double r, int l, double psi, double dv_psi, double dr_psi) {
    const double D = metric_potential(bg, r, 0);
    const SliceGeometry s = slice_geometry(bg, r);
    const double Vv = V.f_v(r), Vr = V.f_r(r);
    const double nv = s.n_v, nr = s.n_r;
    if (!(Vv > 0.0)) throw std::domain_error("flux_density_generalt: needs V^v > 0");
    const double gVV = -D * Vv * Vv + 2.0 * Vv * Vr;
    const double gnn = -D * nv * nv + 2.0 * nv * nr;
    const double gVn = -D * Vv * nv + Vv * nr + Vr * nv;
    const double wV = -gVV / (2.0 * Vv * Vv);
    const double wn = -gnn / (2.0 * nv * nv);
    const double S = D * D + 2.0 * wV * wn;
    const double ratio = (S > 0.0) ? D * D / S : 0.0; // removable 0/0 when V is null on H+
    const double ang = static_cast<double>(l) * (l + 1) / (r * r) * psi * psi;
    const double sq = std::sqrt(ratio) * dv_psi + std::sqrt(std::max(0.0, S) / 4.0) * dr_psi;
    return Vv * nv * ((1.0 - ratio) * dv_psi * dv_psi + 0.5 * wV * wn * dr_psi * dr_psi + sq * sq) -
           0.5 * gVn * ang;
}

FluxReport flux_through_slice(const BlackHoleBackground& bg, const RadialGrid& grid,
                              const MultiplierField& V, const ModeField& field,
                              double r_lo, double r_hi, bool keep_integrand) {
    const int i0 = grid.index_at(r_lo);
    const int i1 = grid.index_at(r_hi);
    if (i1 <= i0) throw std::invalid_argument("flux_through_slice: empty range");
    FluxReport rep;
    rep.multiplier = V.label;
    rep.tstar = field.time;
    rep.r_lo = grid.r(i0);
    rep.r_hi = grid.r(i1);
    double acc = 0.0;
    for (int i = i0; i <= i1; ++i) {
        const double r = grid.r(i);
        const double dv = field.pi[i];
        const double dr = field.phi_r[i] - field.pi[i];
        const double dens = flux_density_direct(bg, V, r, field.l, field.psi[i], dv, dr) *
                            slice_geometry(bg, r).volume_factor * r * r;
        const double w = (i == i0 || i == i1) ? 0.5 : 1.0;
        acc += w * dens;
        if (keep_integrand) rep.integrand.push_back({r, dens});
    }
    rep.value = acc * grid.h;
    return rep;
}

double horizon_flux_T(const std::vector<double>& times, const std::vector<double>& dv_psi,
                      double mass, double v1, double v2) {
    if (times.size() != dv_psi.size() || times.size() < 2)
        throw std::invalid_argument("horizon_flux_T: bad series");
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = std::max(times[i - 1], v1);
        const double b = std::min(times[i], v2);
        if (b <= a) continue;
        // linear interpolation of the integrand within the step
        const double t0 = times[i - 1], t1 = times[i];
        auto f = [&](double t) {
            const double s = (t - t0) / (t1 - t0);
            const double val = dv_psi[i - 1] + s * (dv_psi[i] - dv_psi[i - 1]);
            return val * val;
        };
        acc += 0.5 * (f(a) + f(b)) * (b - a);
    }
    return acc * mass * mass;
}

double rweighted_energy(const BlackHoleBackground& bg, const RadialGrid& grid,
                        const ModeField& field, double p, double r_lo, double r_hi) {
    if (p >= 3.0) throw std::domain_error("rweighted_energy: hierarchy requires p < 3");
    if (r_lo <= 2.0 * bg.mass)
        throw std::domain_error("rweighted_energy: range must lie in the far region r > 2M");
    const int i0 = grid.index_at(r_lo), i1 = grid.index_at(r_hi);
    if (i1 <= i0) throw std::invalid_argument("rweighted_energy: empty range");
    double acc = 0.0;
    for (int i = i0; i <= i1; ++i) {
        const double r = grid.r(i);
        const double D = metric_potential(bg, r, 0);
        // d_v phi in the (u,v) chart: (1/2)[(2-D) d_t* + D d_r|t*] (r psi)
        const double dphi_dt = r * field.pi[i];
        const double dphi_dr = field.psi[i] + r * field.phi_r[i];
        const double dvphi = 0.5 * ((2.0 - D) * dphi_dt + D * dphi_dr);
        const double w = (i == i0 || i == i1) ? 0.5 : 1.0;
        acc += w * std::pow(r, p - 2.0) * dvphi * dvphi;
    }
    return acc * grid.h;
}

double higher_order_energy(const BlackHoleBackground& bg, const RadialGrid& grid,
                           const ModeField& field, double r0, int k) {
    const int i1 = grid.index_at(r0);
    if (i1 < 2) throw std::invalid_argument("higher_order_energy: region too small");
    const int jmax = k + 2;
    if (jmax + 3 > grid.n_points)
        throw std::invalid_argument("higher_order_energy: grid cannot support the stencil");
    double acc = 0.0;
    for (int i = 0; i <= i1; ++i) {
        const double r = grid.r(i);
        TransversalJetCalculator jets(bg, r, field.l, k + 1);
        const auto dpsi = radial_derivatives(field.psi, grid, i, jmax + 1);
        const auto dpi = radial_derivatives(field.pi, grid, i, jmax + 1);
        const double drk = jets.transversal(dpsi, dpi, k);
        const double drk1 = jets.transversal(dpsi, dpi, k + 1);
        const double dv_drk = jets.transversal_dv(dpsi, dpi, k);
        const double ang = static_cast<double>(field.l) * (field.l + 1) / (r * r) * drk * drk;
        const double dens = (dv_drk * dv_drk + drk1 * drk1 + ang) *
                            slice_geometry(bg, r).volume_factor * r * r;
        const double w = (i == 0 || i == i1) ? 0.5 : 1.0;
        acc += w * dens;
    }
    return acc * grid.h;
}

ModeField derived_transversal_field(const BlackHoleBackground& bg, const RadialGrid& grid,
                                    const ModeField& field) {
    const int n = grid.n_points;
    ModeField out;
    out.l = field.l;
    out.time = field.time;
    out.psi.resize(n);
    out.pi.resize(n);
    out.phi_r.resize(n);
    const double h = grid.h;
    auto ddr = [&](const std::vector<double>& v, int i) {
        if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        if (i == n - 1) return (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        return (v[i + 1] - v[i - 1]) / (2.0 * h);
    };
    for (int i = 0; i < n; ++i) {
        const double r = grid.r(i);
        const double D = metric_potential(bg, r, 0);
        const double Dp = metric_potential(bg, r, 1);
        const double R = Dp + 2.0 * D / r;
        const double dPi = ddr(field.pi, i);
        const double dPhi = ddr(field.phi_r, i);
        const double G = (D * dPhi + 2.0 * (1.0 - D) * dPi + R * field.phi_r[i] +
                          (2.0 / r - R) * field.pi[i] -
                          static_cast<double>(field.l) * (field.l + 1) / (r * r) * field.psi[i]) /
                         (2.0 - D);
        out.psi[i] = field.phi_r[i] - field.pi[i];
        out.pi[i] = dPi - G;           // d_t* chi
        out.phi_r[i] = dPhi - dPi;     // d_r|t* chi
    }
    return out;
}

} // namespace horizonlab
