#include "horizonlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horizonlab {

BlackHoleBackground BlackHoleBackground::make(double mass, double charge) {
    if (!(mass > 0.0)) throw std::domain_error("mass must be positive");
    if (charge < 0.0 || charge > mass)
        throw std::domain_error("charge must lie in [0, mass]");
    BlackHoleBackground bg;
    bg.mass = mass;
    bg.charge = charge;
    const double disc = std::sqrt(std::max(0.0, mass * mass - charge * charge));
    bg.r_plus = mass + disc;
    bg.r_minus = mass - disc;
    return bg;
}

std::string chart_name(Chart c) {
    switch (c) {
        case Chart::t_r: return "(t,r)";
        case Chart::t_rstar: return "(t,r*)";
        case Chart::v_r: return "(v,r)";
        case Chart::u_v: return "(u,v)";
        case Chart::tstar_r: return "(t*,r)";
    }
    return "?";
}

double metric_potential(const BlackHoleBackground& bg, double r, int order) {
    if (!(r > 0.0)) throw std::domain_error("metric_potential: r must be positive");
    if (order < 0 || order > 8) throw std::invalid_argument("metric_potential: order must be in [0,8]");
    const double M = bg.mass, e = bg.charge;
    if (order == 0) return 1.0 - 2.0 * M / r + e * e / (r * r);
    // d^k[-2M/r] = -2M (-1)^k k! / r^{k+1};  d^k[e^2/r^2] = e^2 (-1)^k (k+1)! / r^{k+2}
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) fact *= i;
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    const double t1 = -2.0 * M * sign * fact / std::pow(r, order + 1);
    const double t2 = e * e * sign * fact * (order + 1) / std::pow(r, order + 2);
    return t1 + t2;
}

double photon_sphere(const BlackHoleBackground& bg) {
    const double M = bg.mass, e = bg.charge;
    return 1.5 * M * (1.0 + std::sqrt(1.0 - 8.0 * e * e / (9.0 * M * M)));
}

double surface_gravity(const BlackHoleBackground& bg, Horizon which) {
    if (which == Horizon::inner && bg.charge == 0.0)
        throw std::domain_error("surface_gravity: no inner horizon when charge = 0");
    const double rp = (which == Horizon::outer) ? bg.r_plus : bg.r_minus;
    const double rm = (which == Horizon::outer) ? bg.r_minus : bg.r_plus;
    return (rp - rm) / (2.0 * rp * rp);
}

namespace {

double tortoise_raw(const BlackHoleBackground& bg, double r) {
    const double M = bg.mass;
    if (bg.extreme()) {
        return r + 2.0 * M * std::log(r - M) - M * M / (r - M);
    }
    const double kp = surface_gravity(bg, Horizon::outer);
    double out = r + std::log((r - bg.r_plus) / bg.r_plus) / (2.0 * kp);
    if (bg.r_minus > 0.0) {
        const double km = (bg.r_minus - bg.r_plus) / (2.0 * bg.r_minus * bg.r_minus);
        out += std::log((r - bg.r_minus) / bg.r_minus) / (2.0 * km);
    }
    return out;
}

} // namespace

double tortoise(const BlackHoleBackground& bg, double r) {
    if (!(r > bg.r_plus)) throw std::domain_error("tortoise: r must be strictly outside the outer horizon");
    return tortoise_raw(bg, r) - tortoise_raw(bg, photon_sphere(bg));
}

double tortoise_inverse(const BlackHoleBackground& bg, double rstar) {
    const double rp = bg.r_plus;
    // bracket: r* is strictly increasing in r on (r+, inf)
    double lo = rp * (1.0 + 1e-15);
    double hi = std::max(photon_sphere(bg) + 1.0, rp + std::max(1.0, rstar) + 10.0 * bg.mass);
    while (tortoise(bg, hi) < rstar) hi *= 2.0;
    // lo may still evaluate above rstar for very negative rstar: push toward horizon
    while (tortoise(bg, lo) > rstar && lo - rp > 1e-300) {
        lo = rp + (lo - rp) * 0.25;
        if (lo - rp < 1e-200) break;
    }
    // bisection to ~1e-14 relative on r, then a few Newton steps with dr*/dr = 1/D
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (tortoise(bg, mid) < rstar) lo = mid; else hi = mid;
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double f = tortoise(bg, r) - rstar;
        const double D = metric_potential(bg, r, 0);
        if (D <= 0.0) break;
        double step = -f * D;
        if (r + step <= rp) step = -0.5 * (r - rp);
        r += step;
    }
    const double resid = std::abs(tortoise(bg, r) - rstar);
    if (resid > 1e-10 * std::max(1.0, std::abs(rstar)))
        throw std::runtime_error("tortoise_inverse: iteration did not converge");
    return r;
}

ChartPoint chart_convert(const BlackHoleBackground& bg, const ChartPoint& p, Chart target) {
    if (p.chart == target) return p;
    // hub representation: (t, r) with r possibly on the horizon (then only
    // horizon-regular charts are allowed and we carry (v, r) instead).
    double t = 0.0, r = 0.0;
    bool have_t = true;
    double v_hold = 0.0;
    switch (p.chart) {
        case Chart::t_r: t = p.a; r = p.b; break;
        case Chart::t_rstar: t = p.a; r = tortoise_inverse(bg, p.b); break;
        case Chart::v_r:
            r = p.b;
            if (r > bg.r_plus) t = p.a - tortoise(bg, r);
            else { have_t = false; v_hold = p.a; }
            break;
        case Chart::u_v: {
            const double rstar = 0.5 * (p.b - p.a);
            t = 0.5 * (p.a + p.b);
            r = tortoise_inverse(bg, rstar);
            break;
        }
        case Chart::tstar_r:
            r = p.b;
            if (r > bg.r_plus) t = p.a - tortoise(bg, r) + r;
            else { have_t = false; v_hold = p.a + r; }
            break;
    }
    if (r < bg.r_plus) throw std::domain_error("chart_convert: point inside the horizon");
    if (!have_t) {
        // on-horizon points exist only in the (v,r) and (t*,r) charts
        if (target == Chart::v_r) return {Chart::v_r, v_hold, r};
        if (target == Chart::tstar_r) return {Chart::tstar_r, v_hold - r, r};
        throw std::domain_error("chart_convert: on-horizon point has no (t,.) or null-chart coordinates");
    }
    switch (target) {
        case Chart::t_r: return {Chart::t_r, t, r};
        case Chart::t_rstar: return {Chart::t_rstar, t, tortoise(bg, r)};
        case Chart::v_r: return {Chart::v_r, t + tortoise(bg, r), r};
        case Chart::u_v: return {Chart::u_v, t - tortoise(bg, r), t + tortoise(bg, r)};
        case Chart::tstar_r: return {Chart::tstar_r, t + tortoise(bg, r) - r, r};
    }
    throw std::logic_error("chart_convert: unreachable");
}

SliceGeometry slice_geometry(const BlackHoleBackground& bg, double r) {
    const double D = metric_potential(bg, r, 0);
    SliceGeometry s;
    s.h_rr = 2.0 - D;
    s.volume_factor = std::sqrt(2.0 - D);
    s.n_v = 1.0 / s.volume_factor;
    s.n_r = -(1.0 - D) / s.volume_factor;
    return s;
}

double WaveOperatorCoefficients::coeff(const std::string& label) const {
    for (const auto& [k, v] : terms)
        if (k == label) return v;
    throw std::invalid_argument("no coefficient labelled " + label);
}

WaveOperatorCoefficients wave_operator_coefficients(const BlackHoleBackground& bg,
                                                    Chart chart, double r, int l) {
    if (l < 0) throw std::invalid_argument("l must be non-negative");
    const bool horizon_ok = (chart == Chart::v_r || chart == Chart::tstar_r);
    if (horizon_ok ? !(r >= bg.r_plus) : !(r > bg.r_plus))
        throw std::domain_error("wave_operator_coefficients: r outside chart domain");
    const double D = metric_potential(bg, r, 0);
    const double Dp = metric_potential(bg, r, 1);
    const double R = Dp + 2.0 * D / r;
    const double ang = -static_cast<double>(l) * (l + 1) / (r * r);
    WaveOperatorCoefficients out;
    out.chart = chart;
    switch (chart) {
        case Chart::v_r:
            out.terms = {{"d_rr", D}, {"d_v d_r", 2.0}, {"d_v", 2.0 / r}, {"d_r", R}, {"psi", ang}};
            break;
        case Chart::t_rstar:
            out.terms = {{"d_tt", -1.0 / D}, {"d_r*r*", 1.0 / D}, {"d_r*", 2.0 / r}, {"psi", ang}};
            break;
        case Chart::t_r:
            out.terms = {{"d_tt", -1.0 / D}, {"d_rr", D}, {"d_r", R}, {"psi", ang}};
            break;
        case Chart::u_v:
            // acting on phi = r psi:  d_u d_v phi = -(D/4)(D'/r + l(l+1)/r^2) phi
            out.terms = {{"d_u d_v phi", 1.0},
                         {"phi", -(D / 4.0) * (Dp / r + static_cast<double>(l) * (l + 1) / (r * r))}};
            break;
        case Chart::tstar_r:
            out.terms = {{"d_rr", D}, {"d_t* d_r", 2.0 * (1.0 - D)}, {"d_t*t*", -(2.0 - D)},
                         {"d_r", R}, {"d_t*", 2.0 * (1.0 - D) / r - Dp}, {"psi", ang}};
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Taylor series

TaylorSeries TaylorSeries::constant(double v, std::size_t n) {
    std::vector<double> c(n, 0.0);
    if (n) c[0] = v;
    return TaylorSeries(std::move(c));
}

TaylorSeries TaylorSeries::variable(double r0, std::size_t n) {
    std::vector<double> c(n, 0.0);
    if (n > 0) c[0] = r0;
    if (n > 1) c[1] = 1.0;
    return TaylorSeries(std::move(c));
}

TaylorSeries TaylorSeries::inverse_power(double r0, int p, std::size_t n) {
    // 1/r^p about r0: coefficients (-1)^k C(p+k-1, k) / r0^{p+k}
    std::vector<double> c(n, 0.0);
    double binom = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        c[k] = sign * binom / std::pow(r0, p + static_cast<double>(k));
        binom *= static_cast<double>(p + k) / static_cast<double>(k + 1);
    }
    return TaylorSeries(std::move(c));
}

double TaylorSeries::derivative(std::size_t k) const {
    if (k >= c_.size()) throw std::out_of_range("TaylorSeries::derivative");
    double fact = 1.0;
    for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
    return c_[k] * fact;
}

TaylorSeries TaylorSeries::operator+(const TaylorSeries& o) const {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = c_[i] + o.c_[i];
    return TaylorSeries(std::move(c));
}

TaylorSeries TaylorSeries::operator-(const TaylorSeries& o) const {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = c_[i] - o.c_[i];
    return TaylorSeries(std::move(c));
}

TaylorSeries TaylorSeries::operator*(const TaylorSeries& o) const {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) c[i + j] += c_[i] * o.c_[j];
    return TaylorSeries(std::move(c));
}

TaylorSeries TaylorSeries::operator/(const TaylorSeries& o) const {
    const std::size_t n = std::min(c_.size(), o.c_.size());
    if (n == 0 || o.c_[0] == 0.0) throw std::domain_error("TaylorSeries: division by series with zero constant term");
    std::vector<double> q(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double s = c_[k];
        for (std::size_t j = 0; j < k; ++j) s -= q[j] * o.c_[k - j];
        q[k] = s / o.c_[0];
    }
    return TaylorSeries(std::move(q));
}

TaylorSeries TaylorSeries::operator*(double s) const {
    std::vector<double> c(c_);
    for (auto& x : c) x *= s;
    return TaylorSeries(std::move(c));
}

TaylorSeries operator-(double s, const TaylorSeries& o) {
    std::vector<double> c(o.c_);
    for (auto& x : c) x = -x;
    if (!c.empty()) c[0] += s;
    return TaylorSeries(std::move(c));
}

TaylorSeries series_D(const BlackHoleBackground& bg, double r0, std::size_t n) {
    const auto inv1 = TaylorSeries::inverse_power(r0, 1, n);
    const auto inv2 = TaylorSeries::inverse_power(r0, 2, n);
    return TaylorSeries::constant(1.0, n) - inv1 * (2.0 * bg.mass) + inv2 * (bg.charge * bg.charge);
}

TaylorSeries series_R(const BlackHoleBackground& bg, double r0, std::size_t n) {
    // R = D' + 2D/r; build D' by shifting coefficients of D
    const auto D = series_D(bg, r0, n + 1);
    std::vector<double> dp(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) dp[k] = D[k + 1] * static_cast<double>(k + 1);
    const auto Dn = series_D(bg, r0, n);
    return TaylorSeries(std::move(dp)) + Dn * TaylorSeries::inverse_power(r0, 1, n) * 2.0;
}

} // namespace horizonlab
