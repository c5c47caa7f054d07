#include "horizonlab/multipliers.hpp"

#include <cmath>
#include <stdexcept>

namespace horizonlab {

namespace {

// quintic smoothstep: 0 -> 1 with zero first and second derivatives at both ends
double smoothstep5(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double smoothstep5_d(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }

struct Blend {
    double a, b;
    double at(double r) const {
        if (r <= a) return 1.0;
        if (r >= b) return 0.0;
        return 1.0 - smoothstep5((r - a) / (b - a));
    }
    double deriv(double r) const {
        if (r <= a || r >= b) return 0.0;
        return -smoothstep5_d((r - a) / (b - a)) / (b - a);
    }
};

// quintic Hermite segment matching value/first/second derivatives at both ends
struct Quintic {
    double a, b, va, da, dda, vb, db, ddb;
    double at(double r) const {
        const double L = b - a, s = (r - a) / L;
        const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        const double h00 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
        const double h10 = s - 6 * s3 + 8 * s4 - 3 * s5;
        const double h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        const double h01 = 10 * s3 - 15 * s4 + 6 * s5;
        const double h11 = -4 * s3 + 7 * s4 - 3 * s5;
        const double h21 = 0.5 * s3 - s4 + 0.5 * s5;
        return va * h00 + da * L * h10 + dda * L * L * h20 +
               vb * h01 + db * L * h11 + ddb * L * L * h21;
    }
};

} // namespace

double cutoff_c2(double r, double a, double b) { return Blend{a, b}.at(r); }
double cutoff_c2_deriv(double r, double a, double b) { return Blend{a, b}.deriv(r); }

double MultiplierField::norm_squared(const BlackHoleBackground& bg, double r) const {
    const double D = metric_potential(bg, r, 0);
    const double fv = f_v(r), fr = f_r(r);
    return -D * fv * fv + 2.0 * fv * fr;
}

MultiplierField multiplier_T() {
    MultiplierField m;
    m.name = MultiplierName::T;
    m.label = "T";
    m.valid_rmin = 0.0;
    m.valid_rmax = 1e300;
    m.f_v = [](double) { return 1.0; };
    m.f_r = [](double) { return 0.0; };
    m.df_v = [](double) { return 0.0; };
    m.df_r = [](double) { return 0.0; };
    return m;
}

MultiplierField multiplier_N(const BlackHoleBackground& bg, bool modified) {
    const double M = bg.mass;
    const Blend blend{9.0 * M / 8.0, 8.0 * M / 7.0};
    MultiplierField m;
    m.name = MultiplierName::N;
    m.label = modified ? "N_mod" : "N";
    m.valid_rmin = M;
    m.valid_rmax = 9.0 * M / 8.0;
    m.f_v = [blend](double r) { const double s = blend.at(r); return 16.0 * r * s + (1.0 - s); };
    m.df_v = [blend](double r) {
        const double s = blend.at(r), sd = blend.deriv(r);
        return 16.0 * s + (16.0 * r - 1.0) * sd;
    };
    m.f_r = [blend, M](double r) { return (-1.5 * r + M) * blend.at(r); };
    m.df_r = [blend, M](double r) {
        return -1.5 * blend.at(r) + (-1.5 * r + M) * blend.deriv(r);
    };
    if (modified) {
        m.modification.kind = ModificationKind::redshift_mod;
        m.modification.h = -0.5;
    }
    return m;
}

MultiplierField multiplier_P(const BlackHoleBackground& bg) {
    if (!bg.extreme())
        throw std::domain_error("multiplier_P: defined on the extreme background");
    const double M = bg.mass;
    const Blend blend{9.0 * M / 8.0, 8.0 * M / 7.0};
    MultiplierField m;
    m.name = MultiplierName::P;
    m.label = "P";
    m.valid_rmin = M;
    m.valid_rmax = 9.0 * M / 8.0;
    // sqrt(D) = 1 - M/r on the extreme exterior
    m.f_v = [blend, M](double r) {
        const double s = blend.at(r);
        return (1.0 + 6.0 * (r - M) / M) * s + (1.0 - s);
    };
    m.df_v = [blend, M](double r) {
        const double s = blend.at(r), sd = blend.deriv(r);
        return 6.0 / M * s + 6.0 * (r - M) / M * sd;
    };
    m.f_r = [blend, M](double r) { return -(1.0 - M / r) * blend.at(r); };
    m.df_r = [blend, M](double r) {
        return -(M / (r * r)) * blend.at(r) - (1.0 - M / r) * blend.deriv(r);
    };
    return m;
}

namespace {

MultiplierField x_family(const BlackHoleBackground& bg, MultiplierName name,
                         const std::string& label,
                         std::function<double(double)> f,
                         std::function<double(double)> fp,
                         std::function<double(double)> fpp,
                         std::function<double(double)> fppp) {
    // X = f d_{r*} = f d_v + f D d_r in the (v,r) chart
    MultiplierField m;
    m.name = name;
    m.label = label;
    m.is_x_family = true;
    m.valid_rmin = bg.r_plus;
    m.valid_rmax = 1e300;
    m.f_of_r = f;
    m.df_of_r = std::move(fp);     // d/dr*
    m.d2f_of_r = std::move(fpp);   // d^2/dr*^2
    m.d3f_of_r = std::move(fppp);  // d^3/dr*^3
    m.f_v = f;
    m.f_r = [bg, f](double r) { return f(r) * metric_potential(bg, r, 0); };
    m.df_v = [bg, g = m.df_of_r](double r) {
        // d/dr f(r*(r)) = f'(r*) / D; finite off the horizon only
        const double D = metric_potential(bg, r, 0);
        if (D == 0.0) throw std::domain_error("X-family d_r f_v is 0/0 on the horizon");
        return g(r) / D;
    };
    m.df_r = [bg, f, g = m.df_of_r](double r) {
        // d/dr [f D] = f' + f D'   (f' is the r*-derivative; no division by D)
        return g(r) + f(r) * metric_potential(bg, r, 1);
    };
    return m;
}

} // namespace

MultiplierField multiplier_X0(const BlackHoleBackground& bg) {
    auto f = [](double r) { return -1.0 / (r * r * r); };
    auto fp = [bg](double r) { return metric_potential(bg, r, 0) * 3.0 / std::pow(r, 4); };
    auto fpp = [bg](double r) {
        const double D = metric_potential(bg, r, 0), Dp = metric_potential(bg, r, 1);
        return D * (3.0 * Dp / std::pow(r, 4) - 12.0 * D / std::pow(r, 5));
    };
    auto fppp = [bg](double r) {
        const double D = metric_potential(bg, r, 0), Dp = metric_potential(bg, r, 1);
        const double Dpp = metric_potential(bg, r, 2);
        const double d_dr = 3.0 * (Dp * Dp + D * Dpp) / std::pow(r, 4) -
                            36.0 * D * Dp / std::pow(r, 5) + 60.0 * D * D / std::pow(r, 6);
        return D * d_dr;
    };
    return x_family(bg, MultiplierName::X_0, "X0", f, fp, fpp, fppp);
}

MultiplierField multiplier_Xd(const BlackHoleBackground& bg) {
    auto rstar = [bg](double r) { return tortoise(bg, r); };
    auto f = [rstar](double r) { return std::atan(rstar(r)); };
    auto fp = [rstar](double r) { const double x = rstar(r); return 1.0 / (x * x + 1.0); };
    auto fpp = [rstar](double r) {
        const double x = rstar(r);
        return -2.0 * x / ((x * x + 1.0) * (x * x + 1.0));
    };
    auto fppp = [rstar](double r) {
        const double x = rstar(r);
        const double d = x * x + 1.0;
        return (6.0 * x * x - 2.0) / (d * d * d);
    };
    return x_family(bg, MultiplierName::X_d, "Xd", f, fp, fpp, fppp);
}

MultiplierField multiplier_Xalpha(const BlackHoleBackground& bg, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("multiplier_Xalpha: alpha must be positive");
    auto x_of_r = [bg, alpha](double r) { return tortoise(bg, r) - alpha - std::sqrt(alpha); };
    const double x0 = -alpha - std::sqrt(alpha); // x at r* = 0, i.e. r = photon sphere
    auto f = [x_of_r, alpha, x0](double r) {
        return (std::atan(x_of_r(r) / alpha) - std::atan(x0 / alpha)) / alpha;
    };
    auto fp = [x_of_r, alpha](double r) {
        const double x = x_of_r(r);
        return 1.0 / (alpha * alpha + x * x);
    };
    auto fpp = [x_of_r, alpha](double r) {
        const double x = x_of_r(r);
        const double d = alpha * alpha + x * x;
        return -2.0 * x / (d * d);
    };
    auto fppp = [x_of_r, alpha](double r) {
        const double x = x_of_r(r);
        const double d = alpha * alpha + x * x;
        return (6.0 * x * x - 2.0 * alpha * alpha) / (d * d * d);
    };
    auto m = x_family(bg, MultiplierName::X_alpha, "Xalpha", f, fp, fpp, fppp);
    m.param = alpha;
    m.modification.alpha = alpha;
    return m;
}

MultiplierField multiplier_L(const BlackHoleBackground& bg) {
    const double M = bg.mass;
    const Blend blend{9.0 * M / 8.0, 5.0 * M / 4.0};
    MultiplierField m;
    m.name = MultiplierName::L_k;
    m.label = "L";
    m.valid_rmin = M;
    m.valid_rmax = 9.0 * M / 8.0;
    m.f_v = [blend, M](double r) { return (2.0 + 2.0 * (r - M) / M) * blend.at(r); };
    m.df_v = [blend, M](double r) {
        return 2.0 / M * blend.at(r) + (2.0 + 2.0 * (r - M) / M) * blend.deriv(r);
    };
    m.f_r = [blend, M](double r) { return (-1.05 - 45.0 * (r - M) / M) * blend.at(r); };
    m.df_r = [blend, M](double r) {
        return -45.0 / M * blend.at(r) + (-1.05 - 45.0 * (r - M) / M) * blend.deriv(r);
    };
    return m;
}

MultiplierField multiplier_by_name(const BlackHoleBackground& bg, const std::string& name) {
    if (name == "T") return multiplier_T();
    if (name == "N") return multiplier_N(bg, false);
    if (name == "N_mod") return multiplier_N(bg, true);
    if (name == "P") return multiplier_P(bg);
    if (name == "X0") return multiplier_X0(bg);
    if (name == "Xd") return multiplier_Xd(bg);
    if (name == "L") return multiplier_L(bg);
    if (name.rfind("Xalpha", 0) == 0) {
        double alpha = 10.0;
        if (name.size() > 7 && name[6] == ':') alpha = std::stod(name.substr(7));
        return multiplier_Xalpha(bg, alpha);
    }
    throw std::invalid_argument("unknown multiplier: " + name);
}

double lagrangian_weight_f(const BlackHoleBackground& bg, double r) {
    const double D = metric_potential(bg, r, 0);
    return std::pow(D, 1.5) / (r * r * r);
}

double lagrangian_weight_hd(const BlackHoleBackground& bg, double r) {
    const double M = bg.mass;
    const double r0 = 9.0 * M / 8.0, rps = 2.0 * M, r1 = 3.0 * M;
    auto seg1 = [&](double rr) {
        const double x = tortoise(bg, rr);
        return -1.0 / (x * x + 1.0);
    };
    if (r <= r0) return seg1(r);
    if (r >= r1) return -1.0 / (r * r);
    auto seg1_d = [&](double rr) {
        const double x = tortoise(bg, rr);
        const double D = metric_potential(bg, rr, 0);
        const double d = x * x + 1.0;
        return 2.0 * x / (d * d * D);
    };
    auto seg1_dd = [&](double rr) {
        const double x = tortoise(bg, rr);
        const double D = metric_potential(bg, rr, 0);
        const double Dp = metric_potential(bg, rr, 1);
        const double d = x * x + 1.0;
        const double g = 2.0 * x / (d * d);            // d/dr* of -1/(x^2+1)
        const double gp = (2.0 * d - 8.0 * x * x) / (d * d * d); // d/dr* of g
        return gp / (D * D) - g * Dp / (D * D);
    };
    if (r <= rps) {
        const Quintic q{r0, rps, seg1(r0), seg1_d(r0), seg1_dd(r0), 0.0, 0.0, 0.0};
        return q.at(r);
    }
    const Quintic q{rps, r1, 0.0, 0.0, 0.0,
                    -1.0 / (r1 * r1), 2.0 / (r1 * r1 * r1), -6.0 / (r1 * r1 * r1 * r1)};
    return q.at(r);
}

} // namespace horizonlab
