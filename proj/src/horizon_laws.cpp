#include "horizonlab/horizon_laws.hpp"

#include <sstream>
#include <stdexcept>

namespace horizonlab {

using Int = ExactCoefficient::Int;

ExactCoefficient::ExactCoefficient(Int num, Int den, int mass_power)
    : num_(std::move(num)), den_(std::move(den)), pow_(mass_power) {
    if (den_ == 0) throw std::domain_error("ExactCoefficient: zero denominator");
    normalize();
}

void ExactCoefficient::normalize() {
    if (den_ < 0) { den_ = -den_; num_ = -num_; }
    if (num_ == 0) { den_ = 1; pow_ = 0; return; }
    Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
    num_ /= g;
    den_ /= g;
}

ExactCoefficient ExactCoefficient::operator+(const ExactCoefficient& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    if (pow_ != o.pow_)
        throw std::logic_error("ExactCoefficient: adding different mass dimensions");
    return ExactCoefficient(num_ * o.den_ + o.num_ * den_, den_ * o.den_, pow_);
}

ExactCoefficient ExactCoefficient::operator*(const ExactCoefficient& o) const {
    return ExactCoefficient(num_ * o.num_, den_ * o.den_, pow_ + o.pow_);
}

ExactCoefficient ExactCoefficient::operator-() const {
    return ExactCoefficient(-num_, den_, pow_);
}

ExactCoefficient ExactCoefficient::inverse() const {
    if (is_zero()) throw std::domain_error("ExactCoefficient: inverse of zero");
    return ExactCoefficient(den_, num_, -pow_);
}

bool ExactCoefficient::operator==(const ExactCoefficient& o) const {
    return num_ == o.num_ && den_ == o.den_ && (is_zero() || pow_ == o.pow_);
}

double ExactCoefficient::value(double mass) const {
    return static_cast<double>(num_) / static_cast<double>(den_) * std::pow(mass, pow_);
}

std::string ExactCoefficient::str() const {
    std::ostringstream os;
    os << num_;
    if (den_ != 1) os << "/" << den_;
    if (pow_ != 0 && num_ != 0) os << " M^" << pow_;
    return os.str();
}

std::string JetSymbol::str() const {
    std::ostringstream os;
    if (kind == dv_dr) os << "d_v ";
    if (order == 0 && kind == dr) { os << "psi"; return os.str(); }
    if (order == 0) { os << "psi"; return os.str(); }
    os << "d_r^" << order << " psi";
    return os.str();
}

ExactCoefficient HorizonIdentity::coeff(const JetSymbol& s) const {
    auto it = coefficients.find(s);
    return it == coefficients.end() ? ExactCoefficient() : it->second;
}

namespace {

Int factorial(int n) {
    Int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int b = 1;
    for (int i = 0; i < k; ++i) { b *= (n - i); b /= (i + 1); }
    return b;
}

} // namespace

ExactCoefficient background_horizon_jet(BackgroundSymbol sym, int order) {
    if (order < 0) throw std::invalid_argument("background_horizon_jet: negative order");
    const int i = order;
    const Int sign = (i % 2 == 0) ? 1 : -1;
    switch (sym) {
        case BackgroundSymbol::two_over_r:
            // d^i [2/r] = 2 (-1)^i i! / r^{i+1}  -> at r=M: (2 (-1)^i i!) M^{-(i+1)}
            return ExactCoefficient(2 * sign * factorial(i), 1, -(i + 1));
        case BackgroundSymbol::inv_r2:
            // d^i [r^-2] = (-1)^i (i+1)! / r^{i+2}
            return ExactCoefficient(sign * factorial(i + 1), 1, -(i + 2));
        case BackgroundSymbol::D: {
            // D = 1 - 2M/r + M^2/r^2 (extreme): d^i D at r=M
            if (i == 0) return ExactCoefficient();
            // d^i = -2M (-1)^i i!/r^{i+1} + M^2 (-1)^i (i+1)!/r^{i+2} -> (-1)^i i! (i-1) M^{-i}
            return ExactCoefficient(sign * factorial(i) * (i - 1), 1, -i);
        }
        case BackgroundSymbol::R: {
            // R = D' + 2D/r: d^i R|M = D^{(i+1)}|M + 2 sum_j C(i,j) d^j D * d^{i-j} r^-1
            ExactCoefficient out = background_horizon_jet(BackgroundSymbol::D, i + 1);
            for (int j = 0; j <= i; ++j) {
                const ExactCoefficient dj = background_horizon_jet(BackgroundSymbol::D, j);
                if (dj.is_zero()) continue;
                const int m = i - j;
                const Int s = (m % 2 == 0) ? 1 : -1;
                const ExactCoefficient invr(s * factorial(m), 1, -(m + 1));
                out = out + dj * invr * ExactCoefficient(2 * binomial(i, j), 1, 0);
            }
            return out;
        }
    }
    throw std::invalid_argument("background_horizon_jet: unknown symbol");
}

HorizonIdentity restrict_commuted_wave(int k, int l) {
    if (k < 0 || l < 0 || k > 32 || l > 32)
        throw std::invalid_argument("restrict_commuted_wave: k, l must lie in [0, 32]");
    HorizonIdentity id;
    id.k = k;
    id.l = l;
    auto add = [&](JetSymbol s, const ExactCoefficient& c) {
        if (c.is_zero()) return;
        auto it = id.coefficients.find(s);
        if (it == id.coefficients.end()) id.coefficients.emplace(s, c);
        else {
            it->second = it->second + c;
            if (it->second.is_zero()) id.coefficients.erase(it);
        }
    };
    // 0 = 2 d_v d_r^{k+1} psi + (2/r)|M d_v d_r^k psi
    //     + sum_{i=1..k} C(k,i) [ D^(i) d_r^{k-i+2} + (2/r)^(i) d_v d_r^{k-i} + R^(i) d_r^{k-i+1} ]
    //     - l(l+1) sum_{i=0..k} C(k,i) (r^-2)^(i) d_r^{k-i}
    add({JetSymbol::dv_dr, k + 1}, ExactCoefficient::integer(2));
    add({JetSymbol::dv_dr, k}, ExactCoefficient(2, 1, -1));
    for (int i = 1; i <= k; ++i) {
        const ExactCoefficient c(binomial(k, i), 1, 0);
        const auto dD = background_horizon_jet(BackgroundSymbol::D, i);
        if (!dD.is_zero()) {
            if (k - i + 2 > k) throw std::logic_error("horizon restriction: top radial order survived");
            add({JetSymbol::dr, k - i + 2}, c * dD);
        }
        add({JetSymbol::dv_dr, k - i}, c * background_horizon_jet(BackgroundSymbol::two_over_r, i));
        const auto dR = background_horizon_jet(BackgroundSymbol::R, i);
        if (!dR.is_zero()) {
            if (k - i + 1 > k) throw std::logic_error("horizon restriction: top radial order survived");
            add({JetSymbol::dr, k - i + 1}, c * dR);
        }
    }
    if (l > 0) {
        const ExactCoefficient ll(-static_cast<long>(l) * (l + 1), 1, 0);
        for (int i = 0; i <= k; ++i) {
            const ExactCoefficient c(binomial(k, i), 1, 0);
            add({JetSymbol::dr, k - i}, ll * c * background_horizon_jet(BackgroundSymbol::inv_r2, i));
        }
    }
    return id;
}

ConservationLaw derive_conservation_law(int l) {
    if (l < 0 || l > 32) throw std::invalid_argument("derive_conservation_law: l must lie in [0, 32]");
    ConservationLaw law;
    law.l = l;
    // Stage 1: for j < l express d_r^j psi = sum_i alpha_i^j d_v d_r^i psi.
    // The pivot (j(j+1) - l(l+1))/M^2 is nonzero for j != l.
    for (int j = 0; j < l; ++j) {
        const HorizonIdentity id = restrict_commuted_wave(j, l);
        const ExactCoefficient pivot = id.coeff({JetSymbol::dr, j});
        if (pivot.is_zero()) throw std::logic_error("derive_conservation_law: vanishing pivot");
        const ExactCoefficient scale = -pivot.inverse();
        std::map<int, ExactCoefficient> expr;
        auto addexpr = [&](int i, const ExactCoefficient& c) {
            if (c.is_zero()) return;
            auto it = expr.find(i);
            if (it == expr.end()) expr.emplace(i, c);
            else {
                it->second = it->second + c;
                if (it->second.is_zero()) expr.erase(it);
            }
        };
        for (const auto& [sym, c] : id.coefficients) {
            if (sym.kind == JetSymbol::dv_dr) {
                addexpr(sym.order, scale * c);
            } else if (sym.order != j) {
                if (sym.order > j) throw std::logic_error("derive_conservation_law: untriangular identity");
                for (const auto& [i, a] : law.alphas[sym.order]) addexpr(i, scale * c * a);
            }
        }
        law.alphas.push_back(std::move(expr));
    }
    // Stage 2: the k = l identity has no d_r^l term; substituting the alpha
    // expressions leaves a pure d_v(...) = 0 statement.
    const HorizonIdentity top = restrict_commuted_wave(l, l);
    if (!top.coeff({JetSymbol::dr, l}).is_zero())
        throw std::logic_error("derive_conservation_law: d_r^l coefficient did not vanish at k = l");
    std::map<int, ExactCoefficient> total;
    auto addtot = [&](int i, const ExactCoefficient& c) {
        if (c.is_zero()) return;
        auto it = total.find(i);
        if (it == total.end()) total.emplace(i, c);
        else {
            it->second = it->second + c;
            if (it->second.is_zero()) total.erase(it);
        }
    };
    for (const auto& [sym, c] : top.coefficients) {
        if (sym.kind == JetSymbol::dv_dr) addtot(sym.order, c);
        else
            for (const auto& [i, a] : law.alphas[sym.order]) addtot(i, c * a);
    }
    const auto lead = total.find(l + 1);
    if (lead == total.end()) throw std::logic_error("derive_conservation_law: no leading term");
    const ExactCoefficient inv = lead->second.inverse();
    law.betas.assign(l + 1, ExactCoefficient());
    for (const auto& [i, c] : total) {
        if (i == l + 1) continue;
        if (i > l + 1) throw std::logic_error("derive_conservation_law: order overflow");
        law.betas[i] = c * inv;
    }
    return law;
}

double ConservationLaw::evaluate(const std::vector<double>& dr_values, double mass) const {
    if (static_cast<int>(dr_values.size()) < l + 2)
        throw std::invalid_argument("ConservationLaw::evaluate: need d_r^0 .. d_r^{l+1}");
    double h = dr_values[l + 1];
    for (int i = 0; i <= l; ++i) h += betas[i].value(mass) * dr_values[i];
    return h;
}

} // namespace horizonlab
