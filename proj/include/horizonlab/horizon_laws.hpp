// Exact derivation of the conservation laws that hold along the degenerate
// event horizon of the extreme background: restricting d_r^k of the wave
// equation to r = M kills the top two radial orders, and for a mode l the
// resulting triangular system yields the conserved quantity
//     H_l[psi] = d_r^{l+1} psi + sum_i beta_i d_r^i psi.
// All arithmetic is exact rational, with the mass carried as a symbolic power.

#ifndef HORIZONLAB_HORIZON_LAWS_HPP
#define HORIZONLAB_HORIZON_LAWS_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <vector>

namespace horizonlab {

// (num/den) * M^mass_power, stored in lowest terms with den > 0.
class ExactCoefficient {
  public:
    using Int = boost::multiprecision::cpp_int;

    ExactCoefficient() = default;
    ExactCoefficient(Int num, Int den, int mass_power);
    static ExactCoefficient integer(long v, int mass_power = 0) {
        return ExactCoefficient(Int(v), Int(1), mass_power);
    }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }
    int mass_power() const { return pow_; }
    bool is_zero() const { return num_ == 0; }

    // add requires equal mass_power (the identities are dimensionally homogeneous)
    ExactCoefficient operator+(const ExactCoefficient& o) const;
    ExactCoefficient operator*(const ExactCoefficient& o) const;
    ExactCoefficient operator-() const;
    ExactCoefficient inverse() const;
    bool operator==(const ExactCoefficient& o) const;

    double value(double mass) const;
    std::string str() const; // e.g. "3/2 M^-1"

  private:
    Int num_ = 0;
    Int den_ = 1;
    int pow_ = 0;
    void normalize();
};

// One symbol of the horizon jet: d_v d_r^order psi  or  d_r^order psi.
struct JetSymbol {
    enum Kind { dv_dr, dr } kind;
    int order;
    bool operator<(const JetSymbol& o) const {
        return kind != o.kind ? kind < o.kind : order < o.order;
    }
    bool operator==(const JetSymbol& o) const { return kind == o.kind && order == o.order; }
    std::string str() const;
};

// The identity 0 = sum coeff(sym) * sym obtained by restricting d_r^k of the
// mode-l wave equation to the horizon.
struct HorizonIdentity {
    int k = 0;
    int l = 0;
    std::map<JetSymbol, ExactCoefficient> coefficients;
    ExactCoefficient coeff(const JetSymbol& s) const; // zero if absent
};

struct ConservationLaw {
    int l = 0;
    std::vector<ExactCoefficient> betas; // beta_0 ... beta_l
    // alpha[j] maps i -> alpha_i^j in  d_r^j psi = sum_i alpha_i^j d_v d_r^i psi  (j < l)
    std::vector<std::map<int, ExactCoefficient>> alphas;
    // H_l evaluated on horizon-jet values {psi, d_r psi, ..., d_r^{l+1} psi}
    double evaluate(const std::vector<double>& dr_values, double mass) const;
};

// Exact i-th r-derivative at r = M (extreme background) of one of the named
// background functions D, R = D' + 2D/r, 2/r, r^-2.
enum class BackgroundSymbol { D, R, two_over_r, inv_r2 };
ExactCoefficient background_horizon_jet(BackgroundSymbol sym, int order);

HorizonIdentity restrict_commuted_wave(int k, int l);

ConservationLaw derive_conservation_law(int l);

} // namespace horizonlab

#endif
