// Closed-form background quantities of the Reissner-Nordstrom exterior and
// transforms between the coordinate charts (t,r), (t,r*), (v,r), (u,v), (t*,r).
//
// Units: the mass M sets the length unit (M = 1 in all shipped configs).
// The extreme case is charge = mass, where the two horizons coincide at r = M
// and the surface gravity vanishes.

#ifndef HORIZONLAB_GEOMETRY_HPP
#define HORIZONLAB_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace horizonlab {

struct BlackHoleBackground {
    double mass = 1.0;    // M > 0
    double charge = 1.0;  // e in [0, M]; e = M is extreme
    double r_plus = 1.0;  // outer root of D
    double r_minus = 1.0; // inner root of D (0 when e = 0)

    static BlackHoleBackground make(double mass, double charge);
    bool extreme() const { return charge == mass; }
};

enum class Chart : std::uint8_t { t_r, t_rstar, v_r, u_v, tstar_r };

std::string chart_name(Chart c);

struct ChartPoint {
    Chart chart;
    double a = 0.0; // first coordinate: t, t, v, u, t*
    double b = 0.0; // second coordinate: r, r*, r, v, r
};

// D(r) = 1 - 2M/r + e^2/r^2 and its exact derivatives d^k D / dr^k.
double metric_potential(const BlackHoleBackground& bg, double r, int order = 0);

// Photon sphere radius Q = (3M/2)(1 + sqrt(1 - 8e^2/(9M^2))); Q = 2M when extreme.
double photon_sphere(const BlackHoleBackground& bg);

enum class Horizon { outer, inner };

// kappa_{+-} = (r_{+-} - r_{-+}) / (2 r_{+-}^2); zero in the extreme case.
double surface_gravity(const BlackHoleBackground& bg, Horizon which);

// Tortoise coordinate with the convention r*(Q) = 0.
// Extreme: r* = r + 2M ln(r - M) - M^2/(r - M) + C.
// Subextreme: r* = r + (1/2k+) ln|(r-r+)/r+| + (1/2k-) ln|(r-r-)/r-| + C.
double tortoise(const BlackHoleBackground& bg, double r);

// Monotone inverse of tortoise; |tortoise(result) - rstar| <= 1e-10 max(1,|rstar|).
double tortoise_inverse(const BlackHoleBackground& bg, double rstar);

ChartPoint chart_convert(const BlackHoleBackground& bg, const ChartPoint& p, Chart target);

// Geometry of the constant-t* slices, t* = v - r.  Induced metric
// h_rr = 2 - D, volume factor V = sqrt(2 - D) (measure V r^2 dr dw),
// future unit normal n = (n^v, n^r) in the (v,r) chart.
struct SliceGeometry {
    double h_rr;
    double volume_factor;
    double n_v;
    double n_r;
};
SliceGeometry slice_geometry(const BlackHoleBackground& bg, double r);

// Mode-reduced wave operator coefficients in a given chart.  Each entry pairs
// a derivative label with its coefficient at radius r for angular frequency l.
struct WaveOperatorCoefficients {
    Chart chart;
    std::vector<std::pair<std::string, double>> terms;
    double coeff(const std::string& label) const;
};
WaveOperatorCoefficients wave_operator_coefficients(const BlackHoleBackground& bg,
                                                    Chart chart, double r, int l);

// Truncated Taylor (jet) arithmetic about a point; used to expand background
// coefficient functions to arbitrary order without finite differencing.
class TaylorSeries {
  public:
    TaylorSeries() = default;
    explicit TaylorSeries(std::vector<double> c) : c_(std::move(c)) {}
    static TaylorSeries constant(double v, std::size_t n);
    // series of r about r0: [r0, 1, 0, ...]
    static TaylorSeries variable(double r0, std::size_t n);
    // series of 1/r^p about r0 > 0 (p >= 1), exact coefficients
    static TaylorSeries inverse_power(double r0, int p, std::size_t n);

    std::size_t size() const { return c_.size(); }
    double operator[](std::size_t k) const { return c_[k]; }
    double& operator[](std::size_t k) { return c_[k]; }
    // k-th derivative value at the expansion point: k! * c_k
    double derivative(std::size_t k) const;

    TaylorSeries operator+(const TaylorSeries& o) const;
    TaylorSeries operator-(const TaylorSeries& o) const;
    TaylorSeries operator*(const TaylorSeries& o) const;
    TaylorSeries operator/(const TaylorSeries& o) const;
    TaylorSeries operator*(double s) const;
    friend TaylorSeries operator-(double s, const TaylorSeries& o);

  private:
    std::vector<double> c_;
};

// Taylor expansions of the background functions about r0.
TaylorSeries series_D(const BlackHoleBackground& bg, double r0, std::size_t n);
TaylorSeries series_R(const BlackHoleBackground& bg, double r0, std::size_t n); // R = D' + 2D/r

} // namespace horizonlab

#endif
