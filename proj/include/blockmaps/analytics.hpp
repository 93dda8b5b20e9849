#pragma once

#include "blockmaps/bigfixed.hpp"
#include "blockmaps/series.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace blockmaps {

// Phase-transition constants in closed form. All values live at a common
// working scale of print_digits + 12 guard digits; print with
// value.to_string(print_digits).
struct ModelConstants {
    int print_digits = 0;
    int work_digits = 0;
    BigFixed pi;
    BigFixed rho_M;   // radius of the map series, 1/16
    BigFixed rho_B;   // radius of the block series, 4(3pi-8)^2 / (9 pi^2)
    BigFixed rho_A;   // radius of the 2-connected-by-edges series, 2 - 3*2^(-2/3)
    BigFixed u_C;     // critical block weight, 9pi(4-pi) / (420pi - 81pi^2 - 512)
    BigFixed B_rho;   // B(rho_B) = 8 - 64/(3pi)
    BigFixed a1;      // y B'(y) at rho_B: 8(10-3pi)(3pi-8) / (9pi(4-pi))
    BigFixed Bp_rho;  // B'(rho_B) = a1 / rho_B
    BigFixed K_b;     // b_n ~ K_b rho_B^{-n} n^{-3}: 4(3pi-8)^3 / (27pi(4-pi)^3)
    BigFixed s1;      // subcritical amplitude s(u) at u=1: 2/pi
};

ModelConstants closed_constants(int digits);

// Evaluates B and its first two derivatives on [0, rho_B] from the exact
// coefficient table plus a one-term power-law tail estimate; the partial sums
// alone lose ~3 digits at rho_B even with 2000 exact terms. The reported
// error combines twice the next-order tail term with the head rounding.
class BSeriesEval {
public:
    BSeriesEval(const TruncSeries& B, const ModelConstants& mc);

    struct Out {
        BigFixed value;
        double abs_err;
    };

    // deriv in {0,1,2}; y in [0, rho_B]. The second derivative diverges at
    // rho_B itself, so deriv=2 there is a domain error.
    Out eval(const BigFixed& y, int deriv) const;

    long n_exact() const { return N_; }

private:
    std::vector<BigInt> b_;
    long N_;
    int digits_;
    BigFixed rho_;
    double rho_d_, K_d_;
};

// Root of 2yuB'(y) = uB(y)+1-u in (0, rho_B), which exists for u >= u_C;
// bisection (the left side minus the right is increasing in y). For u below
// u_C returns rho_B, the conventional value.
BigFixed solve_y_of_u(const BSeriesEval& be, const ModelConstants& mc, const BigFixed& u);

// Numeric critical weight: the defining equation at y = rho_B is linear in
// u, so u = 1 / (2 rho_B B'(rho_B) - B(rho_B) + 1) directly.
BigFixed numeric_u_C(const BSeriesEval& be, const ModelConstants& mc);

// rho(u) = y(u) / (u B(y(u)) + 1 - u)^2, the singularity location of the
// u-weighted map series.
BigFixed rho_of_u(const BSeriesEval& be, const ModelConstants& mc, const BigFixed& u);

enum class Regime { subcritical, critical, supercritical };

struct RegimeConstants {
    double u = 0;
    Regime regime = Regime::subcritical;
    BigFixed y_u;    // rho_B at and below u_C, else the solved root
    BigFixed rho_u;
    double E_u = 0;  // offspring mean; < 1 strictly below u_C, else 1
    double c_u = 0;  // block-tail constant of the displayed closed form
    // Singular expansion constants; NaN where the regime has none.
    double q = 0, r = 0, s = 0;
    double sigma2 = 0;  // 1 + 2yB''/B' (supercritical only)
    double gamma = 0;   // height scale: sigma/2 above u_C, sqrt(2 c) at u_C
};

RegimeConstants regime_constants(const BSeriesEval& be, const ModelConstants& mc, double u);

struct TrendRow {
    long n;
    double ratio;  // observed / predicted
};

struct TrendReport {
    bool ok = false;
    std::vector<TrendRow> rows;
    std::string note;
};

// r_n = b_n rho_B^n n^3 / K_b at n in checkpoints: requires the final ratio
// within 15% of 1, deviation shrinking, and the last rows monotone.
TrendReport verify_bn_asymptotics(const TruncSeries& B, const ModelConstants& mc,
                                  const std::vector<long>& checkpoints);

// Ratio of the exact [z^n]M(z,u) against the predicted coefficient shape of
// the matching regime.
TrendReport verify_Mu_asymptotics(const TruncSeries& B, const ModelConstants& mc,
                                  const BigRat& u, const std::vector<long>& ns);

// CSV rows "u,y(u)"; fails on a monotonicity violation.
void emit_y_curve(std::ostream& os, const BSeriesEval& be, const ModelConstants& mc,
                  double u_min, double u_max, int steps);

// Rational approximation of the critical weight, round(u_C 10^digits)/10^digits.
// Exact-coefficient experiments "at criticality" use this stand-in.
BigRat u_C_approx(const ModelConstants& mc, int digits = 30);

} // namespace blockmaps
