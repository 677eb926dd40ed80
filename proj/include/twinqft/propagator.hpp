#pragma once

#include <complex>
#include <vector>

#include "twinqft/errors.hpp"
#include "twinqft/kinematics.hpp"

namespace twinqft {

// Spacetime separation reduced to (t, |x|). The momentum-space domain |k| > m
// is rotation invariant, so every quantity here depends on the spatial
// separation only through its length.
struct Interval {
    double t = 0.0;
    double r = 0.0; // radial separation, must be >= 0
};

Interval reduce_interval(const FourVector& x);

// Controls for the regulated radial quadrature and its epsilon -> 0 limit.
//
// A single knob `epsilon` regulates both ends of the integral: the energy
// poles are moved off the real axis by +i*epsilon^2 and the radial integrand
// is damped by exp(-epsilon k). The regulated value is analytic in epsilon,
// so the physical value is recovered by polynomial (Neville) extrapolation
// through a geometric ladder of epsilons from `epsilon` down to
// epsilon * 1e-2 over `extrapolation_steps` rungs.
struct QuadratureParams {
    double epsilon = 1e-2;    // largest regulator of the ladder, in units of m (of 1 when m = 0)
    double k_max = 0.0;       // radial cutoff where the analytic tail takes over; 0 = automatic
    double rel_tol = 1e-6;    // requested relative accuracy of the final value
    int extrapolation_steps = 5;
};

// Value plus the estimated absolute error (quadrature budget + size of the
// last extrapolation correction).
struct EvalResult {
    std::complex<double> value;
    double err_estimate = 0.0;
};

// Time-ordered two-point function of the tachyonic field with the momentum
// integration restricted to |k| > m:
//
//   D_F(x) = int_{|k|>m} d^4k/(2pi)^4 i exp(-i k.x) / (k^2 + m^2 + i eps)
//
// with metric (+,-,-,-), evaluated through the contour-reduced radial form
//
//   D_F(t, r) = 1/(4 pi^2 r) int_m^inf dk k sin(kr) exp(-i z(k)|t|) / z(k),
//   z(k) = sqrt(k^2 - m^2 - i eps^2)  (principal branch),
//
// Abel-damped by exp(-eps k) and extrapolated eps -> 0. m = 0 is accepted and
// reproduces the ordinary massless Feynman propagator 1/(4 pi^2 (r^2 - t^2)).
//
// Throws SingularPoint at t = r = 0 and NonConvergent when the error
// estimate cannot be brought below rel_tol * |value|.
std::complex<double> feynman_propagator(const Interval& x, double m, const QuadratureParams& q = {});
std::complex<double> feynman_propagator(const FourVector& x, double m, const QuadratureParams& q = {});

// Same evaluation, returning the error estimate alongside the value.
EvalResult feynman_propagator_eval(const Interval& x, double m, const QuadratureParams& q = {});

// Independent cross-check of the same regulated integral at one fixed
// epsilon: the energy integral
//
//   G(k) = int dk0 exp(-i k0 t) / (k0^2 - omega_k^2 + i eps^2),  omega_k^2 = k^2 - m^2,
//
// is done by brute-force quadrature over k0 (no residue shortcut), then the
// radial integral is done on a plain k grid rather than the rescaled grid the
// main path uses. Both paths splice on the same asymptotic tail beyond k_max,
// which carries its own truncation bound; the frozen external anchors in the
// test suite cover head and tail together.
EvalResult feynman_propagator_oracle(const Interval& x, double m, double epsilon,
                                     const QuadratureParams& grid = {});

enum class Dispersion {
    tachyonic, // omega = sqrt(k^2 - m^2), integration over |k| > m
    ordinary   // omega = sqrt(k^2 + m^2), integration over all k
};

// c-number commutator function
//
//   PJ(x) = int d^3k/((2pi)^3 2 omega_k) (exp(-i k.x) - exp(+i k.x)),
//
// Abel-damped and extrapolated like the propagator (the integrand has no
// pole, so only the damping is regulated away). Odd in t. The ordinary
// dispersion is the microcausality control: it vanishes at spacelike
// separation, while the tachyonic one does not.
std::complex<double> pauli_jordan(const Interval& x, double m, Dispersion dispersion,
                                  const QuadratureParams& q = {});
EvalResult pauli_jordan_eval(const Interval& x, double m, Dispersion dispersion,
                             const QuadratureParams& q = {});

// One evaluated point of an invariance scan. boost_speed = 0 marks the
// unboosted reference evaluation of each point.
struct ScanRow {
    double t = 0.0;
    double r = 0.0;
    double boost_speed = 0.0;
    double re = 0.0;
    double im = 0.0;
    double err_estimate = 0.0;
};

struct InvarianceScanResult {
    std::vector<ScanRow> rows;
    // max over (point, boost) of |D(x) - D(Lx)| / |D(x)|
    double max_rel_deviation = 0.0;
    // same maximum taken over the real parts alone: the on-shell sheet of the
    // integrand lives on the invariant hyperboloid and its contribution (the
    // real part) is frame independent; the principal-value sheet integrates
    // over the frame-dependent region |k| > m and is not. See README.
    double max_real_part_deviation = 0.0;
};

// Evaluates the propagator at every x and every Lx and tabulates deviations.
// Pure function of its inputs; rows appear in input order (point-major).
InvarianceScanResult invariance_scan(const std::vector<FourVector>& points,
                                     const std::vector<LorentzTransform>& boosts, double m,
                                     const QuadratureParams& q = {});

// Principal-branch exponential integral E1 for complex arguments off the
// negative real axis (power series for small |z|, modified Lentz continued
// fraction otherwise). Used by the analytic tails; exposed for tests.
std::complex<double> expint_e1(std::complex<double> z);

} // namespace twinqft
