#include "twinqft/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace twinqft {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double euler_gamma = 0.57721566490153286060651209008240243;
const std::complex<double> iu(0.0, 1.0);

// ---------------------------------------------------------------------------
// 15-point Kronrod panel with embedded 7-point Gauss rule. The constants are
// validated by polynomial-exactness tests (Gauss to degree 13, Kronrod to 22).
// ---------------------------------------------------------------------------

constexpr double gk_x[8] = {
    0.991455371120812639206854697526329, // Kronrod
    0.949107912342758524526189684047851, // Gauss
    0.864864423359769072789712788640926, // Kronrod
    0.741531185599394439863864773280788, // Gauss
    0.586087235467691130294144838258730, // Kronrod
    0.405845151377397166906606412076961, // Gauss
    0.207784955007898467600689403773245, // Kronrod
    0.000000000000000000000000000000000,
};
constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a, b;
    std::complex<double> val;
    double err;
    double resabs;
};

template <typename F>
Panel gk15_panel(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    const std::complex<double> fc = f(mid);
    std::array<std::complex<double>, 7> fp, fm;
    std::complex<double> resk = gk_wk[7] * fc;
    std::complex<double> resg = gk_wg[3] * fc;
    double resabs = gk_wk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        fp[j] = f(mid + h * gk_x[j]);
        fm[j] = f(mid - h * gk_x[j]);
        resk += gk_wk[j] * (fp[j] + fm[j]);
        resabs += gk_wk[j] * (std::abs(fp[j]) + std::abs(fm[j]));
    }
    for (int j = 0; j < 3; ++j) resg += gk_wg[j] * (fp[2 * j + 1] + fm[2 * j + 1]);

    const std::complex<double> reskh = resk * 0.5;
    double resasc = gk_wk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk_wk[j] * (std::abs(fp[j] - reskh) + std::abs(fm[j] - reskh));

    double err = std::abs(resk - resg) * h;
    resasc *= h;
    resabs *= h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
    return {a, b, resk * h, err, resabs};
}

struct QuadOut {
    std::complex<double> val;
    double err;
    double resabs;
};

// Globally adaptive bisection over seeded breakpoints: keeps splitting the
// worst panel until the summed error drops under the goal or the panel budget
// runs out. Never throws on its own; the caller judges the returned estimate.
template <typename F>
QuadOut adaptive_quad(const F& f, std::vector<double> pts, double rel_goal, int max_panels) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 2) throw std::invalid_argument("adaptive_quad: degenerate range");

    auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);

    std::complex<double> total = 0.0;
    double err = 0.0, resabs = 0.0;
    int n_panels = 0;
    auto push = [&](double a, double b) {
        const Panel p = gk15_panel(f, a, b);
        total += p.val;
        err += p.err;
        resabs += p.resabs;
        heap.push(p);
        ++n_panels;
    };
    for (size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1]);

    auto goal = [&] {
        return std::max(rel_goal * std::abs(total), 5e-16 * resabs);
    };
    while (err > goal() && n_panels < max_panels && !heap.empty()) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) continue; // panel at machine resolution
        total -= worst.val;
        err -= worst.err;
        resabs -= worst.resabs;
        --n_panels;
        push(worst.a, mid);
        push(mid, worst.b);
    }
    return {total, err, resabs};
}

// ---------------------------------------------------------------------------
// Analytic tails. Beyond the cutoff K0 every integrand here has the shape
// P(k) exp(beta k) with Re beta = -eps < 0 and P given by a 1/k series, so the
// remainder reduces to moments T_n(beta) = int_K0^inf k^{-n} exp(beta k) dk
//                                       = K0^{1-n} E_n(-beta K0).
// ---------------------------------------------------------------------------

std::vector<std::complex<double>> tail_moments(std::complex<double> beta, double k0, int count,
                                               int shift) {
    const std::complex<double> x = -beta * k0;
    const std::complex<double> em = std::exp(-x);
    const int nmax = shift + count - 1;
    std::vector<std::complex<double>> en(static_cast<size_t>(std::max(nmax, 1)) + 1);
    en[1] = expint_e1(x);
    for (int n = 1; n < nmax; ++n) en[n + 1] = (em - x * en[n]) / double(n);

    std::vector<std::complex<double>> t(count);
    double kpow = std::pow(k0, 1.0 - shift);
    for (int i = 0; i < count; ++i) {
        const int n = shift + i;
        std::complex<double> e_n;
        if (n == -1)
            e_n = em * (1.0 / x + 1.0 / (x * x));
        else if (n == 0)
            e_n = em / x;
        else
            e_n = en[n];
        t[i] = kpow * e_n;
        kpow /= k0;
    }
    return t;
}

// Series of (k/z) exp(i sigma (z - k)) in powers of 1/k, where
// z = k sqrt(1 - mu/k^2). Both factors expand through the binomial series of
// sqrt(1 - s); the exponential is composed by the usual power-series
// recurrence a_n = (1/n) sum q e_q a_{n-q}.
std::vector<std::complex<double>> prefactor_series(std::complex<double> mu, double sigma, int n_terms) {
    std::vector<std::complex<double>> e(n_terms, 0.0), a(n_terms, 0.0), p(n_terms, 0.0);

    // (z - k) = -sum_{j>=1} w_{2j-1} k^{1-2j} with w_{2j-1} = -g_j mu^j,
    // g_j the sqrt(1-s) binomial coefficients.
    std::complex<double> g = 1.0, mup = 1.0;
    for (int j = 1; 2 * j - 1 < n_terms; ++j) {
        g *= double(2 * j - 3) / double(2 * j);
        mup *= mu;
        e[2 * j - 1] = std::complex<double>(0.0, -sigma) * (-g * mup);
    }
    a[0] = 1.0;
    for (int n = 1; n < n_terms; ++n) {
        std::complex<double> s = 0.0;
        for (int q = 1; q <= n; ++q) s += double(q) * e[q] * a[n - q];
        a[n] = s / double(n);
    }
    // k/z = 1/sqrt(1 - mu/k^2) = sum_j h_j mu^j k^{-2j}
    std::complex<double> h = 1.0;
    mup = 1.0;
    for (int j = 0; 2 * j < n_terms; ++j) {
        if (j > 0) {
            h *= double(2 * j - 1) / double(2 * j);
            mup *= mu;
        }
        for (int n = 2 * j; n < n_terms; ++n) p[n] += h * mup * a[n - 2 * j];
    }
    return p;
}

struct TailOut {
    std::complex<double> val;
    double err;
};

TailOut tail_series(const std::vector<std::complex<double>>& p, std::complex<double> beta,
                    double k0, int shift) {
    const auto t = tail_moments(beta, k0, static_cast<int>(p.size()), shift);
    std::complex<double> s = 0.0;
    double last = 0.0;
    int quiet = 0;
    for (size_t n = 0; n < p.size(); ++n) {
        const std::complex<double> term = p[n] * t[n];
        s += term;
        const double mag = std::abs(term);
        // At sigma = 0 the series has only even powers, so a single vanishing
        // term proves nothing; stop only after two negligible terms in a row.
        if (mag < 1e-18 * std::abs(s)) {
            if (++quiet >= 2) return {s, mag + last};
        } else {
            quiet = 0;
        }
        last = mag;
    }
    return {s, 4.0 * last}; // series not visibly settled: inflate the bound
}

constexpr int tail_terms = 16;

// ---------------------------------------------------------------------------
// Fixed-epsilon radial evaluations
// ---------------------------------------------------------------------------

double auto_k_max(double t_abs, double r, double m) {
    return std::max({40.0 * (1.0 + m), 10.0 * (1.0 + t_abs) * (1.0 + m * m),
                     3.0 * (r + t_abs + 1.0)});
}

void append_cluster(std::vector<double>& pts, double origin, double width, double lo, double hi) {
    for (double f : {0.25, 1.0, 4.0, 16.0, 64.0}) {
        const double below = origin - f * width, above = origin + f * width;
        if (below > lo && below < hi) pts.push_back(below);
        if (above > lo && above < hi) pts.push_back(above);
    }
}

void append_march(std::vector<double>& pts, double from, double to, double step) {
    for (double v = from; v < to && pts.size() < 20000; v += step) pts.push_back(v);
}

struct RungOut {
    std::complex<double> val;
    double err;
    double resabs;
};

RungOut feynman_rung(double t_abs, double r, double m, double eps, double k0, double rel_goal,
                     int max_panels) {
    const std::complex<double> mu(m * m, eps * eps); // z^2 = k^2 - mu
    const double freq = r + t_abs + 1.0;

    QuadOut head;
    if (m > 0.0) {
        // k = m cosh u keeps the edge factor 1/z integrable with an O(eps/m)
        // feature at u = 0 instead of an O(eps^2/m) one at k = m.
        const double u_max = std::acosh(k0 / m);
        auto f = [&](double u) {
            const double sh = std::sinh(u), ch = std::cosh(u);
            const double k = m * ch, msh = m * sh;
            const std::complex<double> z =
                std::sqrt(std::complex<double>(msh * msh, -eps * eps));
            const std::complex<double> osc =
                std::exp(std::complex<double>(-eps * k, 0.0) - iu * (z * t_abs));
            const std::complex<double> weight = (r > 0.0) ? std::sin(k * r) * (msh / z)
                                                          : k * (msh / z);
            return k * weight * osc;
        };
        std::vector<double> pts{0.0, u_max};
        append_cluster(pts, 0.0, eps / m, 0.0, u_max);
        double u = std::min(0.05, u_max);
        while (u < u_max && pts.size() < 20000) {
            pts.push_back(u);
            u += 2.0 * pi / (m * std::sinh(u) * freq + 1.0);
        }
        head = adaptive_quad(f, std::move(pts), rel_goal, max_panels);
    } else {
        auto f = [&](double k) {
            const std::complex<double> z = std::sqrt(std::complex<double>(k * k, -eps * eps));
            const std::complex<double> osc =
                std::exp(std::complex<double>(-eps * k, 0.0) - iu * (z * t_abs));
            const std::complex<double> weight = (r > 0.0) ? std::sin(k * r) / z : k / z;
            return k * weight * osc;
        };
        std::vector<double> pts{0.0, k0};
        append_cluster(pts, 0.0, eps, 0.0, k0);
        append_march(pts, 2.0 * pi / freq, k0, 2.0 * pi / freq);
        head = adaptive_quad(f, std::move(pts), rel_goal, max_panels);
    }

    const auto p = prefactor_series(mu, -t_abs, tail_terms);
    std::complex<double> tail = 0.0;
    double tail_err = 0.0;
    if (r > 0.0) {
        for (int s : {1, -1}) {
            const std::complex<double> beta(-eps, s * r - t_abs);
            const TailOut ts = tail_series(p, beta, k0, 0);
            tail += std::complex<double>(0.0, -0.5 * s) * ts.val; // s/(2i)
            tail_err += 0.5 * ts.err;
        }
    } else {
        const std::complex<double> beta(-eps, -t_abs);
        const TailOut ts = tail_series(p, beta, k0, -1);
        tail += ts.val;
        tail_err += ts.err;
    }

    const double norm = (r > 0.0) ? 1.0 / (4.0 * pi * pi * r) : 1.0 / (4.0 * pi * pi);
    return {(head.val + tail) * norm, (head.err + tail_err) * norm, head.resabs * norm};
}

RungOut pauli_jordan_rung(double t, double r, double m, Dispersion disp, double eps, double k0,
                          double rel_goal, int max_panels) {
    if (t == 0.0) return {0.0, 0.0, 0.0}; // integrand vanishes identically
    const double t_abs = std::abs(t);
    const double sign_t = (t > 0.0) ? 1.0 : -1.0;
    const bool tach = disp == Dispersion::tachyonic;
    const double lo = tach ? m : 0.0;
    const std::complex<double> mu = tach ? std::complex<double>(m * m, 0.0)
                                         : std::complex<double>(-m * m, 0.0);
    const double freq = r + t_abs + 1.0;

    // sin(omega t)/omega continues analytically through omega = 0
    auto osc_t = [&](double omega) {
        const double x = omega * t_abs;
        if (std::abs(x) < 1e-4) return t_abs * (1.0 - x * x / 6.0 * (1.0 - x * x / 20.0));
        return std::sin(x) / omega;
    };
    auto f = [&](double k) {
        const double omega = tach ? std::sqrt(std::max((k - m) * (k + m), 0.0))
                                  : std::sqrt(k * k + m * m);
        const double weight = (r > 0.0) ? std::sin(k * r) : k;
        return std::complex<double>(k * weight * osc_t(omega) * std::exp(-eps * k), 0.0);
    };
    std::vector<double> pts{lo, k0};
    append_march(pts, lo + 2.0 * pi / freq, k0, 2.0 * pi / freq);
    pts.push_back(lo + 0.1);
    pts.push_back(lo + 0.5);
    const QuadOut head = adaptive_quad(f, std::move(pts), rel_goal, max_panels);

    std::complex<double> tail = 0.0;
    double tail_err = 0.0;
    if (r > 0.0) {
        // sin(kr) sin(omega t) = -(1/4) sum_{sr,st} sr st exp(i(sr r + st t)k) x corrections
        for (int sr : {1, -1})
            for (int st : {1, -1}) {
                const auto p = prefactor_series(mu, st * t_abs, tail_terms);
                const std::complex<double> beta(-eps, sr * r + st * t_abs);
                const TailOut ts = tail_series(p, beta, k0, 0);
                tail += -0.25 * double(sr) * double(st) * ts.val;
                tail_err += 0.25 * ts.err;
            }
    } else {
        for (int st : {1, -1}) {
            const auto p = prefactor_series(mu, st * t_abs, tail_terms);
            const std::complex<double> beta(-eps, st * t_abs);
            const TailOut ts = tail_series(p, beta, k0, -1);
            tail += std::complex<double>(0.0, -0.5 * st) * ts.val; // st/(2i)
            tail_err += 0.5 * ts.err;
        }
    }

    const double norm = (r > 0.0) ? 1.0 / (2.0 * pi * pi * r) : 1.0 / (2.0 * pi * pi);
    const std::complex<double> w = head.val + tail;
    return {-iu * sign_t * w * norm, (head.err + tail_err) * norm, head.resabs * norm};
}

// ---------------------------------------------------------------------------
// Neville extrapolation of the regulator ladder to eps = 0
// ---------------------------------------------------------------------------

struct NevilleOut {
    std::complex<double> value;
    double correction; // |last diagonal step|, the extrapolation error measure
};

NevilleOut neville_to_zero(const std::vector<double>& xs, std::vector<std::complex<double>> t) {
    const int n = static_cast<int>(t.size());
    std::complex<double> prev = t[0];
    for (int m = 1; m < n; ++m) {
        for (int i = 0; i + m < n; ++i)
            t[i] = (xs[i + m] * t[i] - xs[i] * t[i + 1]) / (xs[i + m] - xs[i]);
        if (m == n - 2) prev = t[0];
    }
    return {t[0], (n > 1) ? std::abs(t[0] - prev) : 0.0};
}

std::vector<double> neville_zero_weights(const std::vector<double>& xs) {
    const int n = static_cast<int>(xs.size());
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> t(n, 0.0);
        t[j] = 1.0;
        for (int m = 1; m < n; ++m)
            for (int i = 0; i + m < n; ++i)
                t[i] = (xs[i + m] * t[i] - xs[i] * t[i + 1]) / (xs[i + m] - xs[i]);
        w[j] = t[0];
    }
    return w;
}

// Geometric ladder from eps0 down two decades, matching the documented
// default 1e-2 m ... 1e-4 m at 5 steps.
std::vector<double> epsilon_ladder(double eps0, int steps) {
    std::vector<double> eps(steps);
    const double rho = (steps > 1) ? std::pow(1e-2, 1.0 / (steps - 1)) : 1.0;
    double e = eps0;
    for (int j = 0; j < steps; ++j, e *= rho) eps[j] = e;
    return eps;
}

template <typename Rung>
EvalResult extrapolate_ladder(const Rung& rung, double eps0, int steps, double rel_tol) {
    EvalResult best{0.0, std::numeric_limits<double>::infinity()};
    const auto eps = epsilon_ladder(eps0, steps);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double goal = rel_tol / 32.0 / (attempt ? 16.0 : 1.0);
        std::vector<std::complex<double>> vals(steps);
        std::vector<double> errs(steps);
        for (int j = 0; j < steps; ++j) {
            const RungOut out = rung(eps[j], goal);
            vals[j] = out.val;
            errs[j] = std::max(out.err, 1e-13 * std::max(1.0, out.resabs));
        }
        if (steps == 1) return {vals[0], errs[0]};
        const NevilleOut nv = neville_to_zero(eps, vals);
        const auto w = neville_zero_weights(eps);
        double quad = 0.0;
        for (int j = 0; j < steps; ++j) quad += std::abs(w[j]) * errs[j];
        const double err = nv.correction + quad;
        if (err < best.err_estimate) best = {nv.value, err};
        if (err <= rel_tol * std::abs(nv.value)) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

void check_interval(const Interval& x, const char* who) {
    if (!std::isfinite(x.t) || !std::isfinite(x.r))
        throw std::invalid_argument(std::string(who) + ": non-finite interval");
    if (x.r < 0.0) throw std::invalid_argument(std::string(who) + ": negative radial separation");
    if (x.t == 0.0 && x.r == 0.0) throw SingularPoint(std::string(who) + ": t = r = 0 is the contact singularity");
}

void check_mass(double m, const char* who) {
    if (!(m >= 0.0) || !std::isfinite(m))
        throw std::invalid_argument(std::string(who) + ": mass must be finite and >= 0");
}

void check_params(const QuadratureParams& q, const char* who) {
    if (!(q.epsilon > 0.0) || !std::isfinite(q.epsilon))
        throw std::invalid_argument(std::string(who) + ": epsilon must be positive");
    if (!(q.rel_tol > 0.0) || q.rel_tol > 0.1)
        throw std::invalid_argument(std::string(who) + ": rel_tol must lie in (0, 0.1]");
    if (q.extrapolation_steps < 1 || q.extrapolation_steps > 12)
        throw std::invalid_argument(std::string(who) + ": extrapolation_steps must lie in [1, 12]");
    if (q.k_max < 0.0 || !std::isfinite(q.k_max))
        throw std::invalid_argument(std::string(who) + ": k_max must be finite and >= 0");
}

double resolve_k_max(const QuadratureParams& q, double t_abs, double r, double m) {
    if (q.k_max > 0.0) return std::max(q.k_max, m + 1.0);
    return auto_k_max(t_abs, r, m);
}

// err <= rel_tol |value|, except that a value indistinguishable from zero at
// quadrature resolution is reported as converged rather than rejected.
void enforce_tolerance(const EvalResult& e, double rel_tol, const char* who) {
    if (e.err_estimate <= rel_tol * std::abs(e.value)) return;
    if (e.err_estimate <= 1e-10 * std::max(1.0, std::abs(e.value))) return;
    std::ostringstream os;
    os << who << ": error estimate " << e.err_estimate << " exceeds rel_tol * |value| = "
       << rel_tol * std::abs(e.value);
    throw NonConvergent(os.str());
}

double boost_speed_of(const LorentzTransform& l) {
    const FourVector u = l.apply({1.0, 0.0, 0.0, 0.0});
    return u.spatial().norm() / u.t;
}

constexpr int default_max_panels = 4000;

} // namespace

Interval reduce_interval(const FourVector& x) { return {x.t, x.spatial().norm()}; }

EvalResult feynman_propagator_eval(const Interval& x, double m, const QuadratureParams& q) {
    check_interval(x, "feynman_propagator");
    check_mass(m, "feynman_propagator");
    check_params(q, "feynman_propagator");
    const double t_abs = std::abs(x.t);
    const double scale = (m > 0.0) ? m : 1.0;
    const double k0 = resolve_k_max(q, t_abs, x.r, m);
    auto rung = [&](double eps, double goal) {
        return feynman_rung(t_abs, x.r, m, eps, k0, goal, default_max_panels);
    };
    return extrapolate_ladder(rung, q.epsilon * scale, q.extrapolation_steps, q.rel_tol);
}

std::complex<double> feynman_propagator(const Interval& x, double m, const QuadratureParams& q) {
    const EvalResult e = feynman_propagator_eval(x, m, q);
    enforce_tolerance(e, q.rel_tol, "feynman_propagator");
    return e.value;
}

std::complex<double> feynman_propagator(const FourVector& x, double m, const QuadratureParams& q) {
    return feynman_propagator(reduce_interval(x), m, q);
}

EvalResult pauli_jordan_eval(const Interval& x, double m, Dispersion dispersion,
                             const QuadratureParams& q) {
    check_interval(x, "pauli_jordan");
    check_mass(m, "pauli_jordan");
    check_params(q, "pauli_jordan");
    const double scale = (m > 0.0) ? m : 1.0;
    const double k0 = resolve_k_max(q, std::abs(x.t), x.r, m);
    auto rung = [&](double eps, double goal) {
        return pauli_jordan_rung(x.t, x.r, m, dispersion, eps, k0, goal, default_max_panels);
    };
    return extrapolate_ladder(rung, q.epsilon * scale, q.extrapolation_steps, q.rel_tol);
}

std::complex<double> pauli_jordan(const Interval& x, double m, Dispersion dispersion,
                                  const QuadratureParams& q) {
    const EvalResult e = pauli_jordan_eval(x, m, dispersion, q);
    enforce_tolerance(e, q.rel_tol, "pauli_jordan");
    return e.value;
}

EvalResult feynman_propagator_oracle(const Interval& x, double m, double epsilon,
                                     const QuadratureParams& grid) {
    check_interval(x, "feynman_propagator_oracle");
    check_mass(m, "feynman_propagator_oracle");
    check_params(grid, "feynman_propagator_oracle");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("feynman_propagator_oracle: epsilon must be positive");

    const double t_abs = std::abs(x.t);
    const double r = x.r;
    const double eps = epsilon;
    // The tail moments are exact here (the energy integral has a closed
    // residue form past the cutoff), so the oracle can hand over to them much
    // earlier than the main path without losing accuracy.
    const double k0 = (grid.k_max > 0.0)
                          ? std::max(grid.k_max, m + 1.0)
                          : std::max({20.0 * (1.0 + m), 6.0 * (1.0 + t_abs) * (1.0 + m * m),
                                      2.0 * (r + t_abs + 1.0)});
    const double goal = grid.rel_tol;

    // Energy integral at one radial node, 2 int_0^k0max cos(k0 t)/(k0^2 - w^2) dk0
    // with w^2 = omega^2 - i eps^2, finished by the exact partial-fraction tail.
    auto g_energy = [&](double k) {
        const double om2 = (k - m) * (k + m);
        const double om = std::sqrt(std::max(om2, 0.0));
        const std::complex<double> w = std::sqrt(std::complex<double>(om2, -eps * eps));
        const double k0max = om + 15.0 * (1.0 + 1.0 / (1.0 + t_abs));
        auto f = [&](double q0) {
            return 2.0 * std::cos(q0 * t_abs) /
                   (std::complex<double>(q0 * q0 - om2, eps * eps));
        };
        std::vector<double> pts{0.0, k0max};
        append_cluster(pts, om, eps * eps / (2.0 * std::abs(w)), 0.0, k0max);
        if (t_abs > 1e-9) append_march(pts, pi / t_abs, k0max, pi / t_abs);
        const QuadOut inner = adaptive_quad(f, std::move(pts), goal / 8.0, 3000);

        std::complex<double> tail;
        if (t_abs < 1e-12) {
            tail = std::log((k0max + w) / (k0max - w)) / w;
        } else {
            tail = 0.0;
            for (int s : {1, -1}) {
                const std::complex<double> zm = -double(s) * iu * (k0max - w) * t_abs;
                const std::complex<double> zp = -double(s) * iu * (k0max + w) * t_abs;
                tail += std::exp(double(s) * iu * w * t_abs) * expint_e1(zm) -
                        std::exp(-double(s) * iu * w * t_abs) * expint_e1(zp);
            }
            tail /= 2.0 * w;
        }
        return inner.val + tail;
    };

    auto f_radial = [&](double k) {
        const double weight = (r > 0.0) ? std::sin(k * r) : k;
        return k * weight * std::exp(-eps * k) * g_energy(k);
    };
    std::vector<double> pts{m, k0};
    if (m > 0.0)
        append_cluster(pts, m, eps * eps / (2.0 * m), m, k0);
    else
        append_cluster(pts, 0.0, eps, 0.0, k0);
    append_march(pts, m + 2.0 * pi / (r + t_abs + 1.0), k0, 2.0 * pi / (r + t_abs + 1.0));
    const QuadOut radial = adaptive_quad(f_radial, std::move(pts), goal / 4.0, 2000);

    // Beyond k0 the energy integral equals its residue value exactly, so the
    // remainder is -i pi times the same moment series the main path uses.
    const auto p = prefactor_series(std::complex<double>(m * m, eps * eps), -t_abs, tail_terms);
    std::complex<double> tail = 0.0;
    double tail_err = 0.0;
    if (r > 0.0) {
        for (int s : {1, -1}) {
            const std::complex<double> beta(-eps, s * r - t_abs);
            const TailOut ts = tail_series(p, beta, k0, 0);
            tail += std::complex<double>(0.0, -0.5 * s) * ts.val;
            tail_err += 0.5 * ts.err;
        }
    } else {
        const std::complex<double> beta(-eps, -t_abs);
        const TailOut ts = tail_series(p, beta, k0, -1);
        tail += ts.val;
        tail_err += ts.err;
    }
    tail *= -iu * pi;
    tail_err *= pi;

    const double norm = (r > 0.0) ? 1.0 / (4.0 * pi * pi * pi * r) : 1.0 / (4.0 * pi * pi * pi);
    const std::complex<double> total = radial.val + tail;
    // factor 2 hedges the panel estimator, which can run slightly hot on the
    // narrow |k| = m spike of the integrand
    const double err = 2.0 * radial.err + tail_err + (goal / 8.0) * radial.resabs;
    return {iu * total * norm, err * norm};
}

InvarianceScanResult invariance_scan(const std::vector<FourVector>& points,
                                     const std::vector<LorentzTransform>& boosts, double m,
                                     const QuadratureParams& q) {
    InvarianceScanResult out;
    for (const FourVector& x : points) {
        const Interval base = reduce_interval(x);
        const EvalResult b = feynman_propagator_eval(base, m, q);
        out.rows.push_back({base.t, base.r, 0.0, b.value.real(), b.value.imag(), b.err_estimate});
        for (const LorentzTransform& l : boosts) {
            const Interval moved = reduce_interval(l.apply(x));
            const EvalResult e = feynman_propagator_eval(moved, m, q);
            out.rows.push_back({moved.t, moved.r, boost_speed_of(l), e.value.real(),
                                e.value.imag(), e.err_estimate});
            const double denom = std::abs(b.value);
            if (denom > 0.0)
                out.max_rel_deviation =
                    std::max(out.max_rel_deviation, std::abs(e.value - b.value) / denom);
            const double re_denom = std::abs(b.value.real());
            if (re_denom > 0.0)
                out.max_real_part_deviation =
                    std::max(out.max_real_part_deviation,
                             std::abs(e.value.real() - b.value.real()) / re_denom);
        }
    }
    return out;
}

std::complex<double> expint_e1(std::complex<double> z) {
    if (z == 0.0) throw std::invalid_argument("expint_e1: argument must be nonzero");
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw std::invalid_argument("expint_e1: branch cut on the negative real axis");
    const double az = std::abs(z);
    if (az <= 3.5) {
        // E1(z) = -gamma - log z + sum (-1)^{n+1} z^n / (n n!)
        std::complex<double> sum = 0.0, p = 1.0;
        for (int n = 1; n <= 64; ++n) {
            p *= z / double(n);
            const std::complex<double> term = ((n & 1) ? p : -p) / double(n);
            sum += term;
            if (double(n) > az && std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return -euler_gamma - std::log(z) + sum;
    }
    // modified Lentz on E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
    std::complex<double> f(1e-30, 0.0), c = f, d = 0.0;
    for (int j = 1; j <= 400; ++j) {
        const std::complex<double> a =
            (j == 1) ? std::complex<double>(1.0, 0.0)
                     : std::complex<double>(-double(j - 1) * double(j - 1), 0.0);
        const std::complex<double> b = z + double(2 * j - 1);
        d = b + a * d;
        if (d == 0.0) d = 1e-30;
        c = b + a / c;
        if (c == 0.0) c = 1e-30;
        d = 1.0 / d;
        const std::complex<double> delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return std::exp(-z) * f;
    }
    throw NonConvergent("expint_e1: continued fraction stalled");
}

} // namespace twinqft
