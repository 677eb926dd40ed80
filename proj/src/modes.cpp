#include "twinqft/modes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twinqft {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double mode_prefactor(const ModeLabel& label) {
    const double cube = two_pi * two_pi * two_pi;
    return 1.0 / (cube * 2.0 * label.omega());
}

} // namespace

std::complex<double> mode_value(const ModeLabel& label, const SpacetimePoint& x) {
    const double phase = dot(label.k(), x.r) - label.omega() * x.t;
    return std::polar(mode_prefactor(label), phase);
}

std::complex<double> kg_residual(const ModeLabel& label, const SpacetimePoint& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("difference step must be positive");
    const auto u = [&](double t, const Vec3& r) { return mode_value(label, {t, r}); };
    const std::complex<double> center = u(x.t, x.r);

    auto second = [&](const std::complex<double>& plus, const std::complex<double>& minus) {
        return (plus - 2.0 * center + minus) / (h * h);
    };

    const auto dtt = second(u(x.t + h, x.r), u(x.t - h, x.r));
    const auto dxx = second(u(x.t, {x.r.x + h, x.r.y, x.r.z}), u(x.t, {x.r.x - h, x.r.y, x.r.z}));
    const auto dyy = second(u(x.t, {x.r.x, x.r.y + h, x.r.z}), u(x.t, {x.r.x, x.r.y - h, x.r.z}));
    const auto dzz = second(u(x.t, {x.r.x, x.r.y, x.r.z + h}), u(x.t, {x.r.x, x.r.y, x.r.z - h}));

    const double m = label.mass();
    return dtt - dxx - dyy - dzz - m * m * center;
}

std::complex<double> WavePacket::value(const SpacetimePoint& x) const {
    std::complex<double> s = 0.0;
    for (const auto& term : terms) {
        const auto u = mode_value(term.label, x);
        s += term.coeff * (term.conjugated ? std::conj(u) : u);
    }
    return s;
}

std::complex<double> WavePacket::time_derivative(const SpacetimePoint& x) const {
    std::complex<double> s = 0.0;
    for (const auto& term : terms) {
        const auto u = mode_value(term.label, x);
        const std::complex<double> iw(0.0, term.label.omega());
        // d_t u = -i w u, so the conjugated mode picks up +i w
        s += term.coeff * (term.conjugated ? iw * std::conj(u) : -iw * u);
    }
    return s;
}

namespace {

struct IndexedTerm {
    std::complex<double> coeff;
    std::array<int, 3> n;
    double omega;
    bool conjugated;
};

std::vector<IndexedTerm> index_packet(const WavePacket& p, double box_length, double label_tol,
                                      int& max_index) {
    std::vector<IndexedTerm> out;
    for (const auto& term : p.terms) {
        const std::array<double, 3> kc = {term.label.k().x, term.label.k().y, term.label.k().z};
        std::array<int, 3> n{};
        for (int a = 0; a < 3; ++a) {
            const double raw = kc[a] * box_length / two_pi;
            const double rounded = std::round(raw);
            if (std::abs(raw - rounded) > label_tol * std::max(1.0, std::abs(rounded)))
                throw IncommensurateMode("mode label does not fit the periodic box");
            n[a] = static_cast<int>(rounded);
            max_index = std::max(max_index, std::abs(n[a]));
        }
        out.push_back({term.coeff, n, term.label.omega(), term.conjugated});
    }
    return out;
}

} // namespace

std::complex<double> wronskian(const WavePacket& f, const WavePacket& g, double box_length,
                               int grid_points, double label_tol) {
    if (!(box_length > 0.0)) throw std::invalid_argument("box length must be positive");
    int max_index = 0;
    const auto ft = index_packet(f, box_length, label_tol, max_index);
    const auto gt = index_packet(g, box_length, label_tol, max_index);
    if (grid_points < 2 * max_index + 1)
        throw std::invalid_argument("grid too coarse: need at least 2*(max index)+1 points");

    const int N = grid_points;
    const double cube = two_pi * two_pi * two_pi;

    // Values and time derivatives of both packets on the t = 0 grid. Phases
    // are exact multiples of 2 pi j / N, so plane-wave orthogonality holds to
    // rounding and the sum reproduces the continuum integral.
    auto eval = [&](const std::vector<IndexedTerm>& terms, int j0, int j1, int j2,
                    std::complex<double>& val, std::complex<double>& dval) {
        val = 0.0;
        dval = 0.0;
        for (const auto& term : terms) {
            const double angle = two_pi * (double(term.n[0]) * j0 + double(term.n[1]) * j1 +
                                           double(term.n[2]) * j2) /
                                 double(N);
            const double pref = 1.0 / (cube * 2.0 * term.omega);
            std::complex<double> u = std::polar(pref, term.conjugated ? -angle : angle);
            const std::complex<double> iw(0.0, term.omega);
            val += term.coeff * u;
            dval += term.coeff * (term.conjugated ? iw * u : -iw * u);
        }
    };

    std::complex<double> sum = 0.0;
    for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2) {
                std::complex<double> vf, df, vg, dg;
                eval(ft, j0, j1, j2, vf, df);
                eval(gt, j0, j1, j2, vg, dg);
                sum += std::conj(vf) * dg - std::conj(df) * vg;
            }

    const double cell = box_length / double(N);
    return std::complex<double>(0.0, 1.0) * cell * cell * cell * sum;
}

ModeBoostResidual mode_boost_residual(const LorentzTransform& L, const ModeLabel& label,
                                      const SpacetimePoint& x) {
    const auto act = classify_mode_boost(L, label);

    const FourVector back = L.inverse().apply(x.lift());
    const auto source = mode_value(label, {back.t, back.spatial()});

    auto target = mode_value(act.label, x);
    if (act.flipped()) target = std::conj(target);

    const double ratio = act.label.omega() / label.omega();
    const double compensated = std::abs(source - ratio * target);
    const double phase = std::abs(std::remainder(std::arg(source) - std::arg(target), two_pi));
    return {act.kind, compensated, phase, ratio};
}

} // namespace twinqft
