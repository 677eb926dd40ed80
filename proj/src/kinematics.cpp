#include "twinqft/kinematics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace twinqft {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

std::ostream& operator<<(std::ostream& os, const FourVector& v) {
    return os << "(" << v.t << "; " << v.x << ", " << v.y << ", " << v.z << ")";
}

namespace {

constexpr std::array<double, 4> metric_diag = {1.0, -1.0, -1.0, -1.0};

double det4(const LorentzTransform::Matrix& m) {
    double det = 0.0;
    for (int c = 0; c < 4; ++c) {
        std::array<std::array<double, 3>, 3> sub{};
        for (int i = 1; i < 4; ++i) {
            int sj = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == c) continue;
                sub[i - 1][sj++] = m[i][j];
            }
        }
        const double minor = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
                             sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
                             sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
        det += ((c % 2 == 0) ? 1.0 : -1.0) * m[0][c] * minor;
    }
    return det;
}

} // namespace

double lorentz_defect(const LorentzTransform::Matrix& m) {
    double worst = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            double s = 0.0;
            for (int c = 0; c < 4; ++c) s += m[c][a] * metric_diag[c] * m[c][b];
            const double want = (a == b) ? metric_diag[a] : 0.0;
            worst = std::max(worst, std::abs(s - want));
        }
    }
    return worst;
}

LorentzTransform LorentzTransform::identity() {
    LorentzTransform L;
    for (int i = 0; i < 4; ++i) L.m_mat[i][i] = 1.0;
    return L;
}

LorentzTransform LorentzTransform::boost(const Vec3& axis, double speed) {
    if (!(std::abs(speed) < 1.0))
        throw std::invalid_argument("boost speed must satisfy |v| < 1");
    const double n = axis.norm();
    if (n == 0.0) throw std::invalid_argument("boost axis must be nonzero");
    const Vec3 e{axis.x / n, axis.y / n, axis.z / n};

    const double gamma = 1.0 / std::sqrt(1.0 - speed * speed);
    LorentzTransform L = identity();
    L.m_mat[0][0] = gamma;
    const std::array<double, 3> ev = {e.x, e.y, e.z};
    for (int i = 0; i < 3; ++i) {
        L.m_mat[0][i + 1] = -gamma * speed * ev[i];
        L.m_mat[i + 1][0] = -gamma * speed * ev[i];
        for (int j = 0; j < 3; ++j)
            L.m_mat[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + (gamma - 1.0) * ev[i] * ev[j];
    }
    return L;
}

LorentzTransform LorentzTransform::from_matrix(const Matrix& m, double tol) {
    if (lorentz_defect(m) > tol)
        throw std::invalid_argument("matrix does not preserve the metric");
    if (std::abs(det4(m) - 1.0) > 16.0 * tol)
        throw std::invalid_argument("matrix is not proper (det != +1)");
    if (m[0][0] < 1.0 - tol)
        throw std::invalid_argument("matrix is not orthochronous");
    LorentzTransform L;
    L.m_mat = m;
    return L;
}

FourVector LorentzTransform::apply(const FourVector& v) const {
    const std::array<double, 4> in = {v.t, v.x, v.y, v.z};
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i] += m_mat[i][j] * in[j];
    return {out[0], out[1], out[2], out[3]};
}

LorentzTransform LorentzTransform::inverse() const {
    LorentzTransform inv;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            inv.m_mat[i][j] = metric_diag[i] * m_mat[j][i] * metric_diag[j];
    return inv;
}

LorentzTransform operator*(const LorentzTransform& a, const LorentzTransform& b) {
    LorentzTransform c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a.m_mat[i][k] * b.m_mat[k][j];
            c.m_mat[i][j] = s;
        }
    return c;
}

ModeLabel::ModeLabel(const Vec3& k, double mass, double shell_margin) : m_k(k), m_mass(mass) {
    if (!(mass > 0.0)) throw std::invalid_argument("mode label mass must be positive");
    const double kn = k.norm();
    if (kn < mass * (1.0 + shell_margin))
        throw std::domain_error("mode label needs |k| >= m (1 + margin): no real frequency");
    m_omega = std::sqrt(kn * kn - mass * mass);
}

bool labels_equal(const ModeLabel& a, const ModeLabel& b, double tol) {
    const double scale = std::max({a.k().norm(), b.k().norm(), a.mass(), b.mass()});
    if ((a.k() - b.k()).norm() > tol * scale) return false;
    return std::abs(a.mass() - b.mass()) <= tol * std::max(a.mass(), b.mass());
}

std::ostream& operator<<(std::ostream& os, const ModeLabel& l) {
    return os << "k=" << l.k() << " m=" << l.mass();
}

BoostAction classify_mode_boost(const LorentzTransform& L, const ModeLabel& label,
                                double degenerate_band) {
    const FourVector p = L.apply(label.four_momentum());
    const double band = degenerate_band * label.mass();
    if (std::abs(p.t) <= band)
        throw DegenerateBoost("boosted mode energy within the degeneracy band");
    // Boosted labels sit on the shell by construction, so the safety margin
    // that guards hand-built labels is dropped here.
    if (p.t > 0.0)
        return {BoostAction::Kind::preserved, ModeLabel(p.spatial(), label.mass(), 0.0)};
    return {BoostAction::Kind::flipped, ModeLabel((-p).spatial(), label.mass(), 0.0)};
}

} // namespace twinqft
