#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

#include "twinqft/errors.hpp"

namespace twinqft {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

std::ostream& operator<<(std::ostream& os, const Vec3& v);

// Metric signature is (+,-,-,-) throughout; spacelike momenta square to -m^2.
struct FourVector {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 spatial() const { return {x, y, z}; }
};

inline FourVector operator+(const FourVector& a, const FourVector& b) {
    return {a.t + b.t, a.x + b.x, a.y + b.y, a.z + b.z};
}
inline FourVector operator-(const FourVector& a, const FourVector& b) {
    return {a.t - b.t, a.x - b.x, a.y - b.y, a.z - b.z};
}
inline FourVector operator-(const FourVector& a) { return {-a.t, -a.x, -a.y, -a.z}; }
inline FourVector operator*(double s, const FourVector& a) {
    return {s * a.t, s * a.x, s * a.y, s * a.z};
}

inline double minkowski_dot(const FourVector& a, const FourVector& b) {
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

std::ostream& operator<<(std::ostream& os, const FourVector& v);

// Proper orthochronous Lorentz matrix. Construction goes through the
// factories, which either build an exact boost or validate a user matrix.
class LorentzTransform {
  public:
    using Matrix = std::array<std::array<double, 4>, 4>;

    static LorentzTransform identity();

    // Pure boost with velocity `speed` (|speed| < 1) along `axis`.
    static LorentzTransform boost(const Vec3& axis, double speed);

    // Validates M^T eta M = eta, det = +1 and M[0][0] >= 1 before accepting.
    static LorentzTransform from_matrix(const Matrix& m, double tol = 1e-12);

    FourVector apply(const FourVector& v) const;

    // eta M^T eta: exact inverse for any Lorentz matrix, no solve involved.
    LorentzTransform inverse() const;

    const Matrix& matrix() const { return m_mat; }

    friend LorentzTransform operator*(const LorentzTransform& a, const LorentzTransform& b);

  private:
    LorentzTransform() = default;
    Matrix m_mat{};
};

// Largest |(M^T eta M - eta)| entry; zero for an exact Lorentz matrix.
double lorentz_defect(const LorentzTransform::Matrix& m);

inline constexpr double default_shell_margin = 1e-6;

// Spacelike momentum label (k, m) with |k| >= m (1 + margin) and
// omega = sqrt(|k|^2 - m^2). Labels are exact real vectors, not lattice
// points; equality downstream is tolerance-based.
class ModeLabel {
  public:
    ModeLabel(const Vec3& k, double mass, double shell_margin = default_shell_margin);

    const Vec3& k() const { return m_k; }
    double mass() const { return m_mass; }
    double omega() const { return m_omega; }
    FourVector four_momentum() const { return {m_omega, m_k.x, m_k.y, m_k.z}; }

  private:
    Vec3 m_k;
    double m_mass;
    double m_omega;
};

// Relative comparison of both the wavevector and the mass.
bool labels_equal(const ModeLabel& a, const ModeLabel& b, double tol = 1e-9);

std::ostream& operator<<(std::ostream& os, const ModeLabel& l);

// Outcome of boosting a mode label: either the boosted energy stays positive
// (label moves to spatial(Lk)) or it turns negative and the mode is read as
// its reinterpreted partner at spatial(-Lk).
struct BoostAction {
    enum class Kind { preserved, flipped };

    Kind kind;
    ModeLabel label;

    bool preserved() const { return kind == Kind::preserved; }
    bool flipped() const { return kind == Kind::flipped; }
};

inline constexpr double default_degenerate_band = 1e-9; // in units of the mass

// Throws DegenerateBoost when |(Lk)^0| <= band * m.
BoostAction classify_mode_boost(const LorentzTransform& L, const ModeLabel& label,
                                double degenerate_band = default_degenerate_band);

} // namespace twinqft
