#pragma once

#include <complex>
#include <vector>

#include "twinqft/kinematics.hpp"

namespace twinqft {

struct SpacetimePoint {
    double t = 0.0;
    Vec3 r;

    FourVector lift() const { return {t, r.x, r.y, r.z}; }
};

// Plane-wave mode u_k(t,r) = exp(i(k.r - w t)) / ((2 pi)^3 2 w).
// The normalization sits outside any square root on purpose: w is real and
// positive on the spacelike shell, so no branch ambiguity can enter.
std::complex<double> mode_value(const ModeLabel& label, const SpacetimePoint& x);

// Wave-operator residual (d_tt - laplacian - m^2) u via central second
// differences with step h; vanishes like h^2 on shell.
std::complex<double> kg_residual(const ModeLabel& label, const SpacetimePoint& x, double h);

struct PacketTerm {
    std::complex<double> coeff;
    ModeLabel label;
    bool conjugated = false; // term is coeff * conj(u_label) when set
};

struct WavePacket {
    std::vector<PacketTerm> terms;

    std::complex<double> value(const SpacetimePoint& x) const;
    std::complex<double> time_derivative(const SpacetimePoint& x) const;
};

// Symplectic product (f,g) = i Int d^3r [conj(f) d_t g - conj(d_t f) g] at
// t = 0, taken over a periodic box of side `box_length` by summation on a
// uniform grid. Every label must be commensurate with the box; the grid must
// have at least 2*(max index)+1 points per axis so the sum is exact for all
// pairwise index differences.
std::complex<double> wronskian(const WavePacket& f, const WavePacket& g, double box_length,
                               int grid_points, double label_tol = 1e-9);

// How far u_label(L^-1 x) is from the boosted-frame mode it should match.
// The 1/(2w) prefactors differ between the two labels; `compensated` is the
// residual after multiplying the target by prefactor_ratio, and `phase` is
// the wrapped difference of complex arguments (which needs no compensation).
struct ModeBoostResidual {
    BoostAction::Kind kind;
    double compensated;
    double phase;
    double prefactor_ratio; // omega(target) / omega(source)
};

ModeBoostResidual mode_boost_residual(const LorentzTransform& L, const ModeLabel& label,
                                      const SpacetimePoint& x);

} // namespace twinqft
