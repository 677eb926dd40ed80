#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "twinqft/kinematics.hpp"
#include "twinqft/modes.hpp"

namespace twinqft {

struct FockConfig {
    int n_max = 4;           // cap on total particle number per state
    double label_tol = 1e-9; // relative tolerance identifying mode labels
    double prune_tol = 1e-14;
};

struct ModeOccupation {
    ModeLabel label;
    int count;
};

// Multiset of occupied modes. Labels are exact real vectors; entries within
// label_tol of each other merge, and the stored order is a deterministic
// component sort so iteration never depends on construction history.
class OccBasisState {
  public:
    OccBasisState() = default; // vacuum

    explicit OccBasisState(std::vector<ModeOccupation> occ, double label_tol = 1e-9);

    const std::vector<ModeOccupation>& occupations() const { return m_occ; }
    int total() const;
    bool is_vacuum() const { return m_occ.empty(); }

    // sum of n_k w_k over the occupied modes
    double energy() const;

    int count_of(const ModeLabel& l, double label_tol = 1e-9) const;

    // count shifted by +-1; delta = -1 on an unoccupied label is a caller bug
    OccBasisState shifted(const ModeLabel& l, int delta, double label_tol = 1e-9) const;

  private:
    void insert(const ModeLabel& l, int count, double label_tol);
    std::vector<ModeOccupation> m_occ;
};

bool states_equal(const OccBasisState& a, const OccBasisState& b, double label_tol = 1e-9);

enum class LadderKind { annihilate, create };

struct LadderOp {
    ModeLabel label;
    LadderKind kind;
};

// Operator strings apply front to back: {a, b} sends |s> to b(a(|s>)).
using LadderString = std::vector<LadderOp>;

LadderString adjoint(const LadderString& s);

// Sparse superposition of occupancy basis states with unit-norm ladder
// convention: a-dagger |n> = sqrt(n+1) |n+1>, a |n> = sqrt(n) |n-1>.
class FockState {
  public:
    FockState() = default; // zero vector

    static FockState vacuum();
    static FockState basis(const OccBasisState& b, std::complex<double> amp = 1.0);

    const std::vector<std::pair<OccBasisState, std::complex<double>>>& entries() const {
        return m_entries;
    }
    bool is_zero() const { return m_entries.empty(); }

    void add_term(const OccBasisState& b, std::complex<double> amp, double label_tol = 1e-9);
    void prune(double tol);

  private:
    std::vector<std::pair<OccBasisState, std::complex<double>>> m_entries;
};

FockState operator+(const FockState& a, const FockState& b);
FockState operator-(const FockState& a, const FockState& b);
FockState operator*(std::complex<double> s, const FockState& a);

// conjugate linear in the first argument
std::complex<double> inner_product(const FockState& a, const FockState& b,
                                   double label_tol = 1e-9);
double norm(const FockState& a);

FockState apply_ladder(const FockState& s, const ModeLabel& k, LadderKind kind,
                       const FockConfig& cfg = {});
FockState apply_ladder_string(const FockState& s, const LadderString& ops,
                              const FockConfig& cfg = {});

// Linear combination of ladder strings; the reduction of a twin operator
// lands here.
struct FockOperator {
    std::vector<std::pair<std::complex<double>, LadderString>> terms;
};

FockState apply_fock_operator(const FockState& s, const FockOperator& op,
                              const FockConfig& cfg = {});

// H_0 = sum w_k n_k. All labels must carry the given mass.
FockState free_hamiltonian_apply(const FockState& s, double mass, const FockConfig& cfg = {});

// Field operator smeared over the packet, evaluated at x: each term (c, k)
// contributes c u_k(x) a_k + conj(c u_k(x)) a-dagger_k (conjugated terms use
// conj(u_k) in place of u_k), which keeps every term hermitian.
FockState smeared_field_apply(const FockState& s, const WavePacket& packet,
                              const SpacetimePoint& x, const FockConfig& cfg = {});

// Covariantly normalized ladder operators differ from the internal unit-norm
// ones by sqrt(2 w_k (2 pi)^3 / delta_v); commutators then return
// 2 w_k (2 pi)^3 / delta_v instead of 1.
struct LadderConvention {
    double delta_v = 1.0;
};

double covariant_ladder_factor(const ModeLabel& k, const LadderConvention& conv);

FockState apply_covariant_ladder(const FockState& s, const ModeLabel& k, LadderKind kind,
                                 const LadderConvention& conv, const FockConfig& cfg = {});

} // namespace twinqft
