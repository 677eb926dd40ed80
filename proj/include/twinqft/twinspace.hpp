#pragma once

#include <complex>
#include <vector>

#include "twinqft/fock.hpp"

namespace twinqft {

// One product term alpha |ket><bra|. The bra factor is stored as an ordinary
// state vector; turning it into a bra is an antilinear move, so scalar
// bookkeeping happens in alpha and never inside the stored bra.
struct TwinTerm {
    std::complex<double> alpha;
    FockState ket;
    FockState bra;
};

class TwinState {
  public:
    TwinState() = default; // zero element

    static TwinState vacuum(); // |0><0|
    static TwinState separable(std::complex<double> alpha, FockState ket, FockState bra);

    const std::vector<TwinTerm>& terms() const { return m_terms; }
    bool is_zero() const { return m_terms.empty(); }

    void add_term(TwinTerm t);
    // drop terms whose total weight |alpha| |ket| |bra| falls below tol
    void trim(double tol);

  private:
    std::vector<TwinTerm> m_terms;
};

TwinState operator+(const TwinState& a, const TwinState& b);
TwinState operator-(const TwinState& a, const TwinState& b);
TwinState operator*(std::complex<double> s, const TwinState& a);

// Tr(sum alpha |psi><xi|) = sum alpha <xi|psi>
std::complex<double> trace_functional(const TwinState& s, double label_tol = 1e-9);

// Hilbert-Schmidt pairing Tr(a^dag b); the norm it induces is the distance
// measure used by every invariance check.
std::complex<double> twin_inner(const TwinState& a, const TwinState& b, double label_tol = 1e-9);
double twin_norm(const TwinState& a, double label_tol = 1e-9);

// Operator term c (K on the ket factor) x (B on the stored bra vector).
// Acting with B on the stored vector means the bra itself is multiplied from
// the right by adjoint(B), so e.g. bra_ops = {create k} sends <0| to <1_k|,
// which is exactly the starred ladder operator of the dual factor.
struct TwinOpTerm {
    std::complex<double> coeff;
    LadderString ket_ops;
    LadderString bra_ops;
};

struct TwinOperator {
    std::vector<TwinOpTerm> terms;
};

TwinOperator operator+(const TwinOperator& a, const TwinOperator& b);
TwinOperator operator*(std::complex<double> s, const TwinOperator& a);

// apply b first, then a
TwinOperator compose(const TwinOperator& a, const TwinOperator& b);

// Hilbert-Schmidt adjoint: conjugate coefficients, adjoint both strings.
TwinOperator adjoint(const TwinOperator& o);

// elementary builders
TwinOperator twin_ket_ann(const ModeLabel& k);  // a_k  x 1
TwinOperator twin_ket_cre(const ModeLabel& k);  // a+_k x 1
TwinOperator twin_bra_cre(const ModeLabel& k);  // 1 x (starred ladder): <0| -> <1_k|
TwinOperator twin_bra_ann(const ModeLabel& k);  // its adjoint; kills the bra vacuum

// c_k = a_k x 1 + the bra-side creator; the pair that transforms into each
// other under mode-flipping boosts.
TwinOperator c_operator(const ModeLabel& k);
TwinOperator c_operator_dag(const ModeLabel& k);

// Half-sum field acting on both factors, built from the packet at point x.
TwinOperator twin_field(const WavePacket& packet, const SpacetimePoint& x);

TwinState apply_twin_operator(const TwinOperator& o, const TwinState& s,
                              const FockConfig& cfg = {});

// Collapse of the two-factor operator onto a single factor: the amplitude of
// any twin matrix element equals <xi| reduce(o) |psi>, term by term.
FockOperator reduce_to_fock(const TwinOperator& o);

// Rank of the coefficient matrix over the joint occupancy bases; singular
// values below rel_tol times the largest are treated as zero.
int schmidt_rank(const TwinState& s, double rel_tol = 1e-10, double label_tol = 1e-9);

// Largest |a - b| coefficient over the joint product basis of the two states.
// Unlike the Hilbert-Schmidt norm of a - b, which squares a cancelling sum,
// this stays linear in the residual and resolves deviations near roundoff.
double max_coefficient_deviation(const TwinState& a, const TwinState& b, double label_tol = 1e-9);

} // namespace twinqft
