#pragma once

#include <complex>
#include <string>
#include <vector>

#include "twinqft/twinspace.hpp"

namespace twinqft {

enum class Species { subluminal, tachyon };
enum class LegDirection { incoming, outgoing };

// One external line of a scattering process. Subluminal legs satisfy
// p.p = +M^2, tachyon legs p.p = -m^2, and every stored energy is positive:
// a boost that would drive a tachyon energy negative reinterprets the leg
// instead (see boost_process).
struct Leg {
    Species species = Species::subluminal;
    double mass = 0.0;
    FourVector momentum;
    LegDirection direction = LegDirection::incoming;
};

struct Process {
    std::vector<Leg> legs;
    double coupling = 0.0;
};

// First-order matrix element prefactor * (2 pi)^4 delta^4(momentum_balance).
// The delta function is carried symbolically through its argument; the
// process is kinematically allowed iff the balance vanishes.
struct Amplitude {
    std::complex<double> prefactor;
    FourVector momentum_balance;
};

// Mass-shell and positive-energy validation of every leg. Throws OffShellLeg.
void validate_process(const Process& p, double shell_tol = 1e-9);

// Zero-test of the balance against the process energy scale.
bool kinematically_allowed(const Amplitude& a, const Process& p, double tol = 1e-6);

// Emission/absorption vertex of one tachyon between two subluminal lines:
// prefactor -i g, balance = sum(incoming) - sum(outgoing).
Amplitude yukawa_first_order(const Process& p, double shell_tol = 1e-9);

// Subluminal legs take momentum L p with the direction unchanged. A tachyon
// leg keeps its direction while (L p)^0 > 0 and is otherwise reinterpreted:
// momentum -L p, direction toggled. Throws DegenerateBoost when a tachyon
// energy lands within degenerate_band * m of zero, where neither branch is
// meaningful.
Process boost_process(const LorentzTransform& L, const Process& p,
                      double degenerate_band = default_degenerate_band,
                      double shell_tol = 1e-9);

enum class EvolutionSign { plus, minus };

// exp(-i H t) on the twin state, where H acts as H0 on the ket factor and
// -+ H0 on the stored bra vector: `minus` gives the trace-preserving
// Heisenberg evolution with per-pair phase exp(-i (E_ket - E_bra) t), `plus`
// the S-matrix generator with exp(-i (E_ket + E_bra) t). Every occupied
// label must carry the given mass.
TwinState evolve(const TwinState& s, double t, EvolutionSign sign, double mass,
                 const FockConfig& cfg = {});

// Tr( exp(-i H+ T) exp(+i H0+ T) |alpha><beta| ) for each T. With the free
// generator the exponentials cancel exactly, so every entry must equal
// <beta|alpha> independent of T; deviations measure phase bookkeeping errors.
std::vector<std::complex<double>> s_matrix_free_limit_check(const FockState& alpha,
                                                            const FockState& beta,
                                                            const std::vector<double>& t_values,
                                                            double mass,
                                                            const FockConfig& cfg = {});

// JSON bridge. A process document reads
//   {"coupling": g, "legs": [{"species": "subluminal"|"tachyon", "mass": M,
//    "momentum": [t,x,y,z], "direction": "incoming"|"outgoing"}, ...]}
// and malformed input throws std::invalid_argument.
Process process_from_json(const std::string& text);
std::string process_to_json(const Process& p, int indent = 2);

// {"allowed": bool, "balance": [t,x,y,z], "prefactor_im": .., "prefactor_re": ..}
std::string amplitude_to_json(const Amplitude& a, bool allowed, int indent = 2);

} // namespace twinqft
