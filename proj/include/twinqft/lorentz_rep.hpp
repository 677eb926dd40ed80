#pragma once

#include <vector>

#include "twinqft/twinspace.hpp"

namespace twinqft {

enum class TwinSide { ket, bra };

// One creation-type generator applied to the twin vacuum: a+_k x 1 on the ket
// side, the starred creator on the bra side.
struct TwinGenerator {
    TwinSide side;
    ModeLabel label;
};

// Ordered generator word; a basis product of total occupation (n, m)
// decomposes into n ket generators followed by m bra generators.
using GeneratorString = std::vector<TwinGenerator>;

GeneratorString generator_string(const OccBasisState& ket, const OccBasisState& bra);

// Boost law for a single generator: a preserved mode keeps its side and takes
// the boosted label, a sign-flipped mode migrates to the opposite factor with
// the reinterpreted label.
TwinGenerator boost_generator(const LorentzTransform& L, const TwinGenerator& g);

// The boost representation on twin states: rewrite every basis product as a
// generator string on the twin vacuum, map each generator, and reapply. The
// per-side label maps are injective (a preserved image and a flipped image
// can never coincide, since their pre-images would need energies of opposite
// sign), so occupancies are only permuted across sides and no sqrt(n!)
// normalization factors survive; coefficients pass through untouched.
TwinState represent_boost(const LorentzTransform& L, const TwinState& s,
                          const FockConfig& cfg = {});

// || U(L)(|0><0|) - |0><0| ||. Exactly zero: the empty string is a fixed point.
double vacuum_invariance_check(const LorentzTransform& L);

// Conjugates a_k x 1 and a+_l x 1 by U(L) and measures how far their
// commutator is from delta_{kl} times the identity on a basis family built
// out of k and l; returns the worst product-basis amplitude deviation.
double commutation_preservation_check(const LorentzTransform& L, const ModeLabel& k,
                                      const ModeLabel& l, const FockConfig& cfg = {});

// Compares U(L) c_k U(L)^{-1} against c_{k'} (sign preserved) or against
// c+_{l'} (sign flipped) on the supplied test states; returns the worst
// product-basis amplitude deviation.
double c_operator_transform_check(const LorentzTransform& L, const ModeLabel& k,
                                  const std::vector<TwinState>& test_states,
                                  const FockConfig& cfg = {});

} // namespace twinqft
