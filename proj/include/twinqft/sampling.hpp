#pragma once

#include <complex>
#include <random>
#include <vector>

#include "twinqft/twinspace.hpp"

namespace twinqft {

// All randomized checks draw from this engine through the helpers below,
// which consume a fixed number of raw 64-bit words per call. Reports built
// from a fixed seed are therefore byte-reproducible, independent of any
// standard-library distribution details.
using SampleRng = std::mt19937_64;

double uniform_sample(SampleRng& rng, double lo, double hi);
int uniform_int_sample(SampleRng& rng, int lo, int hi);
std::complex<double> random_coeff(SampleRng& rng); // re, im uniform in [-1, 1]

Vec3 random_axis(SampleRng& rng); // uniform on the unit sphere

// Pure boost with a random axis and speed uniform in [min_speed, max_speed].
LorentzTransform random_boost(SampleRng& rng, double min_speed = 0.05,
                              double max_speed = 0.99);

// Spacelike label with |k| = mass * uniform(min_factor, max_factor) along a
// random direction.
ModeLabel random_tachyon_label(SampleRng& rng, double mass, double min_factor = 1.05,
                               double max_factor = 10.0);

// Boost along +k_hat with speed drawn strictly above the sign-flip threshold
// omega/|k| (and clear of the degeneracy band), so the label always flips.
LorentzTransform flipping_boost(SampleRng& rng, const ModeLabel& label,
                                double max_speed = 0.995);

// Boost along -k_hat: the boosted energy gamma (omega + v |k|) stays positive
// at any speed, so the label is always preserved.
LorentzTransform preserving_boost(SampleRng& rng, const ModeLabel& label,
                                  double max_speed = 0.99);

std::vector<ModeLabel> random_label_pool(SampleRng& rng, double mass, int count,
                                         double min_factor = 1.1, double max_factor = 3.0);

// Occupancy with total particle number uniform in [0, max_total], each
// particle dropped on a random pool label.
OccBasisState random_occupancy(SampleRng& rng, const std::vector<ModeLabel>& pool,
                               int max_total);

// Sum of `terms` random occupancies with random complex coefficients.
FockState random_fock_state(SampleRng& rng, const std::vector<ModeLabel>& pool, int max_total,
                            int terms);

TwinState random_separable_twin(SampleRng& rng, const std::vector<ModeLabel>& pool,
                                int max_total, int terms);

// Sum of up to `max_products` separable pieces.
TwinState random_twin_state(SampleRng& rng, const std::vector<ModeLabel>& pool, int max_total,
                            int terms, int max_products = 3);

// Up to `max_terms` products of random ladder strings (length <= max_len per
// side) with random complex coefficients.
TwinOperator random_twin_operator(SampleRng& rng, const std::vector<ModeLabel>& pool,
                                  int max_terms, int max_len);

} // namespace twinqft
