#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "twinqft/dynamics.hpp"

using namespace twinqft;
using cplx = std::complex<double>;

namespace {

// Solved emission kinematics at M = 2, m = 1: the incoming subluminal line
// sheds a tachyon and comes to rest. |k| = sqrt(17)/4 puts every leg on its
// shell exactly and balances the process to the last bit.
const double kx = std::sqrt(1.0625);

Process solved_emission(double g = 0.7) {
    Process p;
    p.coupling = g;
    p.legs = {
        {Species::subluminal, 2.0, {2.25, kx, 0.0, 0.0}, LegDirection::incoming},
        {Species::subluminal, 2.0, {2.0, 0.0, 0.0, 0.0}, LegDirection::outgoing},
        {Species::tachyon, 1.0, {0.25, kx, 0.0, 0.0}, LegDirection::outgoing},
    };
    return p;
}

// same vertex with the subluminal line recoiling: balance is nonzero
Process unbalanced_emission() {
    Process p = solved_emission();
    p.legs[1].momentum = {std::sqrt(4.25), 0.5, 0.0, 0.0};
    return p;
}

double max_component(const FourVector& v) {
    return std::max({std::abs(v.t), std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

cplx random_phase(std::mt19937_64& rng) {
    return std::polar(uniform(rng, 0.2, 1.0), uniform(rng, 0.0, 6.283185307179586));
}

const ModeLabel mode_a({1.5, 0.0, 0.0}, 1.0);
const ModeLabel mode_b({0.0, 2.2, 0.0}, 1.0);
const ModeLabel mode_c({1.1, -1.3, 0.4}, 1.0);

FockState random_fock(std::mt19937_64& rng) {
    const ModeLabel* pool[] = {&mode_a, &mode_b, &mode_c};
    FockState f;
    const int entries = 1 + int(rng() % 3);
    for (int i = 0; i < entries; ++i) {
        std::vector<ModeOccupation> occ;
        const int modes = 1 + int(rng() % 2);
        for (int j = 0; j < modes; ++j) occ.push_back({*pool[rng() % 3], 1 + int(rng() % 2)});
        f.add_term(OccBasisState(std::move(occ)), random_phase(rng));
    }
    return f;
}

TwinState random_twin(std::mt19937_64& rng) {
    TwinState s;
    const int terms = 1 + int(rng() % 3);
    for (int i = 0; i < terms; ++i)
        s.add_term({random_phase(rng), random_fock(rng), random_fock(rng)});
    return s;
}

} // namespace

// --------------------------------------------------------------------------
// process validation and the vertex amplitude
// --------------------------------------------------------------------------

TEST_CASE("solved emission satisfies every invariant and balances exactly") {
    const Process p = solved_emission();
    CHECK_NOTHROW(validate_process(p));
    const Amplitude a = yukawa_first_order(p);
    CHECK(a.prefactor == cplx(0.0, -0.7));
    CHECK(max_component(a.momentum_balance) < 1e-12);
    CHECK(kinematically_allowed(a, p));
}

TEST_CASE("recoiling variant is on-shell but not balanced") {
    const Process p = unbalanced_emission();
    const Amplitude a = yukawa_first_order(p);
    CHECK(max_component(a.momentum_balance) > 0.1);
    CHECK_FALSE(kinematically_allowed(a, p));
}

TEST_CASE("zero coupling gives a zero prefactor") {
    const Amplitude a = yukawa_first_order(solved_emission(0.0));
    CHECK(a.prefactor == cplx(0.0, 0.0));
}

TEST_CASE("reversing every direction negates the balance") {
    Process p = unbalanced_emission();
    const FourVector b = yukawa_first_order(p).momentum_balance;
    for (Leg& l : p.legs)
        l.direction = l.direction == LegDirection::incoming ? LegDirection::outgoing
                                                            : LegDirection::incoming;
    const FourVector r = yukawa_first_order(p).momentum_balance;
    CHECK(max_component(r + b) < 1e-15);
}

TEST_CASE("off-shell and malformed processes are rejected") {
    Process p = solved_emission();
    p.legs[0].momentum.t = 2.26; // off the M = 2 shell
    CHECK_THROWS_AS(yukawa_first_order(p), OffShellLeg);

    p = solved_emission();
    p.legs[2].momentum = -p.legs[2].momentum; // negative energy
    CHECK_THROWS_AS(validate_process(p), OffShellLeg);

    p = solved_emission();
    p.legs[1].mass = 0.0;
    CHECK_THROWS_AS(validate_process(p), OffShellLeg);

    p = solved_emission();
    p.legs.pop_back();
    CHECK_THROWS_AS(yukawa_first_order(p), std::invalid_argument);

    p = solved_emission();
    p.legs[1] = p.legs[2]; // two tachyons, one subluminal
    CHECK_THROWS_AS(yukawa_first_order(p), std::invalid_argument);
}

// --------------------------------------------------------------------------
// boosts on processes
// --------------------------------------------------------------------------

TEST_CASE("identity boost returns the process unchanged") {
    const Process p = unbalanced_emission();
    const Process q = boost_process(LorentzTransform::identity(), p);
    REQUIRE(q.legs.size() == p.legs.size());
    for (std::size_t i = 0; i < p.legs.size(); ++i) {
        CHECK(q.legs[i].momentum.t == p.legs[i].momentum.t);
        CHECK(q.legs[i].momentum.x == p.legs[i].momentum.x);
        CHECK(q.legs[i].direction == p.legs[i].direction);
    }
}

TEST_CASE("fast boosts along the tachyon momentum reinterpret the leg") {
    // (L p)^0 changes sign above v = 0.25/|k| ~ 0.2425, so all four speeds flip
    const Process p = solved_emission();
    for (double v : {0.3, 0.6, 0.9, 0.99}) {
        CAPTURE(v);
        const auto L = LorentzTransform::boost({1.0, 0.0, 0.0}, v);
        const Process q = boost_process(L, p);
        CHECK(q.legs[2].direction == LegDirection::incoming); // was outgoing
        CHECK(q.legs[2].momentum.t > 0.0);
        // reinterpreted leg sits back on the tachyon shell
        const double p2 = minkowski_dot(q.legs[2].momentum, q.legs[2].momentum);
        CHECK(std::abs(p2 + 1.0) < 1e-12);
        // subluminal legs never flip
        CHECK(q.legs[0].direction == LegDirection::incoming);
        CHECK(q.legs[1].direction == LegDirection::outgoing);
        CHECK(q.legs[0].momentum.t > 0.0);
    }
}

TEST_CASE("transverse boosts preserve the tachyon direction") {
    const Process p = solved_emission();
    const auto L = LorentzTransform::boost({0.0, 1.0, 0.0}, 0.9);
    const Process q = boost_process(L, p);
    CHECK(q.legs[2].direction == LegDirection::outgoing);
    CHECK(q.legs[2].momentum.t > 0.0);
}

TEST_CASE("momentum balance transforms covariantly through the flip regime") {
    const Process cases[] = {solved_emission(), unbalanced_emission()};
    const Vec3 axes[] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.6, 0.8, 0.0}};
    for (const Process& p : cases) {
        const Amplitude base = yukawa_first_order(p);
        for (const Vec3& axis : axes) {
            for (double v : {0.3, 0.6, 0.9, 0.99}) {
                CAPTURE(axis.x);
                CAPTURE(v);
                const auto L = LorentzTransform::boost(axis, v);
                const Amplitude moved = yukawa_first_order(boost_process(L, p));
                const FourVector expected = L.apply(base.momentum_balance);
                CHECK(max_component(moved.momentum_balance - expected) < 1e-9);
                CHECK(moved.prefactor == base.prefactor);
            }
        }
    }
}

TEST_CASE("balanced processes stay balanced after any boost") {
    const Process p = solved_emission();
    const auto L = LorentzTransform::boost({0.36, -0.48, 0.8}, 0.97);
    const Amplitude a = yukawa_first_order(boost_process(L, p));
    CHECK(max_component(a.momentum_balance) < 1e-9);
    CHECK(kinematically_allowed(a, p));
}

TEST_CASE("a boost onto the degenerate surface is refused") {
    const Process p = solved_emission();
    const double v_star = 0.25 / kx; // (L p)^0 = 0 exactly at this speed
    CHECK_THROWS_AS(boost_process(LorentzTransform::boost({1.0, 0.0, 0.0}, v_star), p),
                    DegenerateBoost);
}

// --------------------------------------------------------------------------
// twin-space evolution
// --------------------------------------------------------------------------

TEST_CASE("minus evolution leaves equal-energy pairs untouched") {
    const OccBasisState one_k({{mode_a, 1}});
    const TwinState s = TwinState::separable(1.0, FockState::basis(one_k), FockState::basis(one_k));
    const TwinState evolved = evolve(s, 2.7, EvolutionSign::minus, 1.0);
    CHECK(max_coefficient_deviation(evolved, s) < 1e-14);
}

TEST_CASE("plus evolution advances the eigenpair phase as exp(-2 i w t)") {
    const OccBasisState one_k({{mode_a, 1}}); // w = sqrt(1.25)
    const TwinState s = TwinState::separable(1.0, FockState::basis(one_k), FockState::basis(one_k));
    const TwinState evolved = evolve(s, 1.0, EvolutionSign::plus, 1.0);
    const cplx expected = std::exp(cplx(0.0, -2.0 * std::sqrt(1.25)));
    CHECK(std::abs(trace_functional(evolved) - expected) < 1e-14);
}

TEST_CASE("minus evolution preserves the trace functional on random states") {
    std::mt19937_64 rng(0x7e57d1ca5ULL);
    for (int trial = 0; trial < 50; ++trial) {
        CAPTURE(trial);
        const TwinState s = random_twin(rng);
        const double t = uniform(rng, -3.0, 3.0);
        const cplx before = trace_functional(s);
        const cplx after = trace_functional(evolve(s, t, EvolutionSign::minus, 1.0));
        CHECK(std::abs(after - before) <= 1e-12 * std::max(1.0, std::abs(before)));
    }
}

TEST_CASE("plus evolution rotates each joint coefficient by the pair energy") {
    std::mt19937_64 rng(0xfeedbeefULL);
    const TwinState s = random_twin(rng);
    const double t = 1.3;
    const TwinState evolved = evolve(s, t, EvolutionSign::plus, 1.0);
    // expected state assembled independently from the occupancy energies
    TwinState expected;
    for (const TwinTerm& term : s.terms()) {
        FockState ket, bra;
        for (const auto& [basis, amp] : term.ket.entries())
            ket.add_term(basis, amp * std::polar(1.0, -basis.energy() * t));
        for (const auto& [basis, amp] : term.bra.entries())
            bra.add_term(basis, amp * std::polar(1.0, basis.energy() * t));
        expected.add_term({term.alpha, ket, bra});
    }
    CHECK(max_coefficient_deviation(evolved, expected) < 1e-14);
}

TEST_CASE("evolution rejects labels with the wrong mass") {
    const OccBasisState one_k({{mode_a, 1}}); // mass 1 labels
    const TwinState s = TwinState::separable(1.0, FockState::basis(one_k), FockState::vacuum());
    CHECK_THROWS_AS(evolve(s, 1.0, EvolutionSign::minus, 2.0), std::invalid_argument);
}

// --------------------------------------------------------------------------
// free-limit S-matrix
// --------------------------------------------------------------------------

TEST_CASE("free-limit S-matrix entries are the overlap, independent of T") {
    const std::vector<double> big_t{0.0, 0.7, 3.1, 10.0, 100.0};
    const FockState a = FockState::basis(OccBasisState({{mode_a, 1}}));
    const FockState b = FockState::basis(OccBasisState({{mode_b, 1}}));

    const auto same = s_matrix_free_limit_check(a, a, big_t, 1.0);
    REQUIRE(same.size() == big_t.size());
    for (const cplx& v : same) CHECK(std::abs(v - 1.0) < 1e-12);

    const auto orthogonal = s_matrix_free_limit_check(a, b, big_t, 1.0);
    for (const cplx& v : orthogonal) CHECK(std::abs(v) < 1e-12);

    const double isq2 = 1.0 / std::sqrt(2.0);
    const FockState mix = isq2 * (a + b);
    const auto overlap = s_matrix_free_limit_check(mix, a, big_t, 1.0);
    for (const cplx& v : overlap) CHECK(std::abs(v - isq2) < 1e-12);
    for (const cplx& v : overlap) CHECK(std::abs(v - overlap.front()) < 1e-12);
}

// --------------------------------------------------------------------------
// JSON bridge
// --------------------------------------------------------------------------

TEST_CASE("process survives a JSON round trip bit for bit") {
    const Process p = unbalanced_emission();
    const Process q = process_from_json(process_to_json(p));
    CHECK(q.coupling == p.coupling);
    REQUIRE(q.legs.size() == p.legs.size());
    for (std::size_t i = 0; i < p.legs.size(); ++i) {
        CHECK(q.legs[i].species == p.legs[i].species);
        CHECK(q.legs[i].mass == p.legs[i].mass);
        CHECK(q.legs[i].direction == p.legs[i].direction);
        CHECK(q.legs[i].momentum.t == p.legs[i].momentum.t);
        CHECK(q.legs[i].momentum.x == p.legs[i].momentum.x);
        CHECK(q.legs[i].momentum.y == p.legs[i].momentum.y);
        CHECK(q.legs[i].momentum.z == p.legs[i].momentum.z);
    }
}

TEST_CASE("amplitude serialization carries the documented fields") {
    const Process p = solved_emission();
    const Amplitude a = yukawa_first_order(p);
    const std::string text = amplitude_to_json(a, kinematically_allowed(a, p));
    CHECK(text.find("\"allowed\": true") != std::string::npos);
    CHECK(text.find("\"balance\"") != std::string::npos);
    CHECK(text.find("\"prefactor_re\"") != std::string::npos);
    CHECK(text.find("\"prefactor_im\"") != std::string::npos);
}

TEST_CASE("malformed process documents are rejected") {
    CHECK_THROWS_AS(process_from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS(process_from_json(R"({"legs": []})"), std::invalid_argument);
    CHECK_THROWS_AS(process_from_json(R"({"coupling": 1, "legs": [{"species": "ghost",
        "mass": 1, "momentum": [1,0,0,0], "direction": "incoming"}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(process_from_json(R"({"coupling": 1, "legs": [{"species": "tachyon",
        "mass": 1, "momentum": [1,0,0], "direction": "incoming"}]})"),
                    std::invalid_argument);
}
