#include "twinqft/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace twinqft {

namespace {

double shell_target(const Leg& l) {
    return l.species == Species::subluminal ? l.mass * l.mass : -l.mass * l.mass;
}

std::string leg_tag(std::size_t i) { return "leg " + std::to_string(i); }

// applies exp(-i dir H0 t) entrywise; every label must carry `mass`
FockState rotate_phases(const FockState& f, double t, double dir, double mass,
                        const FockConfig& cfg) {
    FockState out;
    for (const auto& [basis, amp] : f.entries()) {
        for (const ModeOccupation& occ : basis.occupations())
            if (std::abs(occ.label.mass() - mass) > 1e-12 * std::max(1.0, mass))
                throw std::invalid_argument("evolve: occupied label carries mass " +
                                            std::to_string(occ.label.mass()) +
                                            ", expected " + std::to_string(mass));
        out.add_term(basis, amp * std::polar(1.0, -dir * basis.energy() * t), cfg.label_tol);
    }
    return out;
}

} // namespace

void validate_process(const Process& p, double shell_tol) {
    for (std::size_t i = 0; i < p.legs.size(); ++i) {
        const Leg& l = p.legs[i];
        if (!(l.mass > 0.0) || !std::isfinite(l.mass))
            throw OffShellLeg(leg_tag(i) + ": mass must be positive and finite");
        const double p2 = minkowski_dot(l.momentum, l.momentum);
        const Vec3 k = l.momentum.spatial();
        const double scale = std::max(1.0, l.momentum.t * l.momentum.t + dot(k, k));
        if (std::abs(p2 - shell_target(l)) > shell_tol * scale)
            throw OffShellLeg(leg_tag(i) + ": p.p = " + std::to_string(p2) +
                              " violates the mass shell " + std::to_string(shell_target(l)));
        if (!(l.momentum.t > 0.0))
            throw OffShellLeg(leg_tag(i) + ": energy must be positive");
    }
}

bool kinematically_allowed(const Amplitude& a, const Process& p, double tol) {
    double scale = 1.0;
    for (const Leg& l : p.legs) scale = std::max(scale, l.momentum.t);
    const FourVector& b = a.momentum_balance;
    const double worst = std::max({std::abs(b.t), std::abs(b.x), std::abs(b.y), std::abs(b.z)});
    return worst <= tol * scale;
}

Amplitude yukawa_first_order(const Process& p, double shell_tol) {
    if (p.legs.size() != 3)
        throw std::invalid_argument("yukawa_first_order: exactly three legs required");
    int subluminal = 0, tachyons = 0;
    for (const Leg& l : p.legs) (l.species == Species::subluminal ? subluminal : tachyons) += 1;
    if (subluminal != 2 || tachyons != 1)
        throw std::invalid_argument(
            "yukawa_first_order: need two subluminal legs and one tachyon");
    validate_process(p, shell_tol);

    FourVector balance;
    for (const Leg& l : p.legs)
        balance = (l.direction == LegDirection::incoming) ? balance + l.momentum
                                                          : balance - l.momentum;
    return {std::complex<double>(0.0, -p.coupling), balance};
}

Process boost_process(const LorentzTransform& L, const Process& p, double degenerate_band,
                      double shell_tol) {
    validate_process(p, shell_tol);
    Process out;
    out.coupling = p.coupling;
    out.legs.reserve(p.legs.size());
    for (std::size_t i = 0; i < p.legs.size(); ++i) {
        Leg moved = p.legs[i];
        const FourVector q = L.apply(moved.momentum);
        if (moved.species == Species::tachyon && std::abs(q.t) <= degenerate_band * moved.mass)
            throw DegenerateBoost(leg_tag(i) + ": boosted tachyon energy " +
                                  std::to_string(q.t) + " is degenerate");
        if (moved.species == Species::tachyon && q.t < 0.0) {
            moved.momentum = -q;
            moved.direction = moved.direction == LegDirection::incoming
                                  ? LegDirection::outgoing
                                  : LegDirection::incoming;
        } else {
            moved.momentum = q;
        }
        out.legs.push_back(moved);
    }
    return out;
}

TwinState evolve(const TwinState& s, double t, EvolutionSign sign, double mass,
                 const FockConfig& cfg) {
    // the stored bra is a plain vector, so "evolving the bra" rotates it the
    // same way and the conjugation at trace time produces the relative sign
    const double bra_dir = (sign == EvolutionSign::minus) ? 1.0 : -1.0;
    TwinState out;
    for (const TwinTerm& term : s.terms())
        out.add_term({term.alpha, rotate_phases(term.ket, t, 1.0, mass, cfg),
                      rotate_phases(term.bra, t, bra_dir, mass, cfg)});
    return out;
}

std::vector<std::complex<double>> s_matrix_free_limit_check(const FockState& alpha,
                                                            const FockState& beta,
                                                            const std::vector<double>& t_values,
                                                            double mass, const FockConfig& cfg) {
    std::vector<std::complex<double>> out;
    out.reserve(t_values.size());
    for (double T : t_values) {
        TwinState s = TwinState::separable(1.0, alpha, beta);
        s = evolve(s, T, EvolutionSign::plus, mass, cfg);  // exp(-i H+ T)
        s = evolve(s, -T, EvolutionSign::plus, mass, cfg); // exp(+i H0+ T), free generator
        out.push_back(trace_functional(s, cfg.label_tol));
    }
    return out;
}

Process process_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("process_from_json: ") + e.what());
    }
    Process p;
    try {
        p.coupling = doc.at("coupling").get<double>();
        for (const auto& jl : doc.at("legs")) {
            Leg leg;
            const std::string species = jl.at("species").get<std::string>();
            if (species == "subluminal")
                leg.species = Species::subluminal;
            else if (species == "tachyon")
                leg.species = Species::tachyon;
            else
                throw std::invalid_argument("process_from_json: unknown species '" + species +
                                            "'");
            leg.mass = jl.at("mass").get<double>();
            const auto& m = jl.at("momentum");
            if (!m.is_array() || m.size() != 4)
                throw std::invalid_argument("process_from_json: momentum must be [t,x,y,z]");
            leg.momentum = {m[0].get<double>(), m[1].get<double>(), m[2].get<double>(),
                            m[3].get<double>()};
            const std::string direction = jl.at("direction").get<std::string>();
            if (direction == "incoming")
                leg.direction = LegDirection::incoming;
            else if (direction == "outgoing")
                leg.direction = LegDirection::outgoing;
            else
                throw std::invalid_argument("process_from_json: unknown direction '" +
                                            direction + "'");
            p.legs.push_back(leg);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("process_from_json: ") + e.what());
    }
    return p;
}

std::string process_to_json(const Process& p, int indent) {
    nlohmann::json doc;
    doc["coupling"] = p.coupling;
    doc["legs"] = nlohmann::json::array();
    for (const Leg& l : p.legs) {
        nlohmann::json jl;
        jl["species"] = l.species == Species::subluminal ? "subluminal" : "tachyon";
        jl["mass"] = l.mass;
        jl["momentum"] = {l.momentum.t, l.momentum.x, l.momentum.y, l.momentum.z};
        jl["direction"] = l.direction == LegDirection::incoming ? "incoming" : "outgoing";
        doc["legs"].push_back(jl);
    }
    return doc.dump(indent);
}

std::string amplitude_to_json(const Amplitude& a, bool allowed, int indent) {
    nlohmann::json doc;
    doc["allowed"] = allowed;
    doc["balance"] = {a.momentum_balance.t, a.momentum_balance.x, a.momentum_balance.y,
                      a.momentum_balance.z};
    doc["prefactor_re"] = a.prefactor.real();
    doc["prefactor_im"] = a.prefactor.imag();
    return doc.dump(indent);
}

} // namespace twinqft
