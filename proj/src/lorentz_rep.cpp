#include "twinqft/lorentz_rep.hpp"

namespace twinqft {

GeneratorString generator_string(const OccBasisState& ket, const OccBasisState& bra) {
    GeneratorString out;
    for (const auto& occ : ket.occupations())
        for (int i = 0; i < occ.count; ++i) out.push_back({TwinSide::ket, occ.label});
    for (const auto& occ : bra.occupations())
        for (int i = 0; i < occ.count; ++i) out.push_back({TwinSide::bra, occ.label});
    return out;
}

TwinGenerator boost_generator(const LorentzTransform& L, const TwinGenerator& g) {
    const BoostAction act = classify_mode_boost(L, g.label);
    if (act.preserved()) return {g.side, act.label};
    return {g.side == TwinSide::ket ? TwinSide::bra : TwinSide::ket, act.label};
}

namespace {

TwinTerm boost_basis_product(const LorentzTransform& L, const OccBasisState& ket,
                             const OccBasisState& bra, std::complex<double> coeff,
                             const FockConfig& cfg) {
    std::vector<ModeOccupation> ket_occ, bra_occ;
    int ket_total = 0, bra_total = 0;
    for (const auto& g : generator_string(ket, bra)) {
        const TwinGenerator image = boost_generator(L, g);
        if (image.side == TwinSide::ket) {
            ket_occ.push_back({image.label, 1});
            ++ket_total;
        } else {
            bra_occ.push_back({image.label, 1});
            ++bra_total;
        }
    }
    if (ket_total > cfg.n_max || bra_total > cfg.n_max)
        throw TruncationOverflow("boost migration exceeds the per-side particle cap");
    return {coeff, FockState::basis(OccBasisState(std::move(ket_occ), cfg.label_tol)),
            FockState::basis(OccBasisState(std::move(bra_occ), cfg.label_tol))};
}

} // namespace

TwinState represent_boost(const LorentzTransform& L, const TwinState& s, const FockConfig& cfg) {
    TwinState out;
    for (const auto& t : s.terms())
        for (const auto& ek : t.ket.entries())
            for (const auto& eb : t.bra.entries())
                out.add_term(boost_basis_product(
                    L, ek.first, eb.first, t.alpha * ek.second * std::conj(eb.second), cfg));
    return out;
}

double vacuum_invariance_check(const LorentzTransform& L) {
    const TwinState vac = TwinState::vacuum();
    return twin_norm(represent_boost(L, vac) - vac);
}

namespace {

// U(L) O U(L)^{-1} applied to s
TwinState conjugated_apply(const LorentzTransform& L, const TwinOperator& o, const TwinState& s,
                           const FockConfig& cfg) {
    return represent_boost(L, apply_twin_operator(o, represent_boost(L.inverse(), s, cfg), cfg),
                           cfg);
}

} // namespace

double commutation_preservation_check(const LorentzTransform& L, const ModeLabel& k,
                                      const ModeLabel& l, const FockConfig& cfg) {
    const TwinOperator down = twin_ket_ann(k);
    const TwinOperator up = twin_ket_cre(l);
    const bool same = labels_equal(k, l, cfg.label_tol);

    std::vector<TwinState> family;
    family.push_back(TwinState::vacuum());
    const FockState one_k = FockState::basis(OccBasisState({{k, 1}}, cfg.label_tol));
    const FockState one_l = FockState::basis(OccBasisState({{l, 1}}, cfg.label_tol));
    family.push_back(TwinState::separable(1.0, one_k, FockState::vacuum()));
    family.push_back(TwinState::separable(1.0, one_l, FockState::vacuum()));
    family.push_back(TwinState::separable(1.0, FockState::vacuum(), one_k));
    family.push_back(TwinState::separable(1.0, one_l, one_k));
    family.push_back(
        TwinState::separable(1.0, FockState::basis(OccBasisState({{k, 1}, {l, 1}}, cfg.label_tol)),
                             FockState::vacuum()));

    double worst = 0.0;
    for (const auto& s : family) {
        const TwinState ab = conjugated_apply(L, down, conjugated_apply(L, up, s, cfg), cfg);
        const TwinState ba = conjugated_apply(L, up, conjugated_apply(L, down, s, cfg), cfg);
        const TwinState expect = same ? s : TwinState();
        worst = std::max(worst, max_coefficient_deviation(ab - ba, expect, cfg.label_tol));
    }
    return worst;
}

double c_operator_transform_check(const LorentzTransform& L, const ModeLabel& k,
                                  const std::vector<TwinState>& test_states,
                                  const FockConfig& cfg) {
    const BoostAction act = classify_mode_boost(L, k);
    const TwinOperator direct = act.preserved() ? c_operator(act.label) : c_operator_dag(act.label);
    const TwinOperator original = c_operator(k);

    double worst = 0.0;
    for (const auto& s : test_states) {
        const TwinState lhs = conjugated_apply(L, original, s, cfg);
        const TwinState rhs = apply_twin_operator(direct, s, cfg);
        worst = std::max(worst, max_coefficient_deviation(lhs, rhs, cfg.label_tol));
    }
    return worst;
}

} // namespace twinqft
