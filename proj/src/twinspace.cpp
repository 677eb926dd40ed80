#include "twinqft/twinspace.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <map>

namespace twinqft {

TwinState TwinState::vacuum() { return separable(1.0, FockState::vacuum(), FockState::vacuum()); }

TwinState TwinState::separable(std::complex<double> alpha, FockState ket, FockState bra) {
    TwinState s;
    s.add_term({alpha, std::move(ket), std::move(bra)});
    return s;
}

void TwinState::add_term(TwinTerm t) {
    if (t.alpha == std::complex<double>(0.0) || t.ket.is_zero() || t.bra.is_zero()) return;
    m_terms.push_back(std::move(t));
}

void TwinState::trim(double tol) {
    std::erase_if(m_terms, [&](const TwinTerm& t) {
        return std::abs(t.alpha) * norm(t.ket) * norm(t.bra) < tol;
    });
}

TwinState operator+(const TwinState& a, const TwinState& b) {
    TwinState out = a;
    for (const auto& t : b.terms()) out.add_term(t);
    return out;
}

TwinState operator-(const TwinState& a, const TwinState& b) {
    return a + (std::complex<double>(-1.0) * b);
}

TwinState operator*(std::complex<double> s, const TwinState& a) {
    TwinState out;
    for (const auto& t : a.terms()) out.add_term({s * t.alpha, t.ket, t.bra});
    return out;
}

std::complex<double> trace_functional(const TwinState& s, double label_tol) {
    std::complex<double> acc = 0.0;
    for (const auto& t : s.terms()) acc += t.alpha * inner_product(t.bra, t.ket, label_tol);
    return acc;
}

std::complex<double> twin_inner(const TwinState& a, const TwinState& b, double label_tol) {
    std::complex<double> acc = 0.0;
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms())
            acc += std::conj(ta.alpha) * tb.alpha * inner_product(ta.ket, tb.ket, label_tol) *
                   inner_product(tb.bra, ta.bra, label_tol);
    return acc;
}

double twin_norm(const TwinState& a, double label_tol) {
    return std::sqrt(std::max(0.0, twin_inner(a, a, label_tol).real()));
}

TwinOperator operator+(const TwinOperator& a, const TwinOperator& b) {
    TwinOperator out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    return out;
}

TwinOperator operator*(std::complex<double> s, const TwinOperator& a) {
    TwinOperator out = a;
    for (auto& t : out.terms) t.coeff *= s;
    return out;
}

TwinOperator compose(const TwinOperator& a, const TwinOperator& b) {
    TwinOperator out;
    for (const auto& tb : b.terms)
        for (const auto& ta : a.terms) {
            TwinOpTerm t;
            t.coeff = ta.coeff * tb.coeff;
            t.ket_ops = tb.ket_ops;
            t.ket_ops.insert(t.ket_ops.end(), ta.ket_ops.begin(), ta.ket_ops.end());
            t.bra_ops = tb.bra_ops;
            t.bra_ops.insert(t.bra_ops.end(), ta.bra_ops.begin(), ta.bra_ops.end());
            out.terms.push_back(std::move(t));
        }
    return out;
}

TwinOperator adjoint(const TwinOperator& o) {
    TwinOperator out;
    for (const auto& t : o.terms)
        out.terms.push_back({std::conj(t.coeff), adjoint(t.ket_ops), adjoint(t.bra_ops)});
    return out;
}

TwinOperator twin_ket_ann(const ModeLabel& k) {
    return {{{1.0, {{k, LadderKind::annihilate}}, {}}}};
}
TwinOperator twin_ket_cre(const ModeLabel& k) {
    return {{{1.0, {{k, LadderKind::create}}, {}}}};
}
TwinOperator twin_bra_cre(const ModeLabel& k) {
    return {{{1.0, {}, {{k, LadderKind::create}}}}};
}
TwinOperator twin_bra_ann(const ModeLabel& k) {
    return {{{1.0, {}, {{k, LadderKind::annihilate}}}}};
}

TwinOperator c_operator(const ModeLabel& k) { return twin_ket_ann(k) + twin_bra_cre(k); }
TwinOperator c_operator_dag(const ModeLabel& k) { return twin_ket_cre(k) + twin_bra_ann(k); }

TwinOperator twin_field(const WavePacket& packet, const SpacetimePoint& x) {
    TwinOperator out;
    for (const auto& term : packet.terms) {
        auto u = mode_value(term.label, x);
        if (term.conjugated) u = std::conj(u);
        const std::complex<double> cu = 0.5 * term.coeff * u;
        // ket factor: cu a_k + conj(cu) a+_k
        out.terms.push_back({cu, {{term.label, LadderKind::annihilate}}, {}});
        out.terms.push_back({std::conj(cu), {{term.label, LadderKind::create}}, {}});
        // bra factor is the dual of the same hermitian piece; duality is
        // antilinear, so the coefficients swap
        out.terms.push_back({std::conj(cu), {}, {{term.label, LadderKind::annihilate}}});
        out.terms.push_back({cu, {}, {{term.label, LadderKind::create}}});
    }
    return out;
}

TwinState apply_twin_operator(const TwinOperator& o, const TwinState& s, const FockConfig& cfg) {
    TwinState out;
    for (const auto& op : o.terms)
        for (const auto& t : s.terms()) {
            TwinTerm nt;
            nt.alpha = op.coeff * t.alpha;
            nt.ket = apply_ladder_string(t.ket, op.ket_ops, cfg);
            nt.bra = apply_ladder_string(t.bra, op.bra_ops, cfg);
            out.add_term(std::move(nt));
        }
    out.trim(cfg.prune_tol);
    return out;
}

FockOperator reduce_to_fock(const TwinOperator& o) {
    FockOperator out;
    for (const auto& t : o.terms) {
        LadderString s = t.ket_ops;
        const LadderString tail = adjoint(t.bra_ops);
        s.insert(s.end(), tail.begin(), tail.end());
        out.terms.emplace_back(t.coeff, std::move(s));
    }
    return out;
}

namespace {

int basis_index(std::vector<OccBasisState>& basis, const OccBasisState& b, double label_tol) {
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (states_equal(basis[i], b, label_tol)) return static_cast<int>(i);
    basis.push_back(b);
    return static_cast<int>(basis.size()) - 1;
}

} // namespace

double max_coefficient_deviation(const TwinState& a, const TwinState& b, double label_tol) {
    std::vector<OccBasisState> ket_basis, bra_basis;
    std::map<std::pair<int, int>, std::complex<double>> cells;
    auto scan = [&](const TwinState& s, double sign) {
        for (const auto& t : s.terms())
            for (const auto& ek : t.ket.entries())
                for (const auto& eb : t.bra.entries()) {
                    const int i = basis_index(ket_basis, ek.first, label_tol);
                    const int j = basis_index(bra_basis, eb.first, label_tol);
                    cells[{i, j}] += sign * t.alpha * ek.second * std::conj(eb.second);
                }
    };
    scan(a, 1.0);
    scan(b, -1.0);
    double worst = 0.0;
    for (const auto& [ij, c] : cells) worst = std::max(worst, std::abs(c));
    return worst;
}

int schmidt_rank(const TwinState& s, double rel_tol, double label_tol) {
    std::vector<OccBasisState> ket_basis, bra_basis;
    std::vector<std::tuple<int, int, std::complex<double>>> coeffs;
    for (const auto& t : s.terms())
        for (const auto& ek : t.ket.entries())
            for (const auto& eb : t.bra.entries()) {
                const int i = basis_index(ket_basis, ek.first, label_tol);
                const int j = basis_index(bra_basis, eb.first, label_tol);
                coeffs.emplace_back(i, j, t.alpha * ek.second * std::conj(eb.second));
            }
    if (coeffs.empty()) return 0;

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ket_basis.size()),
                                                static_cast<Eigen::Index>(bra_basis.size()));
    for (const auto& [i, j, c] : coeffs) M(i, j) += c;

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > rel_tol * sigma(0)) ++rank;
    return rank;
}

} // namespace twinqft
