#include "twinqft/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twinqft {

namespace {

bool label_before(const ModeLabel& a, const ModeLabel& b) {
    const auto ta = std::array<double, 4>{a.k().x, a.k().y, a.k().z, a.mass()};
    const auto tb = std::array<double, 4>{b.k().x, b.k().y, b.k().z, b.mass()};
    return ta < tb;
}

} // namespace

OccBasisState::OccBasisState(std::vector<ModeOccupation> occ, double label_tol) {
    for (const auto& o : occ) {
        if (o.count < 0) throw std::invalid_argument("occupation counts cannot be negative");
        if (o.count > 0) insert(o.label, o.count, label_tol);
    }
}

void OccBasisState::insert(const ModeLabel& l, int count, double label_tol) {
    for (auto& o : m_occ) {
        if (labels_equal(o.label, l, label_tol)) {
            o.count += count;
            return;
        }
    }
    auto it = std::find_if(m_occ.begin(), m_occ.end(),
                           [&](const ModeOccupation& o) { return label_before(l, o.label); });
    m_occ.insert(it, {l, count});
}

int OccBasisState::total() const {
    int n = 0;
    for (const auto& o : m_occ) n += o.count;
    return n;
}

double OccBasisState::energy() const {
    double e = 0.0;
    for (const auto& o : m_occ) e += o.count * o.label.omega();
    return e;
}

int OccBasisState::count_of(const ModeLabel& l, double label_tol) const {
    for (const auto& o : m_occ)
        if (labels_equal(o.label, l, label_tol)) return o.count;
    return 0;
}

OccBasisState OccBasisState::shifted(const ModeLabel& l, int delta, double label_tol) const {
    OccBasisState out = *this;
    for (std::size_t i = 0; i < out.m_occ.size(); ++i) {
        if (labels_equal(out.m_occ[i].label, l, label_tol)) {
            out.m_occ[i].count += delta;
            if (out.m_occ[i].count == 0)
                out.m_occ.erase(out.m_occ.begin() + static_cast<std::ptrdiff_t>(i));
            else if (out.m_occ[i].count < 0)
                throw std::logic_error("occupation driven negative");
            return out;
        }
    }
    if (delta <= 0) throw std::logic_error("shift below zero on an unoccupied mode");
    out.insert(l, delta, label_tol);
    return out;
}

bool states_equal(const OccBasisState& a, const OccBasisState& b, double label_tol) {
    const auto& oa = a.occupations();
    const auto& ob = b.occupations();
    if (oa.size() != ob.size()) return false;
    std::vector<bool> used(ob.size(), false);
    for (const auto& ea : oa) {
        bool matched = false;
        for (std::size_t j = 0; j < ob.size(); ++j) {
            if (used[j] || ob[j].count != ea.count) continue;
            if (labels_equal(ea.label, ob[j].label, label_tol)) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

LadderString adjoint(const LadderString& s) {
    LadderString out;
    out.reserve(s.size());
    for (auto it = s.rbegin(); it != s.rend(); ++it)
        out.push_back({it->label, it->kind == LadderKind::create ? LadderKind::annihilate
                                                                 : LadderKind::create});
    return out;
}

FockState FockState::vacuum() { return basis(OccBasisState{}); }

FockState FockState::basis(const OccBasisState& b, std::complex<double> amp) {
    FockState s;
    s.m_entries.emplace_back(b, amp);
    return s;
}

void FockState::add_term(const OccBasisState& b, std::complex<double> amp, double label_tol) {
    if (amp == std::complex<double>(0.0)) return;
    for (auto& e : m_entries) {
        if (states_equal(e.first, b, label_tol)) {
            e.second += amp;
            return;
        }
    }
    m_entries.emplace_back(b, amp);
}

void FockState::prune(double tol) {
    std::erase_if(m_entries, [&](const auto& e) { return std::abs(e.second) < tol; });
}

FockState operator+(const FockState& a, const FockState& b) {
    FockState out = a;
    for (const auto& e : b.entries()) out.add_term(e.first, e.second);
    return out;
}

FockState operator-(const FockState& a, const FockState& b) {
    return a + (std::complex<double>(-1.0) * b);
}

FockState operator*(std::complex<double> s, const FockState& a) {
    FockState out;
    for (const auto& e : a.entries()) out.add_term(e.first, s * e.second);
    return out;
}

std::complex<double> inner_product(const FockState& a, const FockState& b, double label_tol) {
    std::complex<double> acc = 0.0;
    for (const auto& ea : a.entries())
        for (const auto& eb : b.entries())
            if (states_equal(ea.first, eb.first, label_tol))
                acc += std::conj(ea.second) * eb.second;
    return acc;
}

double norm(const FockState& a) { return std::sqrt(std::abs(inner_product(a, a))); }

FockState apply_ladder(const FockState& s, const ModeLabel& k, LadderKind kind,
                       const FockConfig& cfg) {
    FockState out;
    for (const auto& e : s.entries()) {
        const int n = e.first.count_of(k, cfg.label_tol);
        if (kind == LadderKind::create) {
            if (e.first.total() + 1 > cfg.n_max)
                throw TruncationOverflow("creation would exceed the particle-number cap");
            out.add_term(e.first.shifted(k, +1, cfg.label_tol),
                         e.second * std::sqrt(double(n + 1)), cfg.label_tol);
        } else if (n > 0) {
            out.add_term(e.first.shifted(k, -1, cfg.label_tol), e.second * std::sqrt(double(n)),
                         cfg.label_tol);
        }
    }
    out.prune(cfg.prune_tol);
    return out;
}

FockState apply_ladder_string(const FockState& s, const LadderString& ops,
                              const FockConfig& cfg) {
    FockState cur = s;
    for (const auto& op : ops) cur = apply_ladder(cur, op.label, op.kind, cfg);
    return cur;
}

FockState apply_fock_operator(const FockState& s, const FockOperator& op,
                              const FockConfig& cfg) {
    FockState out;
    for (const auto& [coeff, ops] : op.terms) {
        const FockState piece = apply_ladder_string(s, ops, cfg);
        for (const auto& e : piece.entries())
            out.add_term(e.first, coeff * e.second, cfg.label_tol);
    }
    out.prune(cfg.prune_tol);
    return out;
}

FockState free_hamiltonian_apply(const FockState& s, double mass, const FockConfig& cfg) {
    FockState out;
    for (const auto& e : s.entries()) {
        for (const auto& o : e.first.occupations())
            if (std::abs(o.label.mass() - mass) > cfg.label_tol * mass)
                throw std::invalid_argument("state contains labels of a different mass");
        out.add_term(e.first, e.second * e.first.energy(), cfg.label_tol);
    }
    out.prune(cfg.prune_tol);
    return out;
}

FockState smeared_field_apply(const FockState& s, const WavePacket& packet,
                              const SpacetimePoint& x, const FockConfig& cfg) {
    FockState out;
    for (const auto& term : packet.terms) {
        auto u = mode_value(term.label, x);
        if (term.conjugated) u = std::conj(u);
        const std::complex<double> cu = term.coeff * u;
        const FockState down = apply_ladder(s, term.label, LadderKind::annihilate, cfg);
        const FockState up = apply_ladder(s, term.label, LadderKind::create, cfg);
        for (const auto& e : down.entries()) out.add_term(e.first, cu * e.second, cfg.label_tol);
        for (const auto& e : up.entries())
            out.add_term(e.first, std::conj(cu) * e.second, cfg.label_tol);
    }
    out.prune(cfg.prune_tol);
    return out;
}

double covariant_ladder_factor(const ModeLabel& k, const LadderConvention& conv) {
    if (!(conv.delta_v > 0.0)) throw std::invalid_argument("mode volume must be positive");
    const double cube = std::pow(2.0 * std::numbers::pi, 3);
    return std::sqrt(2.0 * k.omega() * cube / conv.delta_v);
}

FockState apply_covariant_ladder(const FockState& s, const ModeLabel& k, LadderKind kind,
                                 const LadderConvention& conv, const FockConfig& cfg) {
    return covariant_ladder_factor(k, conv) * apply_ladder(s, k, kind, cfg);
}

} // namespace twinqft
