#include "twinqft/sampling.hpp"

#include <cmath>

namespace twinqft {

double uniform_sample(SampleRng& rng, double lo, double hi) {
    // 53-bit mantissa fill; bit-identical across standard libraries, unlike
    // std::uniform_real_distribution.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int uniform_int_sample(SampleRng& rng, int lo, int hi) {
    const auto span = static_cast<unsigned long long>(hi - lo) + 1ull;
    return lo + static_cast<int>(rng() % span);
}

std::complex<double> random_coeff(SampleRng& rng) {
    const double re = uniform_sample(rng, -1.0, 1.0);
    const double im = uniform_sample(rng, -1.0, 1.0);
    return {re, im};
}

Vec3 random_axis(SampleRng& rng) {
    const double z = uniform_sample(rng, -1.0, 1.0);
    const double phi = uniform_sample(rng, 0.0, 2.0 * M_PI);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

LorentzTransform random_boost(SampleRng& rng, double min_speed, double max_speed) {
    const Vec3 axis = random_axis(rng);
    const double v = uniform_sample(rng, min_speed, max_speed);
    return LorentzTransform::boost(axis, v);
}

ModeLabel random_tachyon_label(SampleRng& rng, double mass, double min_factor,
                               double max_factor) {
    const Vec3 axis = random_axis(rng);
    const double k = mass * uniform_sample(rng, min_factor, max_factor);
    return ModeLabel(k * axis, mass);
}

LorentzTransform flipping_boost(SampleRng& rng, const ModeLabel& label, double max_speed) {
    const double threshold = label.omega() / label.k().norm(); // < 1 on the spacelike shell
    const double lo = threshold + 0.01 * (max_speed - threshold);
    const double v = uniform_sample(rng, lo, max_speed);
    return LorentzTransform::boost((1.0 / label.k().norm()) * label.k(), v);
}

LorentzTransform preserving_boost(SampleRng& rng, const ModeLabel& label, double max_speed) {
    const double v = uniform_sample(rng, 0.05, max_speed);
    return LorentzTransform::boost((-1.0 / label.k().norm()) * label.k(), v);
}

std::vector<ModeLabel> random_label_pool(SampleRng& rng, double mass, int count,
                                         double min_factor, double max_factor) {
    std::vector<ModeLabel> pool;
    pool.reserve(count);
    for (int i = 0; i < count; ++i)
        pool.push_back(random_tachyon_label(rng, mass, min_factor, max_factor));
    return pool;
}

OccBasisState random_occupancy(SampleRng& rng, const std::vector<ModeLabel>& pool,
                               int max_total) {
    const int total = uniform_int_sample(rng, 0, max_total);
    std::vector<ModeOccupation> occ;
    for (int i = 0; i < total; ++i) {
        const int j = uniform_int_sample(rng, 0, static_cast<int>(pool.size()) - 1);
        occ.push_back({pool[j], 1});
    }
    return OccBasisState(std::move(occ));
}

FockState random_fock_state(SampleRng& rng, const std::vector<ModeLabel>& pool, int max_total,
                            int terms) {
    FockState s;
    for (int i = 0; i < terms; ++i)
        s.add_term(random_occupancy(rng, pool, max_total), random_coeff(rng));
    return s;
}

TwinState random_separable_twin(SampleRng& rng, const std::vector<ModeLabel>& pool,
                                int max_total, int terms) {
    const std::complex<double> alpha = random_coeff(rng);
    FockState ket = random_fock_state(rng, pool, max_total, terms);
    FockState bra = random_fock_state(rng, pool, max_total, terms);
    return TwinState::separable(alpha, std::move(ket), std::move(bra));
}

TwinState random_twin_state(SampleRng& rng, const std::vector<ModeLabel>& pool, int max_total,
                            int terms, int max_products) {
    const int products = uniform_int_sample(rng, 1, max_products);
    TwinState s;
    for (int i = 0; i < products; ++i)
        s = s + random_separable_twin(rng, pool, max_total, terms);
    return s;
}

TwinOperator random_twin_operator(SampleRng& rng, const std::vector<ModeLabel>& pool,
                                  int max_terms, int max_len) {
    const auto random_string = [&](int len) {
        LadderString ops;
        for (int i = 0; i < len; ++i) {
            const int j = uniform_int_sample(rng, 0, static_cast<int>(pool.size()) - 1);
            const LadderKind kind =
                uniform_int_sample(rng, 0, 1) ? LadderKind::create : LadderKind::annihilate;
            ops.push_back({pool[j], kind});
        }
        return ops;
    };
    TwinOperator o;
    const int terms = uniform_int_sample(rng, 1, max_terms);
    for (int i = 0; i < terms; ++i) {
        TwinOpTerm t;
        t.coeff = random_coeff(rng);
        t.ket_ops = random_string(uniform_int_sample(rng, 0, max_len));
        t.bra_ops = random_string(uniform_int_sample(rng, 0, max_len));
        o.terms.push_back(std::move(t));
    }
    return o;
}

} // namespace twinqft
