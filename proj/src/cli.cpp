#include "twinqft/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "twinqft/dynamics.hpp"
#include "twinqft/errors.hpp"
#include "twinqft/lorentz_rep.hpp"
#include "twinqft/sampling.hpp"

namespace twinqft {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- utilities

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_complex_short(std::complex<double> c) {
    if (c.imag() == 0.0) return format_short(c.real());
    if (c.real() == 0.0) return format_short(c.imag()) + "i";
    std::string s = "(" + format_short(c.real());
    if (c.imag() >= 0.0) s += "+";
    return s + format_short(c.imag()) + "i)";
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_error(const std::string& kind, const std::string& message,
                json extra = json::object()) {
    extra["error"] = kind;
    extra["message"] = message;
    std::cerr << extra.dump() << "\n";
}

// Order-preserving map over [0, n); the pool size is the `workers` config
// knob and results land at their input index, so output never depends on
// scheduling.
template <typename F>
auto parallel_map(std::size_t n, int workers, F&& f) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    const std::size_t use = std::min<std::size_t>(std::max(workers, 1), n == 0 ? 1 : n);
    if (use <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(use);
    for (std::size_t w = 0; w < use; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one step");
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return xs;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(trim(text), &pos);
        if (pos != trim(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " from '" + text + "'");
    }
}

long long parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(trim(text), &pos);
        if (pos != trim(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " from '" + text + "'");
    }
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
    const auto parts = split(text, ',');
    if (parts.size() != 3)
        throw std::invalid_argument(what + " must be three comma-separated numbers, got '" +
                                    text + "'");
    return {parse_double(parts[0], what), parse_double(parts[1], what),
            parse_double(parts[2], what)};
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::string body = trim(text);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw std::invalid_argument(what + ": unbalanced brackets");
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    if (trim(body).empty()) return out;
    for (const auto& part : split(body, ',')) out.push_back(parse_double(part, what));
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json config_json(const RunConfig& c) {
    return {{"epsilon", c.epsilon},
            {"extrapolation_steps", c.extrapolation_steps},
            {"k_max", c.k_max},
            {"label_tol", c.label_tol},
            {"mass", c.mass},
            {"n_max", c.n_max},
            {"prune_tol", c.prune_tol},
            {"rel_tol", c.rel_tol},
            {"seed", c.seed},
            {"speeds", c.speeds},
            {"workers", c.workers}};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json four_json(const FourVector& v) { return json::array({v.t, v.x, v.y, v.z}); }

// Same convergence rule the throwing propagator wrappers use; rows breaking
// it are flagged in scan summaries instead of aborting the scan.
bool converged(const EvalResult& e, double rel_tol) {
    const double scale = std::max(1.0, std::abs(e.value));
    return !(e.err_estimate > rel_tol * std::abs(e.value) && e.err_estimate > 1e-10 * scale);
}

// ------------------------------------------------ twin-state presentation

std::string occ_ket_string(const OccBasisState& s) {
    if (s.is_vacuum()) return "|0>";
    std::string out = "|";
    bool first = true;
    for (const auto& o : s.occupations()) {
        if (!first) out += ", ";
        first = false;
        out += std::to_string(o.count) + "@(" + format_short(o.label.k().x) + "," +
               format_short(o.label.k().y) + "," + format_short(o.label.k().z) + ")";
    }
    return out + ">";
}

std::string occ_bra_string(const OccBasisState& s) {
    std::string k = occ_ket_string(s);
    return "<" + k.substr(1, k.size() - 2) + "|";
}

json occ_json(const OccBasisState& s) {
    json out = json::array();
    for (const auto& o : s.occupations())
        out.push_back({{"count", o.count}, {"k", vec3_json(o.label.k())}});
    return out;
}

// Joint product-basis coefficients c_ab of sum c_ab |a><b|; the bra entry is
// conjugated exactly the way the inner-product pairing does it.
std::map<std::pair<std::string, std::string>, std::pair<std::complex<double>, json>>
joint_coefficients(const TwinState& s) {
    std::map<std::pair<std::string, std::string>, std::pair<std::complex<double>, json>> out;
    for (const auto& term : s.terms())
        for (const auto& [kocc, kamp] : term.ket.entries())
            for (const auto& [bocc, bamp] : term.bra.entries()) {
                const auto key = std::make_pair(occ_ket_string(kocc), occ_bra_string(bocc));
                const std::complex<double> c = term.alpha * kamp * std::conj(bamp);
                auto it = out.find(key);
                if (it == out.end())
                    out.emplace(key, std::make_pair(c, json{{"bra", occ_json(bocc)},
                                                            {"ket", occ_json(kocc)}}));
                else
                    it->second.first += c;
            }
    return out;
}

std::string twin_string(const TwinState& s) {
    const auto coeffs = joint_coefficients(s);
    std::string out;
    for (const auto& [key, val] : coeffs) {
        if (std::abs(val.first) < 1e-14) continue;
        if (!out.empty()) out += " + ";
        out += format_complex_short(val.first) + " " + key.first + key.second;
    }
    return out.empty() ? "0" : out;
}

json twin_json(const TwinState& s) {
    json terms = json::array();
    for (const auto& [key, val] : joint_coefficients(s)) {
        if (std::abs(val.first) < 1e-14) continue;
        json t = val.second;
        t["amp_im"] = val.first.imag();
        t["amp_re"] = val.first.real();
        terms.push_back(std::move(t));
    }
    return terms;
}

// -------------------------------------------------------- invariance suite

struct CheckRow {
    std::string name;
    double max_residual;
    double tolerance;
    int samples;
};

std::vector<CheckRow> run_invariance_checks(const RunConfig& c) {
    SampleRng rng(c.seed);
    const FockConfig cfg = c.fock();
    std::vector<CheckRow> rows;

    {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i)
            worst = std::max(worst, vacuum_invariance_check(random_boost(rng)));
        rows.push_back({"twin_vacuum_invariance", worst, 0.0, 50});
    }
    {
        // one third generic boosts, one third forced flips of k, one third
        // boosts that provably preserve l, so every regime is exercised
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const ModeLabel k = random_tachyon_label(rng, c.mass, 1.05, 4.0);
            const ModeLabel l = random_tachyon_label(rng, c.mass, 1.05, 4.0);
            const LorentzTransform L = (i % 3 == 0)   ? random_boost(rng)
                                       : (i % 3 == 1) ? flipping_boost(rng, k)
                                                      : preserving_boost(rng, l);
            worst = std::max(worst, commutation_preservation_check(L, k, l, cfg));
        }
        rows.push_back({"commutation_preservation", worst, 1e-12, 100});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const ModeLabel k = random_tachyon_label(rng, c.mass, 1.05, 3.0);
            auto pool = random_label_pool(rng, c.mass, 2);
            pool.push_back(k);
            const std::vector<TwinState> states = {
                TwinState::vacuum(),
                TwinState::separable(1.0, FockState::basis(OccBasisState({{k, 1}})),
                                     FockState::vacuum()),
                random_separable_twin(rng, pool, 2, 2),
            };
            const LorentzTransform L =
                (i % 2 == 0) ? random_boost(rng) : flipping_boost(rng, k);
            worst = std::max(worst, c_operator_transform_check(L, k, states, cfg));
        }
        rows.push_back({"c_operator_transform", worst, 1e-12, 20});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const auto pool = random_label_pool(rng, c.mass, 3);
            const TwinState s = random_twin_state(rng, pool, 3, 2);
            const double t = uniform_sample(rng, -4.0, 4.0);
            const auto before = trace_functional(s, c.label_tol);
            const auto after =
                trace_functional(evolve(s, t, EvolutionSign::minus, c.mass, cfg), c.label_tol);
            worst = std::max(worst, std::abs(after - before));
        }
        rows.push_back({"trace_evolution_invariance", worst, 1e-12, 50});
    }
    {
        // brute-force reduction identity: Tr(O s) against the single-factor
        // matrix element of the reduced operator, on separable states
        double worst = 0.0;
        const auto pool = random_label_pool(rng, c.mass, 3);
        std::vector<TwinOperator> ops;
        for (int i = 0; i < 20; ++i) ops.push_back(random_twin_operator(rng, pool, 2, 1));
        std::vector<TwinState> states;
        for (int i = 0; i < 20; ++i) states.push_back(random_separable_twin(rng, pool, 2, 2));
        for (const auto& o : ops) {
            const FockOperator reduced = reduce_to_fock(o);
            for (const auto& s : states) {
                const auto lhs = trace_functional(apply_twin_operator(o, s, cfg), c.label_tol);
                const auto& term = s.terms().front();
                const auto rhs =
                    term.alpha * inner_product(term.bra,
                                               apply_fock_operator(term.ket, reduced, cfg),
                                               c.label_tol);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        rows.push_back({"reduction_identity", worst, 1e-12, 400});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const ModeLabel k = random_tachyon_label(rng, c.mass, 1.05, 5.0);
            const LorentzTransform L =
                (i % 2 == 0) ? flipping_boost(rng, k) : random_boost(rng);
            const SpacetimePoint x{uniform_sample(rng, -3.0, 3.0),
                                   uniform_sample(rng, 0.3, 3.0) * random_axis(rng)};
            worst = std::max(worst, std::abs(mode_boost_residual(L, k, x).phase));
        }
        rows.push_back({"mode_boost_phase", worst, 1e-9, 100});
    }
    return rows;
}

int cmd_invariance_suite(const RunConfig& c) {
    const auto checks = run_invariance_checks(c);
    json jchecks = json::array();
    bool all = true;
    for (const auto& r : checks) {
        const bool pass = r.max_residual <= r.tolerance;
        all = all && pass;
        jchecks.push_back({{"check_name", r.name},
                           {"max_residual", r.max_residual},
                           {"pass", pass},
                           {"samples", r.samples},
                           {"tolerance", r.tolerance}});
    }
    const json report{{"all_pass", all}, {"checks", jchecks}, {"config", config_json(c)}};
    const std::string text = report.dump(2) + "\n";
    write_file(fs::path(c.out_dir) / "invariance_suite.json", text);
    std::cout << text;
    if (!all) {
        emit_error("CheckFailed", "invariance suite has failing checks");
        return 1;
    }
    return 0;
}

// ----------------------------------------------------------------- scans

struct GridArgs {
    double t_min = 0.2, t_max = 1.4;
    int t_steps = 5;
    double r_min = 1.7, r_max = 3.3;
    int r_steps = 5;
};

std::string csv_join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ",";
        line += fields[i];
    }
    return line + "\n";
}

// Tachyonic vs ordinary commutator values over a (t, r) point list; shared
// by the standalone subcommand and the scan's contrast flag.
json pauli_jordan_contrast(const RunConfig& c, const std::vector<Interval>& points,
                           const fs::path& csv_path) {
    const QuadratureParams q = c.quadrature();
    struct Row {
        Interval x;
        EvalResult tach, ord;
    };
    const auto rows = parallel_map(points.size(), c.workers, [&](std::size_t i) {
        Row row;
        row.x = points[i];
        row.tach = pauli_jordan_eval(points[i], c.mass, Dispersion::tachyonic, q);
        row.ord = pauli_jordan_eval(points[i], c.mass, Dispersion::ordinary, q);
        return row;
    });

    std::string csv = csv_join(
        {"t", "r", "tach_re", "tach_im", "tach_err", "ord_re", "ord_im", "ord_err"});
    json jrows = json::array();
    bool contrast = true;
    for (const auto& row : rows) {
        csv += csv_join({format_double(row.x.t), format_double(row.x.r),
                         format_double(row.tach.value.real()),
                         format_double(row.tach.value.imag()),
                         format_double(row.tach.err_estimate),
                         format_double(row.ord.value.real()),
                         format_double(row.ord.value.imag()),
                         format_double(row.ord.err_estimate)});
        const bool spacelike = row.x.r > std::abs(row.x.t);
        const bool ord_zero = std::abs(row.ord.value) <= 10.0 * row.ord.err_estimate;
        const bool tach_resolved = std::abs(row.tach.value) > 10.0 * row.tach.err_estimate;
        if (spacelike) contrast = contrast && ord_zero && tach_resolved;
        jrows.push_back({{"ordinary_consistent_with_zero", ord_zero},
                         {"r", row.x.r},
                         {"spacelike", spacelike},
                         {"t", row.x.t},
                         {"tachyonic_resolved", tach_resolved}});
    }
    write_file(csv_path, csv);
    return {{"contrast_at_spacelike", contrast}, {"csv", csv_path.string()}, {"rows", jrows}};
}

int cmd_pauli_jordan(const RunConfig& c, const std::vector<double>& ts,
                     const std::vector<double>& rs) {
    std::vector<Interval> points;
    for (double t : ts)
        for (double r : rs) {
            if (t == 0.0 && r == 0.0)
                throw std::invalid_argument("grid touches the contact singularity t = r = 0");
            points.push_back({t, r});
        }
    if (points.empty()) throw std::invalid_argument("empty point grid");
    const json summary =
        pauli_jordan_contrast(c, points, fs::path(c.out_dir) / "pauli_jordan_contrast.csv");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_propagator_scan(const RunConfig& c, const GridArgs& g, const Vec3& axis_in,
                        bool with_pj) {
    const double an = axis_in.norm();
    if (an <= 0.0) throw std::invalid_argument("boost axis must be nonzero");
    const Vec3 axis = (1.0 / an) * axis_in;

    const auto ts = linspace(g.t_min, g.t_max, g.t_steps);
    const auto rs = linspace(g.r_min, g.r_max, g.r_steps);
    std::vector<FourVector> points;
    std::vector<Interval> intervals;
    for (double t : ts)
        for (double r : rs) {
            if (r < 0.0) throw std::invalid_argument("radial separation must be >= 0");
            if (t == 0.0 && r == 0.0)
                throw std::invalid_argument("grid touches the contact singularity t = r = 0");
            points.push_back({t, r * axis.x, r * axis.y, r * axis.z});
            intervals.push_back({t, r});
        }

    std::vector<LorentzTransform> boosts;
    boosts.reserve(c.speeds.size());
    for (double v : c.speeds) boosts.push_back(LorentzTransform::boost(axis, v));

    const QuadratureParams q = c.quadrature();
    const auto refs = parallel_map(points.size(), c.workers, [&](std::size_t i) {
        return feynman_propagator_eval(reduce_interval(points[i]), c.mass, q);
    });

    // one CSV row per (point, boost) pair, point-major, merged by input order
    struct PairRow {
        Interval moved;
        double speed = 0.0;
        EvalResult e;
    };
    const std::size_t nb = boosts.size();
    const auto pairs = parallel_map(points.size() * nb, c.workers, [&](std::size_t idx) {
        const std::size_t pi = idx / nb, bi = idx % nb;
        PairRow row;
        row.moved = reduce_interval(boosts[bi].apply(points[pi]));
        row.speed = c.speeds[bi];
        row.e = feynman_propagator_eval(row.moved, c.mass, q);
        return row;
    });

    std::string csv = csv_join({"t", "r", "boost_speed", "re", "im", "err_estimate"});
    json non_convergent = json::array();
    double max_rel = 0.0, max_re = 0.0;
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        const PairRow& row = pairs[idx];
        const EvalResult& ref = refs[idx / nb];
        csv += csv_join({format_double(row.moved.t), format_double(row.moved.r),
                         format_double(row.speed), format_double(row.e.value.real()),
                         format_double(row.e.value.imag()),
                         format_double(row.e.err_estimate)});
        if (!converged(row.e, c.rel_tol)) non_convergent.push_back(idx);
        const double denom = std::abs(ref.value);
        if (denom > 0.0)
            max_rel = std::max(max_rel, std::abs(row.e.value - ref.value) / denom);
        const double re_denom = std::abs(ref.value.real());
        if (re_denom > 0.0)
            max_re = std::max(max_re,
                              std::abs(row.e.value.real() - ref.value.real()) / re_denom);
    }
    const fs::path csv_path = fs::path(c.out_dir) / "propagator_scan.csv";
    write_file(csv_path, csv);

    json refrows = json::array();
    for (std::size_t i = 0; i < refs.size(); ++i)
        refrows.push_back({{"err_estimate", refs[i].err_estimate},
                           {"im", refs[i].value.imag()},
                           {"r", intervals[i].r},
                           {"re", refs[i].value.real()},
                           {"t", intervals[i].t}});

    json summary{{"csv", csv_path.string()},
                 {"max_real_part_deviation", max_re},
                 {"max_rel_deviation", max_rel},
                 {"non_convergent_rows", non_convergent},
                 {"points", points.size()},
                 {"references", refrows},
                 {"rows", pairs.size()},
                 {"speeds", c.speeds}};
    if (with_pj)
        summary["pauli_jordan"] = pauli_jordan_contrast(
            c, intervals, fs::path(c.out_dir) / "pauli_jordan_contrast.csv");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------- boost demo

Vec3 perpendicular_unit(const Vec3& a) {
    const double ax = std::abs(a.x), ay = std::abs(a.y), az = std::abs(a.z);
    Vec3 e{0.0, 0.0, 1.0};
    if (ax <= ay && ax <= az)
        e = {1.0, 0.0, 0.0};
    else if (ay <= az)
        e = {0.0, 1.0, 0.0};
    const Vec3 p = e - dot(e, a) * a;
    return (1.0 / p.norm()) * p;
}

int cmd_boost_demo(const RunConfig& c, const Vec3& kvec, double speed, const Vec3& axis_in,
                   double demo_band) {
    const ModeLabel k(kvec, c.mass);
    const Vec3 axis =
        axis_in.norm() > 0.0 ? (1.0 / axis_in.norm()) * axis_in : (1.0 / kvec.norm()) * kvec;
    const double k_par = dot(k.k(), axis);
    // boosting against (or across) the motion can never flip the sign
    const double threshold =
        k_par > 0.0 ? k.omega() / k_par : std::numeric_limits<double>::infinity();

    try {
        if (std::isfinite(threshold) && std::abs(speed - threshold) <= demo_band)
            throw DegenerateBoost("speed " + format_short(speed) +
                                  " is inside the degeneracy window around the flip "
                                  "threshold omega/k_axis = " +
                                  format_double(threshold));

        const LorentzTransform L = LorentzTransform::boost(axis, speed);
        const BoostAction action = classify_mode_boost(L, k);
        const FourVector bp = action.label.four_momentum();
        const double shell_residual =
            std::abs(minkowski_dot(bp, bp) + c.mass * c.mass);

        const FockConfig cfg = c.fock();
        const TwinState single = TwinState::separable(
            1.0, FockState::basis(OccBasisState({{k, 1}})), FockState::vacuum());
        const TwinState single_after = represent_boost(L, single, cfg);

        const ModeLabel partner(kvec.norm() * perpendicular_unit(axis), c.mass);
        FockState sup_ket;
        sup_ket.add_term(OccBasisState({{k, 1}}), 1.0 / std::sqrt(2.0), c.label_tol);
        sup_ket.add_term(OccBasisState({{partner, 1}}), 1.0 / std::sqrt(2.0), c.label_tol);
        const TwinState sup = TwinState::separable(1.0, sup_ket, FockState::vacuum());
        const TwinState sup_after = represent_boost(L, sup, cfg);

        const auto tr_single = trace_functional(single, c.label_tol);
        const auto tr_single_after = trace_functional(single_after, c.label_tol);
        const auto tr_sup = trace_functional(sup, c.label_tol);
        const auto tr_sup_after = trace_functional(sup_after, c.label_tol);

        std::ostringstream text;
        text << "mode: k = (" << format_short(kvec.x) << ", " << format_short(kvec.y) << ", "
             << format_short(kvec.z) << "), mass " << format_short(c.mass) << ", omega "
             << format_short(k.omega()) << "\n";
        text << "boost: axis (" << format_short(axis.x) << ", " << format_short(axis.y)
             << ", " << format_short(axis.z) << "), speed " << format_short(speed)
             << "; flip threshold speed " << format_double(threshold) << "\n";
        text << "classification: " << (action.flipped() ? "flipped" : "preserved") << "\n";
        text << "boosted label: k' = (" << format_short(action.label.k().x) << ", "
             << format_short(action.label.k().y) << ", " << format_short(action.label.k().z)
             << "), on-shell residual " << format_short(shell_residual) << "\n";
        text << "single particle:\n";
        text << "  before: " << twin_string(single)
             << "   [schmidt rank " << schmidt_rank(single) << ", trace "
             << format_complex_short(tr_single) << "]\n";
        text << "  after:  " << twin_string(single_after) << "   [schmidt rank "
             << schmidt_rank(single_after) << ", trace "
             << format_complex_short(tr_single_after) << "]\n";
        text << "superposition with the transverse partner mode ("
             << format_short(partner.k().x) << ", " << format_short(partner.k().y) << ", "
             << format_short(partner.k().z) << "):\n";
        text << "  before: " << twin_string(sup) << "   [schmidt rank " << schmidt_rank(sup)
             << "]\n";
        text << "  after:  " << twin_string(sup_after) << "   [schmidt rank "
             << schmidt_rank(sup_after) << "]\n";

        const json report{
            {"boost", {{"axis", vec3_json(axis)}, {"speed", speed}}},
            {"boosted_label",
             {{"k", vec3_json(action.label.k())},
              {"omega", action.label.omega()},
              {"on_shell_residual", shell_residual}}},
            {"classification", action.flipped() ? "flipped" : "preserved"},
            {"flip_threshold_speed", threshold},
            {"mode", {{"k", vec3_json(kvec)}, {"mass", c.mass}, {"omega", k.omega()}}},
            {"single_particle",
             {{"after", twin_json(single_after)},
              {"before", twin_json(single)},
              {"schmidt_rank_after", schmidt_rank(single_after)},
              {"schmidt_rank_before", schmidt_rank(single)},
              {"trace_after_im", tr_single_after.imag()},
              {"trace_after_re", tr_single_after.real()},
              {"trace_before_im", tr_single.imag()},
              {"trace_before_re", tr_single.real()}}},
            {"superposition",
             {{"after", twin_json(sup_after)},
              {"before", twin_json(sup)},
              {"partner_k", vec3_json(partner.k())},
              {"schmidt_rank_after", schmidt_rank(sup_after)},
              {"schmidt_rank_before", schmidt_rank(sup)},
              {"trace_after_im", tr_sup_after.imag()},
              {"trace_after_re", tr_sup_after.real()},
              {"trace_before_im", tr_sup.imag()},
              {"trace_before_re", tr_sup.real()}}}};

        const std::string jtext = report.dump(2) + "\n";
        write_file(fs::path(c.out_dir) / "boost_demo.json", jtext);
        std::cout << text.str() << jtext;
        return 0;
    } catch (const DegenerateBoost& e) {
        emit_error("DegenerateBoost", e.what(), {{"threshold_speed", threshold}});
        return 2;
    }
}

// ------------------------------------------------------- yukawa covariance

Process built_in_emission() {
    // balanced 2 -> 2' + tachyon kinematics, everything exactly on shell
    const double kx = std::sqrt(1.0625);
    Process p;
    p.coupling = 0.7;
    p.legs = {
        {Species::subluminal, 2.0, {2.25, kx, 0.0, 0.0}, LegDirection::incoming},
        {Species::subluminal, 2.0, {2.0, 0.0, 0.0, 0.0}, LegDirection::outgoing},
        {Species::tachyon, 1.0, {0.25, kx, 0.0, 0.0}, LegDirection::outgoing},
    };
    return p;
}

int cmd_yukawa_covariance(const RunConfig& c, const std::string& process_file,
                          const Vec3& axis_in) {
    const Process p =
        process_file.empty() ? built_in_emission() : process_from_json(slurp(process_file));
    validate_process(p);
    const Amplitude amp = yukawa_first_order(p);

    Vec3 axis{1.0, 0.0, 0.0};
    if (axis_in.norm() > 0.0) {
        axis = (1.0 / axis_in.norm()) * axis_in;
    } else {
        for (const auto& leg : p.legs)
            if (leg.species == Species::tachyon && leg.momentum.spatial().norm() > 0.0) {
                const Vec3 d = leg.momentum.spatial();
                axis = (1.0 / d.norm()) * d;
                break;
            }
    }

    const double tolerance = 1e-9;
    json rows = json::array();
    bool all = true;
    for (double v : c.speeds) {
        const LorentzTransform L = LorentzTransform::boost(axis, v);
        const Process q = boost_process(L, p);
        const Amplitude boosted = yukawa_first_order(q);
        const FourVector expect = L.apply(amp.momentum_balance);
        const FourVector diff = boosted.momentum_balance - expect;
        const double residual = std::max(std::max(std::abs(diff.t), std::abs(diff.x)),
                                         std::max(std::abs(diff.y), std::abs(diff.z)));
        bool flipped = false;
        for (std::size_t i = 0; i < p.legs.size(); ++i)
            if (p.legs[i].species == Species::tachyon &&
                p.legs[i].direction != q.legs[i].direction)
                flipped = true;
        const bool pass = residual <= tolerance;
        all = all && pass;
        rows.push_back({{"pass", pass},
                        {"residual", residual},
                        {"speed", v},
                        {"tachyon_flipped", flipped}});
    }

    const json report{{"all_pass", all},
                      {"allowed", kinematically_allowed(amp, p)},
                      {"axis", vec3_json(axis)},
                      {"balance", four_json(amp.momentum_balance)},
                      {"coupling", p.coupling},
                      {"prefactor_im", amp.prefactor.imag()},
                      {"prefactor_re", amp.prefactor.real()},
                      {"rows", rows},
                      {"tolerance", tolerance}};
    const std::string text = report.dump(2) + "\n";
    write_file(fs::path(c.out_dir) / "yukawa_covariance.json", text);
    std::cout << text;
    if (!all) {
        emit_error("CheckFailed", "yukawa covariance residual above tolerance");
        return 1;
    }
    return 0;
}

} // namespace

// ------------------------------------------------------------- run config

void RunConfig::validate() const {
    const auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    if (!(mass > 0.0) || !std::isfinite(mass)) fail("mass must be positive and finite");
    if (n_max < 1) fail("n_max must be >= 1");
    if (!(label_tol > 0.0)) fail("label_tol must be > 0");
    if (!(prune_tol > 0.0)) fail("prune_tol must be > 0");
    if (!(rel_tol > 0.0) || rel_tol > 0.1) fail("rel_tol must lie in (0, 0.1]");
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (k_max < 0.0) fail("k_max must be >= 0 (0 selects the automatic cutoff)");
    if (extrapolation_steps < 1 || extrapolation_steps > 12)
        fail("extrapolation_steps must lie in [1, 12]");
    if (workers < 1) fail("workers must be >= 1");
    if (out_dir.empty()) fail("output directory must not be empty");
    for (double v : speeds)
        if (!(v >= 0.0) || v >= 1.0) fail("boost speeds must lie in [0, 1)");
}

std::vector<double> parse_speed_list(const std::string& text) {
    return parse_double_list(text, "speed list");
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "mass")
        c.mass = parse_double(value, key);
    else if (key == "n_max" || key == "nmax")
        c.n_max = static_cast<int>(parse_int(value, key));
    else if (key == "label_tol")
        c.label_tol = parse_double(value, key);
    else if (key == "prune_tol")
        c.prune_tol = parse_double(value, key);
    else if (key == "rel_tol" || key == "tol")
        c.rel_tol = parse_double(value, key);
    else if (key == "epsilon")
        c.epsilon = parse_double(value, key);
    else if (key == "k_max" || key == "kmax")
        c.k_max = parse_double(value, key);
    else if (key == "extrapolation_steps" || key == "steps")
        c.extrapolation_steps = static_cast<int>(parse_int(value, key));
    else if (key == "seed")
        c.seed = static_cast<unsigned long long>(parse_int(value, key));
    else if (key == "out_dir" || key == "out")
        c.out_dir = trim(value);
    else if (key == "speeds")
        c.speeds = parse_double_list(value, key);
    else if (key == "workers")
        c.workers = static_cast<int>(parse_int(value, key));
    else
        throw std::invalid_argument("unknown config key: " + key);
}

RunConfig config_from_file(const std::string& path) {
    const std::string text = slurp(path);
    RunConfig c;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("config file is not valid JSON: ") +
                                        e.what());
        }
        for (const auto& [key, value] : j.items())
            apply_config_entry(c, key,
                               value.is_string() ? value.get<std::string>() : value.dump());
    } else {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line is not key = value: '" + line + "'");
            apply_config_entry(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    return c;
}

// ------------------------------------------------------------ entry point

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"covariant quantization toolkit for a tachyonic scalar field"};
    app.require_subcommand(1);

    std::string config_file, out_dir, speeds_text;
    double mass = 0, tol = 0, label_tol = 0, prune_tol = 0, epsilon = 0, kmax = 0;
    int nmax = 0, steps = 0, workers = 0;
    unsigned long long seed = 0;

    auto* o_config = app.add_option("--config", config_file,
                                    "config file, flat key = value lines or a JSON object");
    auto* o_mass = app.add_option("--mass", mass, "tachyon mass (default 1)");
    auto* o_nmax = app.add_option("--nmax", nmax, "total particle-number cap (default 4)");
    auto* o_seed = app.add_option("--seed", seed, "random seed (default 42)");
    auto* o_out = app.add_option("--out", out_dir, "output directory (default .)");
    auto* o_tol = app.add_option("--tol", tol, "quadrature relative tolerance (default 1e-6)");
    auto* o_speeds = app.add_option("--speeds", speeds_text,
                                    "comma-separated boost speeds (default 0.3,0.6,0.9)");
    auto* o_label_tol = app.add_option("--label-tol", label_tol, "mode-label tolerance");
    auto* o_prune_tol = app.add_option("--prune-tol", prune_tol, "amplitude prune tolerance");
    auto* o_epsilon = app.add_option("--epsilon", epsilon, "top of the regulator ladder");
    auto* o_kmax = app.add_option("--kmax", kmax, "radial cutoff (0 = automatic)");
    auto* o_steps = app.add_option("--steps", steps, "extrapolation ladder rungs (default 5)");
    auto* o_workers = app.add_option("--workers", workers, "scan worker pool size (default 1)");

    auto* suite = app.add_subcommand(
        "invariance-suite", "seeded residual checks of the boost representation");
    suite->fallthrough();

    GridArgs grid;
    std::string scan_axis = "1,0,0";
    bool scan_pj = false;
    auto* scan = app.add_subcommand("propagator-scan",
                                    "time-ordered two-point function over a (t, r) grid, "
                                    "evaluated at every boosted image point");
    scan->fallthrough();
    scan->add_option("--t-min", grid.t_min, "grid start in t (default 0.2)");
    scan->add_option("--t-max", grid.t_max, "grid end in t (default 1.4)");
    scan->add_option("--t-steps", grid.t_steps, "grid points in t (default 5)");
    scan->add_option("--r-min", grid.r_min, "grid start in r (default 1.7)");
    scan->add_option("--r-max", grid.r_max, "grid end in r (default 3.3)");
    scan->add_option("--r-steps", grid.r_steps, "grid points in r (default 5)");
    scan->add_option("--axis", scan_axis, "boost axis (default 1,0,0)");
    scan->add_flag("--pauli-jordan", scan_pj,
                   "also emit the tachyonic vs ordinary commutator contrast");

    std::string pj_ts = "0.3,0.6", pj_rs = "1.4,2,2.6";
    auto* pj = app.add_subcommand("pauli-jordan",
                                  "tachyonic vs ordinary commutator function contrast");
    pj->fallthrough();
    pj->add_option("--t", pj_ts, "comma-separated t values (default 0.3,0.6)");
    pj->add_option("--r", pj_rs, "comma-separated r values (default 1.4,2,2.6)");

    std::string demo_k = "1.5,0,0", demo_axis;
    double demo_speed = 0.9, demo_band = 1e-3;
    auto* demo = app.add_subcommand("boost-demo",
                                    "single-mode emission scene: classification, twin state "
                                    "before/after, Schmidt ranks, traces");
    demo->fallthrough();
    demo->add_option("--k", demo_k, "mode wavevector (default 1.5,0,0)");
    demo->add_option("--speed", demo_speed, "boost speed (default 0.9)");
    demo->add_option("--axis", demo_axis, "boost axis (default: along k)");
    demo->add_option("--degenerate-band", demo_band,
                     "speed window around the flip threshold rejected as degenerate "
                     "(default 1e-3)");

    std::string process_file, yuk_axis;
    auto* yuk = app.add_subcommand(
        "yukawa-covariance", "first-order emission amplitude: boosted momentum balance "
                             "against the boosted-frame recomputation");
    yuk->fallthrough();
    yuk->add_option("--process", process_file,
                    "process JSON file (default: built-in balanced emission)");
    yuk->add_option("--axis", yuk_axis, "boost axis (default: tachyon direction)");

    auto* all = app.add_subcommand("run-all", "every subcommand with its defaults");
    all->fallthrough();

    try {
        app.parse(argc, argv);

        RunConfig c;
        if (o_config->count()) c = config_from_file(config_file);
        if (o_mass->count()) c.mass = mass;
        if (o_nmax->count()) c.n_max = nmax;
        if (o_seed->count()) c.seed = seed;
        if (o_out->count()) c.out_dir = out_dir;
        if (o_tol->count()) c.rel_tol = tol;
        if (o_speeds->count()) c.speeds = parse_speed_list(speeds_text);
        if (o_label_tol->count()) c.label_tol = label_tol;
        if (o_prune_tol->count()) c.prune_tol = prune_tol;
        if (o_epsilon->count()) c.epsilon = epsilon;
        if (o_kmax->count()) c.k_max = kmax;
        if (o_steps->count()) c.extrapolation_steps = steps;
        if (o_workers->count()) c.workers = workers;
        c.validate();

        if (suite->parsed()) return cmd_invariance_suite(c);
        if (scan->parsed())
            return cmd_propagator_scan(c, grid, parse_vec3(scan_axis, "boost axis"), scan_pj);
        if (pj->parsed())
            return cmd_pauli_jordan(c, parse_double_list(pj_ts, "t list"),
                                    parse_double_list(pj_rs, "r list"));
        if (demo->parsed()) {
            const Vec3 axis =
                demo_axis.empty() ? Vec3{0.0, 0.0, 0.0} : parse_vec3(demo_axis, "boost axis");
            return cmd_boost_demo(c, parse_vec3(demo_k, "mode wavevector"), demo_speed, axis,
                                  demo_band);
        }
        if (yuk->parsed()) {
            const Vec3 axis =
                yuk_axis.empty() ? Vec3{0.0, 0.0, 0.0} : parse_vec3(yuk_axis, "boost axis");
            return cmd_yukawa_covariance(c, process_file, axis);
        }
        if (all->parsed()) {
            json summary;
            int rc = 0;
            const auto step = [&](const std::string& name, int code) {
                summary[name] = code;
                rc = std::max(rc, code);
            };
            step("invariance_suite", cmd_invariance_suite(c));
            step("propagator_scan",
                 cmd_propagator_scan(c, GridArgs{}, Vec3{1.0, 0.0, 0.0}, true));
            step("pauli_jordan",
                 cmd_pauli_jordan(c, parse_double_list(pj_ts, "t list"),
                                  parse_double_list(pj_rs, "r list")));
            step("boost_demo",
                 cmd_boost_demo(c, Vec3{1.5, 0.0, 0.0}, 0.9, Vec3{0.0, 0.0, 0.0}, 1e-3));
            step("yukawa_covariance", cmd_yukawa_covariance(c, "", Vec3{0.0, 0.0, 0.0}));
            summary["exit"] = rc;
            std::cout << summary.dump(2) << "\n";
            return rc;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        emit_error("UsageError", e.what());
        return 2;
    } catch (const DegenerateBoost& e) {
        emit_error("DegenerateBoost", e.what());
        return 2;
    } catch (const OffShellLeg& e) {
        emit_error("OffShellLeg", e.what());
        return 2;
    } catch (const SingularPoint& e) {
        emit_error("SingularPoint", e.what());
        return 2;
    } catch (const NonConvergent& e) {
        emit_error("NonConvergent", e.what());
        return 2;
    } catch (const TruncationOverflow& e) {
        emit_error("TruncationOverflow", e.what());
        return 2;
    } catch (const IncommensurateMode& e) {
        emit_error("IncommensurateMode", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("InvalidArgument", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return 2;
    }
}

} // namespace twinqft
