#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strag/common.hpp"
#include "strag/decoder.hpp"
#include "strag/designs.hpp"
#include "strag/metrics.hpp"
#include "strag/plan.hpp"
#include "strag/schemes.hpp"
#include "strag/simulator.hpp"
#include "strag/sparse_matrix.hpp"

namespace strag {

// ---------------------------------------------------------------------------
// Configuration JSON.
//
// Scheme object:
//   {"scheme": "beta-matvec", "n": 12, "gamma": "1/4", "beta": 3,
//    "classes": "trivial", "seed": 1}
// Class specs: "trivial", "shifted-pair", {"kirkman": [0,1]},
//   {"trivial": {"delta": 30, "count": 1}}, or an explicit design-set object
//   {"points": ..., "classes": [[[...]]]}.
// ---------------------------------------------------------------------------

namespace detail {

inline DesignSet parse_classes(const nlohmann::json& j, long n, Rational gamma, long beta) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "trivial") {
            const long a2 = static_cast<long>(gamma.den);
            if (n % a2 != 0) throw parameter_error("classes=trivial needs n divisible by gamma.den");
            return trivial_classes(beta * a2, beta, n / a2);
        }
        if (s == "shifted-pair") {
            const long a2 = static_cast<long>(gamma.den);
            return shifted_pair_classes(beta * a2);
        }
        if (s == "kirkman") return kirkman_classes();
        throw parameter_error("unknown class spec: " + s);
    }
    if (j.contains("kirkman")) {
        DesignSet all = kirkman_classes();
        std::vector<ParallelClass> chosen;
        for (long idx : j.at("kirkman").get<std::vector<long>>()) {
            if (idx < 0 || idx >= static_cast<long>(all.classes.size()))
                throw parameter_error("kirkman class index out of range");
            chosen.push_back(all.classes[idx]);
        }
        return DesignSet(15, chosen);
    }
    if (j.contains("trivial")) {
        const auto& t = j.at("trivial");
        return trivial_classes(t.at("delta").get<long>(), beta, t.at("count").get<long>());
    }
    return design_set_from_json(j);
}

inline Rational parse_rational(const nlohmann::json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>(), 1);
    throw parameter_error("rationals must be written as \"a/b\" strings");
}

}  // namespace detail

inline SchemeConfig scheme_config_from_json(const nlohmann::json& j) {
    SchemeConfig cfg;
    cfg.scheme = j.at("scheme").get<std::string>();
    cfg.n = j.at("n").get<long>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    auto rat = [&](const char* key, Rational& out) {
        if (j.contains(key)) out = detail::parse_rational(j.at(key));
    };
    if (j.contains("gamma")) cfg.gamma_a = detail::parse_rational(j.at("gamma"));
    rat("gamma_a", cfg.gamma_a);
    rat("gamma_b", cfg.gamma_b);
    rat("gamma_u", cfg.gamma_u);
    rat("gamma_c", cfg.gamma_c);
    rat("gamma_au", cfg.gamma_au);
    rat("gamma_ac", cfg.gamma_ac);
    if (j.contains("beta")) cfg.beta_a = j.at("beta").get<long>();
    if (j.contains("beta_a")) cfg.beta_a = j.at("beta_a").get<long>();
    if (j.contains("beta_b")) cfg.beta_b = j.at("beta_b").get<long>();
    if (j.contains("k_a")) cfg.k_a = j.at("k_a").get<long>();
    if (j.contains("k_b")) cfg.k_b = j.at("k_b").get<long>();
    if (j.contains("eval_points")) cfg.eval_points = j.at("eval_points").get<std::vector<double>>();
    if (j.contains("classes"))
        cfg.designs_a = detail::parse_classes(j.at("classes"), cfg.n, cfg.gamma_a, cfg.beta_a);
    if (j.contains("classes_b"))
        cfg.designs_b = detail::parse_classes(j.at("classes_b"), cfg.n, cfg.gamma_b, cfg.beta_b);
    else if (cfg.scheme == "beta-matmat" && cfg.designs_a && cfg.beta_b == cfg.beta_a &&
             j.contains("classes"))
        cfg.designs_b = cfg.designs_a;
    return cfg;
}

struct MatrixSpec {
    long rows = 0;
    long cols_a = 0;
    double sigma_a = 0.03;
    long cols_b = 0;
    double sigma_b = 0.03;
    std::uint64_t seed = 0;
};

inline MatrixSpec matrix_spec_from_json(const nlohmann::json& j) {
    MatrixSpec m;
    m.rows = j.at("rows").get<long>();
    m.cols_a = j.at("cols_a").get<long>();
    if (j.contains("sigma_a")) m.sigma_a = j.at("sigma_a").get<double>();
    if (j.contains("cols_b")) m.cols_b = j.at("cols_b").get<long>();
    if (j.contains("sigma_b")) m.sigma_b = j.at("sigma_b").get<double>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

inline SpeedModel speed_model_from_json(const nlohmann::json& j) {
    SpeedModel s;
    if (j.contains("kind")) {
        const std::string k = j.at("kind").get<std::string>();
        if (k == "deterministic") s.kind = SpeedModel::Kind::deterministic;
        else if (k == "uniform") s.kind = SpeedModel::Kind::uniform;
        else if (k == "shifted-exponential") s.kind = SpeedModel::Kind::shifted_exponential;
        else throw parameter_error("unknown speed model kind: " + k);
    }
    if (j.contains("base_time")) s.base_time = j.at("base_time").get<double>();
    if (j.contains("overhead")) s.per_task_overhead = j.at("overhead").get<double>();
    if (j.contains("jitter")) s.per_task_jitter = j.at("jitter").get<double>();
    if (j.contains("slowdowns")) {
        s.slowdowns.clear();
        for (const auto& v : j.at("slowdowns")) {
            if (v.is_string() && v.get<std::string>() == "inf")
                s.slowdowns.push_back(std::numeric_limits<double>::infinity());
            else
                s.slowdowns.push_back(v.get<double>());
        }
    }
    if (j.contains("lo")) s.uniform_lo = j.at("lo").get<double>();
    if (j.contains("hi")) s.uniform_hi = j.at("hi").get<double>();
    if (j.contains("shift")) s.exp_shift = j.at("shift").get<double>();
    if (j.contains("rate")) s.exp_rate = j.at("rate").get<double>();
    return s;
}

// ---------------------------------------------------------------------------
// Random completion states with a prescribed total weight.
// ---------------------------------------------------------------------------

// Uniform-ish sample of a state with sum(w) == total, each w_i in [0, ell];
// weights are computed by dynamic programming in long double.
inline ComputationState random_state_with_total(long n, long ell, long long total, Rng& rng) {
    if (total < 0 || total > static_cast<long long>(n) * ell)
        throw parameter_error("target total out of range");
    // ways[i][s]: number of states of workers i..n-1 summing to s.
    std::vector<std::vector<long double>> ways(n + 1,
                                               std::vector<long double>(total + 1, 0.0L));
    ways[n][0] = 1.0L;
    for (long i = n - 1; i >= 0; --i) {
        for (long long s = 0; s <= total; ++s) {
            long double acc = 0.0L;
            for (long w = 0; w <= ell && w <= s; ++w) acc += ways[i + 1][s - w];
            ways[i][s] = acc;
        }
    }
    ComputationState state{std::vector<long>(n, 0)};
    long long remaining = total;
    for (long i = 0; i < n; ++i) {
        long double pick = rng.next_double() * ways[i][remaining];
        long double acc = 0.0L;
        long chosen = 0;
        for (long w = 0; w <= ell && w <= remaining; ++w) {
            acc += ways[i + 1][remaining - w];
            if (pick < acc || w == std::min<long long>(ell, remaining)) {
                chosen = w;
                break;
            }
        }
        state.w[i] = chosen;
        remaining -= chosen;
    }
    return state;
}

// ---------------------------------------------------------------------------
// Worst straggler set by condition number.
// ---------------------------------------------------------------------------

struct WorstStragglerSet {
    std::vector<long> stragglers;
    double kappa = 0.0;
};

inline WorstStragglerSet worst_straggler_set(const EncodingPlan& plan, long s,
                                             long long budget = 10'000'000) {
    if (detail::binomial(plan.n, s) > budget)
        throw budget_error("worst straggler search would exceed the subset budget");
    WorstStragglerSet worst;
    detail::for_each_subset(plan.n, s, [&](const std::vector<long>& stragglers) {
        std::vector<bool> out(plan.n, false);
        for (long i : stragglers) out[i] = true;
        std::vector<long> survivors;
        for (long i = 0; i < plan.n; ++i)
            if (!out[i]) survivors.push_back(i);
        double kappa = condition_number(plan, survivors);
        if (kappa > worst.kappa || worst.stragglers.empty()) {
            worst.kappa = kappa;
            worst.stragglers = stragglers;
        }
        return true;
    });
    return worst;
}

// ---------------------------------------------------------------------------
// End-to-end verification: encode, complete a state, decode, compare against
// the direct product.
// ---------------------------------------------------------------------------

struct E2EConfig {
    SchemeConfig scheme;
    MatrixSpec matrix;
    long random_states = 20;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
    long long budget = 10'000'000;
};

struct E2ECase {
    std::string label;
    double rel_error = 0.0;
    double kappa = 0.0;
    double residual = 0.0;
    bool pass = false;
};

struct E2EReport {
    bool pass = true;
    double max_rel_error = 0.0;
    std::vector<E2ECase> cases;
};

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    const double denom = want.norm();
    return denom > 0 ? (got - want).norm() / denom : got.norm();
}

inline E2EReport run_e2e(const E2EConfig& cfg) {
    EncodingPlan plan = build_plan(cfg.scheme);
    if (cfg.matrix.cols_a % plan.delta_a != 0)
        throw parameter_error("cols_a must be divisible by delta_a = " +
                              std::to_string(plan.delta_a));
    SparseMatrix a = generate_sparse(cfg.matrix.rows, cfg.matrix.cols_a, cfg.matrix.sigma_a,
                                     cfg.matrix.seed);
    SparseMatrix b;
    std::vector<double> x;
    std::vector<std::vector<Eigen::MatrixXd>> products;
    Eigen::MatrixXd direct;
    if (plan.kind == PlanKind::matvec) {
        Rng rng(cfg.matrix.seed + 1);
        x.resize(cfg.matrix.rows);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        products = compute_products_matvec(plan, a, x);
        direct = direct_product_matvec(a, x);
    } else {
        if (cfg.matrix.cols_b % plan.delta_b != 0)
            throw parameter_error("cols_b must be divisible by delta_b = " +
                                  std::to_string(plan.delta_b));
        b = generate_sparse(cfg.matrix.rows, cfg.matrix.cols_b, cfg.matrix.sigma_b,
                            cfg.matrix.seed + 1);
        products = compute_products_matmat(plan, a, b);
        direct = direct_product_matmat(a, b);
    }

    SchemeMetrics metrics = analytic_metrics(cfg.scheme);
    long long s = metrics.s_analytic ? *metrics.s_analytic : -1;
    long long q = metrics.q_analytic ? *metrics.q_analytic : -1;
    if (s < 0) s = oracle_straggler_resilience(plan, cfg.budget);
    if (q < 0) {
        try {
            q = oracle_q(plan, QOracleMethod::structure_aware);
        } catch (const unsupported_plan_error&) {
            q = oracle_q(plan, QOracleMethod::exhaustive, cfg.budget);
        }
    }

    E2EReport report;
    auto run_case = [&](const std::string& label, const ComputationState& state) {
        E2ECase c;
        c.label = label;
        try {
            DecodeResult d = decode(plan, state, products);
            c.kappa = d.kappa;
            c.residual = d.residual;
            c.rel_error = relative_error(d.product, direct);
            c.pass = c.rel_error < cfg.tolerance;
        } catch (const decode_error& e) {
            c.kappa = e.kappa;
            c.residual = e.residual;
            c.rel_error = std::numeric_limits<double>::infinity();
            c.pass = false;
        }
        report.max_rel_error = std::max(report.max_rel_error, c.rel_error);
        report.pass = report.pass && c.pass;
        report.cases.push_back(c);
    };

    WorstStragglerSet worst = worst_straggler_set(plan, static_cast<long>(s), cfg.budget);
    ComputationState worst_state = ComputationState::zeroed(plan, worst.stragglers);
    run_case("worst-stragglers-s" + std::to_string(s), worst_state);

    Rng rng(cfg.seed + 0xe2e);
    for (long k = 0; k < cfg.random_states; ++k) {
        ComputationState st = random_state_with_total(plan.n, plan.ell(), q, rng);
        run_case("random-state-" + std::to_string(k), st);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scheme comparison (simulator sweep).
// ---------------------------------------------------------------------------

struct CompareEntry {
    std::string label;
    SchemeConfig scheme;
    std::optional<MatrixSpec> matrix;       // measured costs
    std::optional<ExpectationParams> expectation;  // density-based costs
};

struct CompareRow {
    std::string label;
    long trials = 0;
    double mean_time = 0.0;
    double min_time = 0.0;
    double max_time = 0.0;
    double mean_symbols = 0.0;
    bool all_decodable = true;
    std::optional<double> kappa_worst;
};

inline CompareRow compare_one(const CompareEntry& entry, long trials, const SpeedModel& speed,
                              std::uint64_t seed, bool kappa, long long budget = 10'000'000) {
    EncodingPlan plan = build_plan(entry.scheme);
    std::vector<std::vector<double>> flops;
    if (entry.matrix) {
        SparseMatrix a = generate_sparse(entry.matrix->rows, entry.matrix->cols_a,
                                         entry.matrix->sigma_a, entry.matrix->seed);
        if (plan.kind == PlanKind::matvec) {
            flops = task_flops_measured(plan, a, nullptr);
        } else {
            SparseMatrix b = generate_sparse(entry.matrix->rows, entry.matrix->cols_b,
                                             entry.matrix->sigma_b, entry.matrix->seed + 1);
            flops = task_flops_measured(plan, a, &b);
        }
    } else if (entry.expectation) {
        flops = task_flops_expected(plan, *entry.expectation);
    } else {
        throw parameter_error("comparison entry needs matrix or expectation costs");
    }
    CompareRow row;
    row.label = entry.label.empty() ? plan.scheme_id : entry.label;
    row.trials = trials;
    row.min_time = std::numeric_limits<double>::infinity();
    double sum_t = 0.0, sum_sym = 0.0;
    for (long t = 0; t < trials; ++t) {
        RunReport r = simulate(plan, flops, speed, seed + static_cast<std::uint64_t>(t));
        sum_t += r.completion_time;
        sum_sym += static_cast<double>(r.total_symbols);
        row.min_time = std::min(row.min_time, r.completion_time);
        row.max_time = std::max(row.max_time, r.completion_time);
        row.all_decodable = row.all_decodable && r.decodable;
    }
    row.mean_time = sum_t / trials;
    row.mean_symbols = sum_sym / trials;
    if (kappa) {
        SchemeMetrics m = analytic_metrics(entry.scheme);
        long long s = m.s_analytic ? *m.s_analytic : -1;
        if (s >= 0 && detail::binomial(plan.n, s) <= budget)
            row.kappa_worst = worst_case_condition_number(plan, static_cast<long>(s), budget);
    }
    return row;
}

// ---------------------------------------------------------------------------
// CSV helpers.
// ---------------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline std::string metrics_csv_header() {
    return "scheme,n,gamma_a,gamma_b,beta_a,beta_b,k_a,k_b,delta,s_analytic,s_oracle,"
           "s_lower_bound,q_analytic,q_oracle,q_over_delta,kappa_worst,oracle_method,seconds";
}

inline std::string metrics_csv_row(const SchemeConfig& cfg, const SchemeMetrics& m) {
    auto opt = [](const std::optional<long long>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    std::ostringstream os;
    os << csv_escape(cfg.scheme) << "," << cfg.n << "," << cfg.gamma_a.str() << ","
       << cfg.gamma_b.str() << "," << cfg.beta_a << "," << cfg.beta_b << "," << cfg.k_a << ","
       << cfg.k_b << "," << m.delta << "," << opt(m.s_analytic) << "," << opt(m.s_oracle) << ","
       << opt(m.s_lower_bound) << "," << opt(m.q_analytic) << "," << opt(m.q_oracle) << ",";
    long long q = m.q_oracle ? *m.q_oracle : (m.q_analytic ? *m.q_analytic : -1);
    if (q >= 0 && m.delta > 0) os << q << "/" << m.delta;
    os << ",";
    if (m.kappa_worst) os << format_double(*m.kappa_worst);
    os << "," << m.oracle_method << "," << format_double(m.seconds);
    return os.str();
}

inline std::string compare_csv_header() {
    return "scheme,trials,mean_time,min_time,max_time,mean_symbols,all_decodable,kappa_worst";
}

inline std::string compare_csv_row(const CompareRow& r) {
    std::ostringstream os;
    os << csv_escape(r.label) << "," << r.trials << "," << format_double(r.mean_time) << ","
       << format_double(r.min_time) << "," << format_double(r.max_time) << ","
       << format_double(r.mean_symbols) << "," << (r.all_decodable ? "true" : "false") << ",";
    if (r.kappa_worst) os << format_double(*r.kappa_worst);
    return os.str();
}

}  // namespace strag
