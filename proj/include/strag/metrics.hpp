#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "strag/common.hpp"
#include "strag/decoder.hpp"
#include "strag/designs.hpp"
#include "strag/plan.hpp"
#include "strag/schemes.hpp"

namespace strag {

struct SchemeMetrics {
    long long delta = 0;
    std::optional<long long> s_analytic;
    std::optional<long long> q_analytic;
    std::optional<long long> s_lower_bound;  // multi-class resilience bound
    std::optional<long long> s_oracle;
    std::optional<long long> q_oracle;
    std::optional<double> kappa_worst;
    std::string oracle_method;  // "exhaustive" | "structure-aware" | "subset-only"
    double seconds = 0.0;

    // Analytic and oracle values must agree whenever both are present.
    void check_consistency() const {
        if (s_analytic && s_oracle && *s_analytic != *s_oracle)
            throw mismatch_error("straggler resilience mismatch: analytic " +
                                 std::to_string(*s_analytic) + " vs oracle " +
                                 std::to_string(*s_oracle));
        if (q_analytic && q_oracle && *q_analytic != *q_oracle)
            throw mismatch_error("Q mismatch: analytic " + std::to_string(*q_analytic) +
                                 " vs oracle " + std::to_string(*q_oracle));
        if (s_lower_bound && s_oracle && *s_oracle < *s_lower_bound)
            throw mismatch_error("oracle resilience " + std::to_string(*s_oracle) +
                                 " below analytic lower bound " + std::to_string(*s_lower_bound));
    }

    double q_over_delta() const {
        long long q = q_oracle ? *q_oracle : (q_analytic ? *q_analytic : -1);
        if (q < 0 || delta == 0) return std::nan("");
        return static_cast<double>(q) / static_cast<double>(delta);
    }
};

// ---------------------------------------------------------------------------
// Closed forms.
// ---------------------------------------------------------------------------

// Lower bound on Q for an <n, ell, delta, r>-uncoded system (n = delta*r/ell).
inline long long lower_bound_q_uncoded(long long delta, long long r, long long ell) {
    if (delta < 1 || r < 1 || ell < 1) throw parameter_error("uncoded bound needs positive sizes");
    if ((delta * r) % ell != 0)
        throw parameter_error("uncoded system requires n*ell == delta*r for integer n");
    // Q >= delta*r - (r/2)(ell+1) + 1, rounded up since Q is integral.
    return delta * r + 1 - (r * (ell + 1)) / 2;
}

// Ratio form of the same bound: Q/delta >= n*gamma*(1 - gamma/2) + (1 - n*gamma/2)/delta.
inline double lower_bound_q_over_delta_uncoded(long long n, Rational gamma, long long delta) {
    const double g = gamma.value();
    return n * g * (1.0 - g / 2.0) + (1.0 - n * g / 2.0) / static_cast<double>(delta);
}

namespace detail {

// Q for a single-parallel-class beta-level scheme with c worker groups of
// delta/beta workers carrying ell meta-symbols each. Covers both the
// c >= beta and beta > c regimes.
inline long long beta_level_q(long long delta, long long beta, long long c, long long ell) {
    const long long alpha0 = (delta / beta) * ell - ell * (ell + 1) / 2;
    const long long c1 = (beta - 1) / c;
    const long long c2 = (beta - 1) - c * c1;
    long long q = c * alpha0;
    for (long long i = 0; i < c1; ++i) q += c * (ell - i);
    q += c2 * (ell - c1);
    return q + 1;
}

inline bool single_class(const DesignSet& ds) {
    for (size_t i = 1; i < ds.classes.size(); ++i)
        if (!(ds.classes[i] == ds.classes[0])) return false;
    return true;
}

inline bool is_shifted_pair(const DesignSet& ds) {
    if (ds.classes.size() != 2 || ds.block_size() != 2) return false;
    if (ds.num_points % 2 != 0 || ds.num_points < 8) return false;
    return ds == shifted_pair_classes(ds.num_points);
}

}  // namespace detail

// Smallest positive kappa with ceil(kappa / (m*b1)) + kappa * a_c >= a2 - a_u + 1,
// i.e. the fewest holders of a B block that still pin down all a2 A-blocks.
inline long long coded_bottom_matmat_kappa_min(long long a2, long long a_u, long long a_c,
                                               long long m_b1) {
    const long long need = a2 - a_u + 1;
    for (long long kappa = 1; kappa <= a2 * m_b1; ++kappa)
        if ((kappa + m_b1 - 1) / m_b1 + kappa * a_c >= need) return kappa;
    throw regime_error("requires enough uncoded/coded rows to cover a2");
}

// Analytic s and Q for a scheme configuration; fields that no closed form
// covers stay empty. Out-of-regime parameters raise regime_error naming the
// violated condition.
inline SchemeMetrics analytic_metrics(const SchemeConfig& cfg) {
    SchemeMetrics m;
    if (cfg.scheme == "beta-matvec" || cfg.scheme == "beta-matmat") {
        const bool matmat = cfg.scheme == "beta-matmat";
        if (!cfg.designs_a || (matmat && !cfg.designs_b))
            throw parameter_error(cfg.scheme + " needs design sets");
        const DesignSet& da = *cfg.designs_a;
        const long long delta_a = da.num_points;
        const long long beta_a = cfg.beta_a;
        const long long a2 = delta_a / beta_a;
        long long delta_b = 1, beta_b = 1, b2 = 1, ell_b = 1;
        if (matmat) {
            const DesignSet& db = *cfg.designs_b;
            delta_b = db.num_points;
            beta_b = cfg.beta_b;
            b2 = delta_b / beta_b;
            ell_b = detail::require_integer(cfg.gamma_b, delta_b, "ell_b");
        }
        const long long delta = delta_a * delta_b;
        const long long beta = beta_a * beta_b;
        const long long c = static_cast<long long>(da.classes.size());
        if (cfg.n != c * a2 * b2) throw regime_error("requires n == c * a2 * b2");
        const long long ell_a = detail::require_integer(cfg.gamma_a, delta_a, "ell_a");
        const long long ell = ell_a * ell_b;
        m.delta = delta;

        const bool same_b_class = !matmat || detail::single_class(*cfg.designs_b);
        if (detail::single_class(da) && same_b_class) {
            m.s_analytic = c * ell - beta;
            m.q_analytic = detail::beta_level_q(delta, beta, c, ell);
            return m;
        }
        // Shifted pair classes, c = beta = 2 (exact): matvec, or matmat with
        // beta_a = 2, beta_b = 1 (resilience only).
        if (!matmat && detail::is_shifted_pair(da)) {
            if (c != 2 || beta != 2) throw regime_error("requires c == beta == 2");
            if (!(ell <= delta / 2 - 2)) throw regime_error("requires ell <= delta/2 - 2");
            if (delta < 8) throw regime_error("requires delta >= 8");
            m.s_analytic = 2 * ell - 1;
            m.q_analytic = cfg.n * ell - ell * (ell + 1) + 1;
            return m;
        }
        if (matmat && detail::is_shifted_pair(da) && beta_b == 1 && same_b_class) {
            if (c != 2 || beta != 2) throw regime_error("requires c == beta == 2");
            if (!(ell_a <= delta_a / 2 - 2)) throw regime_error("requires ell_a <= delta_a/2 - 2");
            if (delta_a < 8) throw regime_error("requires delta_a >= 8");
            m.s_analytic = 2 * ell - 1;
            return m;
        }
        // General multiple parallel classes: a resilience lower bound only,
        // valid when blocks from different classes intersect in <= 1 point.
        if (matmat) throw regime_error("no closed form for multi-class matmat plans");
        if (max_cross_class_intersection(da) > 1)
            throw regime_error("requires cross-class block intersections <= 1");
        if (c >= beta) {
            const long long lambda = std::min(beta - 1, c - beta);
            m.s_lower_bound = c * ell - beta + lambda;
        }
        return m;
    }
    if (cfg.scheme == "coded-bottom-matvec") {
        const long long delta = cfg.n;
        const long long ell_u = detail::require_integer(cfg.gamma_u, delta, "ell_u");
        const long long ell_c = detail::require_integer(cfg.gamma_c, delta, "ell_c");
        if (ell_u < 1) throw regime_error("requires ell_u >= 1");
        m.delta = delta;
        const long long r_u = ell_u;
        m.q_analytic = std::max(delta, delta * r_u - (r_u * (ell_u + 1)) / 2 + 1);
        m.s_analytic = (cfg.n * ell_c + ell_u - 1) / (ell_c + 1);
        return m;
    }
    if (cfg.scheme == "coded-bottom-matmat") {
        const long long a2 = lcm_ll(cfg.gamma_au.den, cfg.gamma_ac.den);
        const long long a_u = detail::require_integer(cfg.gamma_au, a2, "a_u");
        const long long a_c = detail::require_integer(cfg.gamma_ac, a2, "a_c");
        const long long b1 = cfg.gamma_b.num, b2 = cfg.gamma_b.den;
        if (cfg.n % (a2 * b2) != 0) throw regime_error("requires n to be a multiple of a2 * b2");
        const long long mm = cfg.n / (a2 * b2);
        m.delta = a2 * mm * b2;
        const long long kappa_min = coded_bottom_matmat_kappa_min(a2, a_u, a_c, mm * b1);
        // tau = n - m*a2*b1 + kappa_min, reported as s = n - tau.
        m.s_analytic = mm * a2 * b1 - kappa_min;
        return m;
    }
    if (cfg.scheme == "scs-matvec") {
        if (cfg.k_a < 1 || cfg.k_a > cfg.n) throw regime_error("requires 1 <= k_A <= n");
        const long long delta = lcm_ll(cfg.n, cfg.k_a);
        m.delta = delta;
        m.s_analytic = cfg.n - cfg.k_a;
        m.q_analytic = delta;
        return m;
    }
    if (cfg.scheme == "scs-matmat") {
        if (cfg.k_a * cfg.k_b > cfg.n) throw regime_error("requires n >= k_A * k_B");
        const long long delta_a = lcm_ll(cfg.n, cfg.k_a);
        const long long delta = delta_a * cfg.k_b;
        const long long ell_c = delta_a / cfg.k_a - delta / cfg.n;
        m.delta = delta;
        m.s_analytic = cfg.n - cfg.k_a * cfg.k_b;
        m.q_analytic = delta + (cfg.k_b - 1) * ell_c;
        return m;
    }
    if (cfg.scheme == "poly" || cfg.scheme == "dense-random") {
        if (cfg.k_a * cfg.k_b > cfg.n) throw regime_error("requires n >= k_A * k_B");
        m.delta = cfg.k_a * cfg.k_b;
        m.s_analytic = cfg.n - cfg.k_a * cfg.k_b;
        // One task per worker: any delta completed tasks decode.
        m.q_analytic = m.delta;
        return m;
    }
    throw parameter_error("unknown scheme: " + cfg.scheme);
}

// ---------------------------------------------------------------------------
// Brute-force oracles (prime-field decodability underneath).
// ---------------------------------------------------------------------------

namespace detail {

inline long long binomial(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (long long i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > (1LL << 60)) return 1LL << 60;
    }
    return r;
}

// Calls fn(subset) for every size-k subset of {0..n-1}; fn returns false to
// abort the enumeration.
inline bool for_each_subset(long n, long k, const std::function<bool(const std::vector<long>&)>& fn) {
    std::vector<long> idx(k);
    for (long i = 0; i < k; ++i) idx[i] = i;
    if (k == 0) return fn(idx);
    for (;;) {
        if (!fn(idx)) return false;
        long i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return true;
        ++idx[i];
        for (long j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Prime-field decodability against a pair of pre-resampled plans.
struct OraclePair {
    explicit OraclePair(const EncodingPlan& plan)
        : a(plan, kOracleSeeds[0]), b(plan, kOracleSeeds[1]) {}
    ResampledPlan a, b;
    bool decodable(const std::vector<long>& w) const { return a.full_rank(w) && b.full_rank(w); }
};

}  // namespace detail

// Largest s such that every size-s straggler set (zeroed, all others fully
// complete) leaves a decodable state.
inline long long oracle_straggler_resilience(const EncodingPlan& plan,
                                             long long budget = 10'000'000) {
    detail::OraclePair oracle(plan);
    std::vector<long> full(plan.n, plan.ell());
    if (!oracle.decodable(full)) throw regime_error("full completion is not decodable");
    long long spent = 0;
    for (long s = 1; s <= plan.n; ++s) {
        spent += detail::binomial(plan.n, s);
        if (spent > budget)
            throw budget_error("straggler oracle would exceed the subset budget at s=" +
                               std::to_string(s));
        bool all_ok = detail::for_each_subset(plan.n, s, [&](const std::vector<long>& stragglers) {
            std::vector<long> w = full;
            for (long i : stragglers) w[i] = 0;
            return oracle.decodable(w);
        });
        if (!all_ok) return s - 1;
    }
    return plan.n;  // decodable even with every worker erased cannot happen; n-1 workers suffice
}

// Verifies only that every size-s straggler set is survivable (cheaper than
// locating the exact resilience when s is large).
inline bool oracle_resilient_to(const EncodingPlan& plan, long s, long long budget = 10'000'000) {
    if (detail::binomial(plan.n, s) > budget)
        throw budget_error("straggler oracle would exceed the subset budget");
    detail::OraclePair oracle(plan);
    std::vector<long> full(plan.n, plan.ell());
    return detail::for_each_subset(plan.n, s, [&](const std::vector<long>& stragglers) {
        std::vector<long> w = full;
        for (long i : stragglers) w[i] = 0;
        return oracle.decodable(w);
    });
}

enum class QOracleMethod { exhaustive, structure_aware };

namespace detail {

// Exhaustive: 1 + max{sum w : state undecodable}, searched downward from the
// all-complete state. Undecodable states are downward closed, so every
// maximal undecodable state is reachable through decodable states only.
inline long long oracle_q_exhaustive(const EncodingPlan& plan, long long budget) {
    const long n = plan.n;
    const long ell = plan.ell();
    const long long delta = plan.delta();
    long long states = 1;
    for (long i = 0; i < n; ++i) {
        states *= ell + 1;
        if (states > budget)
            throw budget_error("exhaustive Q oracle needs (ell+1)^n <= budget");
    }
    OraclePair oracle(plan);
    std::vector<long> full(n, ell);
    if (!oracle.decodable(full)) throw regime_error("full completion is not decodable");

    std::vector<bool> visited(static_cast<size_t>(states), false);
    auto encode = [&](const std::vector<long>& w) {
        std::uint64_t code = 0;
        for (long i = 0; i < n; ++i) code = code * (ell + 1) + w[i];
        return code;
    };
    long long best = delta - 1;  // any state with fewer than delta symbols is undecodable
    std::vector<long> w = full;
    std::function<void(long long)> dfs = [&](long long total) {
        if (total <= best) return;  // neither this state nor any descendant can improve
        const std::uint64_t code = encode(w);
        if (visited[code]) return;
        visited[code] = true;
        if (total < delta || !oracle.decodable(w)) {
            best = total;
            return;
        }
        for (long i = 0; i < n; ++i) {
            if (w[i] == 0) continue;
            --w[i];
            dfs(total - 1);
            ++w[i];
        }
    };
    dfs(static_cast<long long>(n) * ell);
    return best + 1;
}

struct MetaSymbolLayout {
    long num_meta = 0;
    long beta = 0;
    // For each meta-symbol, the (worker, position) occurrences.
    std::vector<std::vector<std::pair<long, long>>> occurrences;
};

// Derives the meta-symbol layout of a single-parallel-class beta-level plan
// straight from its task supports; throws if the plan lacks that structure.
inline MetaSymbolLayout meta_symbol_layout(const EncodingPlan& plan) {
    if (plan.scheme_id != "beta-matvec" && plan.scheme_id != "beta-matmat")
        throw unsupported_plan_error("structure-aware oracle expects a beta-level plan");
    const long long delta = plan.delta();
    std::map<std::vector<long>, long> meta_ids;
    MetaSymbolLayout layout;
    std::vector<bool> covered(delta, false);
    for (long i = 0; i < plan.n; ++i) {
        std::set<long> seen_here;
        for (long t = 0; t < plan.ell(); ++t) {
            Task task = plan.task(i, t);
            std::vector<long> support;
            if (task.b == nullptr) {
                support = task.a->support;
            } else {
                for (long sa : task.a->support)
                    for (long sb : task.b->support) support.push_back(sa * plan.delta_b + sb);
                std::sort(support.begin(), support.end());
            }
            auto [it, inserted] = meta_ids.insert({support, layout.num_meta});
            if (inserted) {
                layout.occurrences.push_back({});
                ++layout.num_meta;
                if (layout.beta == 0) layout.beta = static_cast<long>(support.size());
                if (static_cast<long>(support.size()) != layout.beta)
                    throw unsupported_plan_error("task supports of unequal size");
                for (long u : support) {
                    if (covered[u])
                        throw unsupported_plan_error(
                            "task supports do not form a single parallel class");
                    covered[u] = true;
                }
            }
            if (!seen_here.insert(it->second).second)
                throw unsupported_plan_error("worker holds a meta-symbol twice");
            layout.occurrences[it->second].push_back({i, t});
        }
    }
    for (long long u = 0; u < delta; ++u)
        if (!covered[u]) throw unsupported_plan_error("supports do not cover all unknowns");
    return layout;
}

// Structure-aware Q: a state fails to decode exactly when some meta-symbol is
// processed fewer than beta times, so maximize processed symbols under that
// constraint meta-symbol by meta-symbol.
inline long long oracle_q_structure_aware(const EncodingPlan& plan) {
    MetaSymbolLayout layout = meta_symbol_layout(plan);
    const long ell = plan.ell();
    long long base_all = static_cast<long long>(plan.n) * ell;
    long long best = -1;
    for (long msym = 0; msym < layout.num_meta; ++msym) {
        const auto& occ = layout.occurrences[msym];
        if (static_cast<long>(occ.size()) < layout.beta)
            throw regime_error("meta-symbol appears fewer than beta times; full completion cannot decode");
        // Workers not holding the meta-symbol contribute ell; holders stop
        // right before it, except the beta-1 with the deepest positions run on.
        long long total = base_all;
        std::vector<long> gains;
        for (auto [worker, pos] : occ) {
            total -= ell - pos;  // stop before the meta-symbol
            gains.push_back(ell - pos);
        }
        std::sort(gains.rbegin(), gains.rend());
        for (long k = 0; k < layout.beta - 1 && k < static_cast<long>(gains.size()); ++k)
            total += gains[k];
        best = std::max(best, total);
    }
    return best + 1;
}

}  // namespace detail

inline long long oracle_q(const EncodingPlan& plan, QOracleMethod method,
                          long long budget = 10'000'000) {
    if (method == QOracleMethod::exhaustive) return detail::oracle_q_exhaustive(plan, budget);
    return detail::oracle_q_structure_aware(plan);
}

// Max condition number over all size-s straggler sets (survivors complete).
inline double worst_case_condition_number(const EncodingPlan& plan, long s,
                                          long long budget = 10'000'000) {
    if (s < 0 || s >= plan.n) throw parameter_error("straggler count must lie in [0, n)");
    if (detail::binomial(plan.n, s) > budget)
        throw budget_error("condition number search would exceed the subset budget");
    double worst = 0.0;
    detail::for_each_subset(plan.n, s, [&](const std::vector<long>& stragglers) {
        std::vector<bool> out(plan.n, false);
        for (long i : stragglers) out[i] = true;
        std::vector<long> survivors;
        for (long i = 0; i < plan.n; ++i)
            if (!out[i]) survivors.push_back(i);
        worst = std::max(worst, condition_number(plan, survivors));
        return true;
    });
    return worst;
}

// ---------------------------------------------------------------------------
// Combined driver used by the CLI: analytic where available, oracles where
// they fit the budget, consistency checked.
// ---------------------------------------------------------------------------

struct MetricsRequest {
    bool analytic = true;
    bool oracle = false;
    bool kappa = false;
    long long budget = 10'000'000;
};

inline SchemeMetrics compute_metrics(const SchemeConfig& cfg, const MetricsRequest& req) {
    const auto start = std::chrono::steady_clock::now();
    SchemeMetrics m;
    if (req.analytic) {
        m = analytic_metrics(cfg);
    }
    EncodingPlan plan;
    bool have_plan = false;
    auto ensure_plan = [&]() {
        if (!have_plan) {
            plan = build_plan(cfg);
            m.delta = plan.delta();
            have_plan = true;
        }
    };
    if (req.oracle) {
        ensure_plan();
        m.s_oracle = oracle_straggler_resilience(plan, req.budget);
        bool structure_ok = true;
        try {
            m.q_oracle = oracle_q(plan, QOracleMethod::structure_aware);
            m.oracle_method = "structure-aware";
        } catch (const unsupported_plan_error&) {
            structure_ok = false;
        }
        if (!structure_ok) {
            try {
                m.q_oracle = oracle_q(plan, QOracleMethod::exhaustive, req.budget);
                m.oracle_method = "exhaustive";
            } catch (const budget_error&) {
                m.oracle_method = "subset-only";
            }
        }
    }
    if (req.kappa) {
        ensure_plan();
        long long s = m.s_oracle ? *m.s_oracle : (m.s_analytic ? *m.s_analytic : -1);
        if (s >= 0 && detail::binomial(plan.n, s) <= req.budget)
            m.kappa_worst = worst_case_condition_number(plan, static_cast<long>(s), req.budget);
    }
    m.check_consistency();
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
}

}  // namespace strag
