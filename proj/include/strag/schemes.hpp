#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strag/common.hpp"
#include "strag/designs.hpp"
#include "strag/plan.hpp"

namespace strag {

namespace detail {

inline CoefficientVector random_combination(long length, const std::vector<long>& support,
                                            Rng& rng) {
    // Single-block supports are plain copies of the underlying block-column,
    // matching the uncoded task semantics (and keeping their decode exact).
    if (support.size() == 1) return CoefficientVector::unit(length, support[0]);
    std::vector<double> values(support.size());
    for (auto& v : values) v = rng.coefficient();
    return CoefficientVector(length, support, values);
}

inline std::vector<long> complement(long length, const std::vector<long>& t) {
    std::vector<bool> in(length, false);
    for (long s : t) in[s] = true;
    std::vector<long> out;
    out.reserve(length - t.size());
    for (long i = 0; i < length; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

inline long require_integer(const Rational& gamma, long delta, const std::string& what) {
    long long num = gamma.num * delta;
    if (num % gamma.den != 0)
        throw regime_error(what + " = delta * " + gamma.str() + " must be an integer");
    return static_cast<long>(num / gamma.den);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// beta-level coding (matrix-vector). The design set fixes delta = beta * a2;
// group i of a2 workers places the blocks of class i cyclically, ell = delta *
// gamma meta-symbols per worker, each realized as a fresh random combination.
// ---------------------------------------------------------------------------
inline EncodingPlan build_beta_matvec(long n, Rational gamma, long beta, const DesignSet& designs,
                                      std::uint64_t seed) {
    if (beta < 1) throw regime_error("beta-matvec requires beta >= 1");
    if (Rational(1, beta) < gamma)
        throw regime_error("beta-matvec requires gamma <= 1/beta (got " + gamma.str() + ")");
    if (designs.block_size() != beta)
        throw regime_error("design block size must equal beta");
    const long delta = designs.num_points;
    if (delta % beta != 0) throw regime_error("beta must divide delta");
    const long a2 = delta / beta;
    const long c = static_cast<long>(designs.classes.size());
    if (n != c * a2)
        throw regime_error("beta-matvec requires n == c * a2 (n=" + std::to_string(n) +
                           ", c=" + std::to_string(c) + ", a2=" + std::to_string(a2) + ")");
    const long ell = detail::require_integer(gamma, delta, "ell");
    if (ell < 1 || ell > a2) throw regime_error("beta-matvec requires 1 <= ell <= delta/beta");

    EncodingPlan plan;
    plan.kind = PlanKind::matvec;
    plan.scheme_id = "beta-matvec";
    plan.n = n;
    plan.delta_a = delta;
    plan.ell_a = ell;
    plan.seed = seed;
    Rng root(seed);
    for (long i = 0; i < c; ++i) {
        const auto& blocks = designs.classes[i].blocks;
        for (long j = 0; j < a2; ++j) {
            Rng rng = root.fork(i * a2 + j);
            WorkerPlan w;
            for (long t = 0; t < ell; ++t)
                w.a_vecs.push_back(detail::random_combination(delta, blocks[(j + t) % a2], rng));
            plan.workers.push_back(std::move(w));
        }
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// beta-level coding (matrix-matrix). Within a group of a2*b2 workers the
// A-side classes shift cyclically with period a2 while the B-side block index
// advances once per a2 workers.
// ---------------------------------------------------------------------------
inline EncodingPlan build_beta_matmat(long n, Rational gamma_a, Rational gamma_b, long beta_a,
                                      long beta_b, const DesignSet& designs_a,
                                      const DesignSet& designs_b, std::uint64_t seed) {
    if (beta_a < 1 || beta_b < 1) throw regime_error("beta-matmat requires beta_a, beta_b >= 1");
    if (Rational(1, beta_a) < gamma_a)
        throw regime_error("beta-matmat requires gamma_a <= 1/beta_a");
    if (Rational(1, beta_b) < gamma_b)
        throw regime_error("beta-matmat requires gamma_b <= 1/beta_b");
    if (designs_a.block_size() != beta_a || designs_b.block_size() != beta_b)
        throw regime_error("design block sizes must equal beta_a and beta_b");
    const long delta_a = designs_a.num_points;
    const long delta_b = designs_b.num_points;
    const long a2 = delta_a / beta_a;
    const long b2 = delta_b / beta_b;
    if (designs_a.classes.size() != designs_b.classes.size())
        throw regime_error("A and B design sets must have the same class count");
    const long c = static_cast<long>(designs_a.classes.size());
    if (n != c * a2 * b2)
        throw regime_error("beta-matmat requires n == c * a2 * b2 (n=" + std::to_string(n) +
                           ", c=" + std::to_string(c) + ", a2=" + std::to_string(a2) +
                           ", b2=" + std::to_string(b2) + ")");
    const long ell_a = detail::require_integer(gamma_a, delta_a, "ell_a");
    const long ell_b = detail::require_integer(gamma_b, delta_b, "ell_b");
    if (ell_a < 1 || ell_a > a2 || ell_b < 1 || ell_b > b2)
        throw regime_error("beta-matmat requires 1 <= ell_a <= a2 and 1 <= ell_b <= b2");

    EncodingPlan plan;
    plan.kind = PlanKind::matmat;
    plan.scheme_id = "beta-matmat";
    plan.n = n;
    plan.delta_a = delta_a;
    plan.delta_b = delta_b;
    plan.ell_a = ell_a;
    plan.ell_b = ell_b;
    plan.seed = seed;
    Rng root(seed);
    for (long i = 0; i < c; ++i) {
        const auto& ablocks = designs_a.classes[i].blocks;
        const auto& bblocks = designs_b.classes[i].blocks;
        for (long j = 0; j < a2 * b2; ++j) {
            Rng rng = root.fork(i * a2 * b2 + j);
            WorkerPlan w;
            for (long t = 0; t < ell_a; ++t)
                w.a_vecs.push_back(detail::random_combination(delta_a, ablocks[(j + t) % a2], rng));
            const long k = j / a2;
            for (long t = 0; t < ell_b; ++t)
                w.b_vecs.push_back(detail::random_combination(delta_b, bblocks[(k + t) % b2], rng));
            plan.workers.push_back(std::move(w));
        }
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// Cyclic coded-at-the-bottom (matrix-vector): ell_u uncoded blocks on top,
// then ell_c dense random combinations of the complement set.
// ---------------------------------------------------------------------------
inline EncodingPlan build_coded_bottom_matvec(long n, Rational gamma_u, Rational gamma_c,
                                              std::uint64_t seed) {
    const long delta = n;
    const long ell_u = detail::require_integer(gamma_u, delta, "ell_u");
    const long ell_c = detail::require_integer(gamma_c, delta, "ell_c");
    if (ell_u < 1 || ell_c < 0 || ell_u + ell_c > delta)
        throw regime_error("coded-bottom-matvec requires 1 <= ell_u and ell_u + ell_c <= delta");

    EncodingPlan plan;
    plan.kind = PlanKind::matvec;
    plan.scheme_id = "coded-bottom-matvec";
    plan.n = n;
    plan.delta_a = delta;
    plan.ell_a = ell_u + ell_c;
    plan.seed = seed;
    Rng root(seed);
    for (long i = 0; i < n; ++i) {
        Rng rng = root.fork(i);
        WorkerPlan w;
        std::vector<long> t;
        for (long k = 0; k < ell_u; ++k) {
            long m = (i + k) % delta;
            t.push_back(m);
            w.a_vecs.push_back(CoefficientVector::unit(delta, m));
        }
        const auto comp = detail::complement(delta, t);
        for (long k = 0; k < ell_c; ++k)
            w.a_vecs.push_back(detail::random_combination(delta, comp, rng));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// Cyclic coded-at-the-bottom (matrix-matrix): A side is a_u uncoded cyclic
// blocks plus a_c coded complements; B side is uncoded cyclic with start
// index floor(i / a2).
// ---------------------------------------------------------------------------
inline EncodingPlan build_coded_bottom_matmat(long n, Rational gamma_au, Rational gamma_ac,
                                              Rational gamma_b, std::uint64_t seed) {
    const long a2 = static_cast<long>(lcm_ll(gamma_au.den, gamma_ac.num == 0 ? 1 : gamma_ac.den));
    const long a_u = detail::require_integer(gamma_au, a2, "a_u");
    const long a_c = detail::require_integer(gamma_ac, a2, "a_c");
    if (a_u < 1 || a_u + a_c > a2)
        throw regime_error("coded-bottom-matmat requires 1 <= a_u and a_u + a_c <= a2");
    const long b1 = static_cast<long>(gamma_b.num);
    const long b2 = static_cast<long>(gamma_b.den);
    if (b1 < 1 || b1 > b2) throw regime_error("coded-bottom-matmat requires 0 < gamma_b <= 1");
    if (n % (a2 * b2) != 0)
        throw regime_error("coded-bottom-matmat requires n to be a multiple of a2 * b2 (a2=" +
                           std::to_string(a2) + ", b2=" + std::to_string(b2) + ")");
    const long m = n / (a2 * b2);
    const long delta_a = a2;
    const long delta_b = m * b2;
    const long ell_b = m * b1;

    EncodingPlan plan;
    plan.kind = PlanKind::matmat;
    plan.scheme_id = "coded-bottom-matmat";
    plan.n = n;
    plan.delta_a = delta_a;
    plan.delta_b = delta_b;
    plan.ell_a = a_u + a_c;
    plan.ell_b = ell_b;
    plan.seed = seed;
    Rng root(seed);
    for (long i = 0; i < n; ++i) {
        Rng rng = root.fork(i);
        WorkerPlan w;
        std::vector<long> t;
        for (long k = 0; k < a_u; ++k) {
            long mm = (i + k) % delta_a;
            t.push_back(mm);
            w.a_vecs.push_back(CoefficientVector::unit(delta_a, mm));
        }
        const auto comp = detail::complement(delta_a, t);
        for (long k = 0; k < a_c; ++k)
            w.a_vecs.push_back(detail::random_combination(delta_a, comp, rng));
        const long j = i / a2;
        for (long k = 0; k < ell_b; ++k)
            w.b_vecs.push_back(CoefficientVector::unit(delta_b, (j + k) % delta_b));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// SCS optimal scheme (matrix-vector): delta = lcm(n, k_A); each worker holds
// delta/n uncoded blocks (replication 1 overall) and delta/k_A - delta/n
// dense combinations of the complement.
// ---------------------------------------------------------------------------
inline EncodingPlan build_scs_matvec(long n, long k_a, std::uint64_t seed) {
    if (k_a < 1 || k_a > n) throw regime_error("scs-matvec requires 1 <= k_A <= n");
    const long delta = static_cast<long>(lcm_ll(n, k_a));
    const long per_worker_uncoded = delta / n;
    const long ell_c = delta / k_a - delta / n;

    EncodingPlan plan;
    plan.kind = PlanKind::matvec;
    plan.scheme_id = "scs-matvec";
    plan.n = n;
    plan.delta_a = delta;
    plan.ell_a = delta / k_a;
    plan.seed = seed;
    Rng root(seed);
    for (long i = 0; i < n; ++i) {
        Rng rng = root.fork(i);
        WorkerPlan w;
        std::vector<long> t;
        const long u = i * per_worker_uncoded;
        for (long k = 0; k < per_worker_uncoded; ++k) {
            long m = (u + k) % delta;
            t.push_back(m);
            w.a_vecs.push_back(CoefficientVector::unit(delta, m));
        }
        const auto comp = detail::complement(delta, t);
        for (long k = 0; k < ell_c; ++k)
            w.a_vecs.push_back(detail::random_combination(delta, comp, rng));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// SCS optimal scheme (matrix-matrix): A side as above but with delta/n =
// delta_a * k_B / n uncoded blocks starting at i * delta_a / n (so uncoded
// blocks replicate k_B times); B side is a single dense combination of all
// k_B block-columns per worker.
// ---------------------------------------------------------------------------
inline EncodingPlan build_scs_matmat(long n, long k_a, long k_b, std::uint64_t seed) {
    if (k_a < 1 || k_b < 1) throw regime_error("scs-matmat requires k_A, k_B >= 1");
    if (k_a * k_b > n) throw regime_error("scs-matmat requires n >= k_A * k_B");
    const long delta_a = static_cast<long>(lcm_ll(n, k_a));
    const long delta_b = k_b;
    const long uncoded = delta_a * k_b / n;
    const long ell_c = delta_a / k_a - uncoded;
    const long start_step = delta_a / n;

    EncodingPlan plan;
    plan.kind = PlanKind::matmat;
    plan.scheme_id = "scs-matmat";
    plan.n = n;
    plan.delta_a = delta_a;
    plan.delta_b = delta_b;
    plan.ell_a = delta_a / k_a;
    plan.ell_b = 1;
    plan.seed = seed;
    Rng root(seed);
    std::vector<long> all_b(delta_b);
    for (long j = 0; j < delta_b; ++j) all_b[j] = j;
    for (long i = 0; i < n; ++i) {
        Rng rng = root.fork(i);
        WorkerPlan w;
        std::vector<long> t;
        const long u = i * start_step;
        for (long k = 0; k < uncoded; ++k) {
            long m = (u + k) % delta_a;
            t.push_back(m);
            w.a_vecs.push_back(CoefficientVector::unit(delta_a, m));
        }
        const auto comp = detail::complement(delta_a, t);
        for (long k = 0; k < ell_c; ++k)
            w.a_vecs.push_back(detail::random_combination(delta_a, comp, rng));
        if (delta_b == 1)
            w.b_vecs.push_back(CoefficientVector::unit(1, 0));
        else
            w.b_vecs.push_back(detail::random_combination(delta_b, all_b, rng));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// Dense baselines. Both assign a single task per worker; with k_b == 1 they
// degenerate to matrix-vector plans.
// ---------------------------------------------------------------------------

inline std::vector<double> default_eval_points(long n) {
    std::vector<double> z(n);
    if (n == 1) {
        z[0] = 0.0;
        return z;
    }
    for (long i = 0; i < n; ++i) z[i] = -1.0 + 2.0 * static_cast<double>(i) / (n - 1);
    return z;
}

inline EncodingPlan build_polynomial_baseline(long n, long k_a, long k_b,
                                              std::vector<double> eval_points = {}) {
    if (k_a < 1 || k_b < 1) throw regime_error("poly requires k_A, k_B >= 1");
    if (eval_points.empty()) eval_points = default_eval_points(n);
    if (static_cast<long>(eval_points.size()) != n)
        throw parameter_error("poly needs one evaluation point per worker");
    for (size_t i = 0; i < eval_points.size(); ++i)
        for (size_t j = i + 1; j < eval_points.size(); ++j)
            if (eval_points[i] == eval_points[j])
                throw parameter_error("poly evaluation points must be distinct");

    EncodingPlan plan;
    plan.kind = k_b == 1 ? PlanKind::matvec : PlanKind::matmat;
    plan.scheme_id = "poly";
    plan.n = n;
    plan.delta_a = k_a;
    plan.delta_b = k_b;
    plan.ell_a = 1;
    plan.ell_b = 1;
    plan.seed = 0;
    auto powers = [](double z, long count, long stride) {
        std::vector<long> support;
        std::vector<double> values;
        double p = 1.0;
        for (long i = 0; i < count; ++i) {
            if (p != 0.0) {
                support.push_back(i);
                values.push_back(p);
            }
            for (long s = 0; s < stride; ++s) p *= z;
        }
        return std::pair(support, values);
    };
    for (long i = 0; i < n; ++i) {
        WorkerPlan w;
        auto [sa, va] = powers(eval_points[i], k_a, 1);
        w.a_vecs.push_back(CoefficientVector(k_a, sa, va));
        if (k_b > 1) {
            auto [sb, vb] = powers(eval_points[i], k_b, k_a);
            w.b_vecs.push_back(CoefficientVector(k_b, sb, vb));
        }
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

inline EncodingPlan build_dense_random_baseline(long n, long k_a, long k_b, std::uint64_t seed) {
    if (k_a < 1 || k_b < 1) throw regime_error("dense-random requires k_A, k_B >= 1");
    EncodingPlan plan;
    plan.kind = k_b == 1 ? PlanKind::matvec : PlanKind::matmat;
    plan.scheme_id = "dense-random";
    plan.n = n;
    plan.delta_a = k_a;
    plan.delta_b = k_b;
    plan.ell_a = 1;
    plan.ell_b = 1;
    plan.seed = seed;
    Rng root(seed);
    std::vector<long> all_a(k_a), all_b(k_b);
    for (long j = 0; j < k_a; ++j) all_a[j] = j;
    for (long j = 0; j < k_b; ++j) all_b[j] = j;
    for (long i = 0; i < n; ++i) {
        Rng rng = root.fork(i);
        WorkerPlan w;
        if (k_a == 1)
            w.a_vecs.push_back(CoefficientVector(1, {0}, {rng.coefficient()}));
        else
            w.a_vecs.push_back(detail::random_combination(k_a, all_a, rng));
        if (k_b > 1) w.b_vecs.push_back(detail::random_combination(k_b, all_b, rng));
        plan.workers.push_back(std::move(w));
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// Uniform configuration record shared by the CLI, the metrics dispatch and
// the experiment drivers.
// ---------------------------------------------------------------------------

struct SchemeConfig {
    std::string scheme;  // one of the builder ids above
    long n = 0;
    Rational gamma_a{0, 1}, gamma_b{0, 1};
    long beta_a = 1, beta_b = 1;
    std::optional<DesignSet> designs_a, designs_b;
    Rational gamma_u{0, 1}, gamma_c{0, 1};    // coded-bottom matvec
    Rational gamma_au{0, 1}, gamma_ac{0, 1};  // coded-bottom matmat
    long k_a = 0, k_b = 1;
    std::vector<double> eval_points;
    std::uint64_t seed = 0;
};

inline EncodingPlan build_plan(const SchemeConfig& cfg) {
    if (cfg.scheme == "beta-matvec") {
        if (!cfg.designs_a) throw parameter_error("beta-matvec needs a design set");
        return build_beta_matvec(cfg.n, cfg.gamma_a, cfg.beta_a, *cfg.designs_a, cfg.seed);
    }
    if (cfg.scheme == "beta-matmat") {
        if (!cfg.designs_a || !cfg.designs_b)
            throw parameter_error("beta-matmat needs design sets for A and B");
        return build_beta_matmat(cfg.n, cfg.gamma_a, cfg.gamma_b, cfg.beta_a, cfg.beta_b,
                                 *cfg.designs_a, *cfg.designs_b, cfg.seed);
    }
    if (cfg.scheme == "coded-bottom-matvec")
        return build_coded_bottom_matvec(cfg.n, cfg.gamma_u, cfg.gamma_c, cfg.seed);
    if (cfg.scheme == "coded-bottom-matmat")
        return build_coded_bottom_matmat(cfg.n, cfg.gamma_au, cfg.gamma_ac, cfg.gamma_b, cfg.seed);
    if (cfg.scheme == "scs-matvec") return build_scs_matvec(cfg.n, cfg.k_a, cfg.seed);
    if (cfg.scheme == "scs-matmat") return build_scs_matmat(cfg.n, cfg.k_a, cfg.k_b, cfg.seed);
    if (cfg.scheme == "poly")
        return build_polynomial_baseline(cfg.n, cfg.k_a, cfg.k_b, cfg.eval_points);
    if (cfg.scheme == "dense-random")
        return build_dense_random_baseline(cfg.n, cfg.k_a, cfg.k_b, cfg.seed);
    throw parameter_error("unknown scheme: " + cfg.scheme);
}

}  // namespace strag
