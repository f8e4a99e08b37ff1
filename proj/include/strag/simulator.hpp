#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "strag/common.hpp"
#include "strag/decoder.hpp"
#include "strag/plan.hpp"
#include "strag/sparse_matrix.hpp"

namespace strag {

// ---------------------------------------------------------------------------
// Worker speed model: one slowdown factor per worker per run (persistent
// stragglers), optional per-task jitter, fixed per-task overhead.
// ---------------------------------------------------------------------------

struct SpeedModel {
    enum class Kind { deterministic, uniform, shifted_exponential };

    Kind kind = Kind::uniform;
    double base_time = 1e-9;         // seconds per flop
    double per_task_overhead = 0.0;  // seconds
    double per_task_jitter = 0.0;    // extra uniform [0, jitter] slowdown per task; off by default

    std::vector<double> slowdowns;   // deterministic: per-worker factors (+inf = dead)
    double uniform_lo = 1.0, uniform_hi = 1.5;
    double exp_shift = 1.0, exp_rate = 1.0;

    void validate() const {
        if (base_time <= 0.0) throw parameter_error("base_time must be positive");
        if (per_task_overhead < 0.0) throw parameter_error("overhead must be >= 0");
        if (per_task_jitter < 0.0) throw parameter_error("jitter must be >= 0");
        switch (kind) {
            case Kind::deterministic:
                for (double s : slowdowns)
                    if (!(s >= 1.0)) throw parameter_error("slowdowns must be >= 1");
                break;
            case Kind::uniform:
                if (!(uniform_lo >= 1.0) || uniform_hi < uniform_lo)
                    throw parameter_error("uniform slowdown needs 1 <= lo <= hi");
                break;
            case Kind::shifted_exponential:
                if (!(exp_shift >= 1.0) || exp_rate <= 0.0)
                    throw parameter_error("shifted exponential needs shift >= 1, rate > 0");
                break;
        }
    }

    std::vector<double> draw(long n, Rng& rng) const {
        validate();
        std::vector<double> s(n);
        switch (kind) {
            case Kind::deterministic:
                if (static_cast<long>(slowdowns.size()) != n)
                    throw parameter_error("deterministic slowdown list must have one entry per worker");
                s = slowdowns;
                break;
            case Kind::uniform:
                for (auto& x : s) x = rng.uniform(uniform_lo, uniform_hi);
                break;
            case Kind::shifted_exponential:
                for (auto& x : s) x = exp_shift - std::log(1.0 - rng.next_double()) / exp_rate;
                break;
        }
        return s;
    }
};

// ---------------------------------------------------------------------------
// Task flop costs.
// ---------------------------------------------------------------------------

// Matrix-vector task: ~2 flops per stored nonzero of the encoded block.
inline double task_flops_matvec(const SparseMatrix& encoded_a) {
    return 2.0 * static_cast<double>(encoded_a.nnz());
}

struct ExpectationParams {
    long rows = 0;
    long cols_a = 0;
    double sigma_a = 0.0;
    long cols_b = 0;      // ignored for matvec
    double sigma_b = 0.0;
};

// Density of a combination of `support` independent density-sigma blocks.
inline double encoded_density(double sigma, size_t support) {
    return 1.0 - std::pow(1.0 - sigma, static_cast<double>(support));
}

// Per-task flop counts for every worker, measured on concrete matrices.
inline std::vector<std::vector<double>> task_flops_measured(const EncodingPlan& plan,
                                                            const SparseMatrix& a,
                                                            const SparseMatrix* b) {
    BlockPartition part_a(a.cols(), plan.delta_a);
    std::vector<std::vector<double>> flops(plan.n);
    for (long i = 0; i < plan.n; ++i) {
        std::vector<SparseMatrix> coded_a;
        for (const auto& v : plan.workers[i].a_vecs) coded_a.push_back(encode_block(a, part_a, v));
        if (plan.kind == PlanKind::matvec) {
            for (const auto& ca : coded_a) flops[i].push_back(task_flops_matvec(ca));
        } else {
            if (b == nullptr) throw parameter_error("matmat cost needs the B matrix");
            BlockPartition part_b(b->cols(), plan.delta_b);
            std::vector<SparseMatrix> coded_b;
            for (const auto& v : plan.workers[i].b_vecs)
                coded_b.push_back(encode_block(*b, part_b, v));
            for (long t = 0; t < plan.ell(); ++t)
                flops[i].push_back(static_cast<double>(
                    spgemm_flops(coded_a[t / plan.ell_b], coded_b[t % plan.ell_b])));
        }
    }
    return flops;
}

// Expected per-task flop counts from block densities alone.
inline std::vector<std::vector<double>> task_flops_expected(const EncodingPlan& plan,
                                                            const ExpectationParams& p) {
    if (p.rows <= 0 || p.cols_a <= 0) throw parameter_error("expectation mode needs dimensions");
    const double w_a = static_cast<double>(p.cols_a) / plan.delta_a;
    std::vector<std::vector<double>> flops(plan.n);
    for (long i = 0; i < plan.n; ++i) {
        for (long t = 0; t < plan.ell(); ++t) {
            Task task = plan.task(i, t);
            const double da = encoded_density(p.sigma_a, task.a->support.size());
            if (plan.kind == PlanKind::matvec) {
                flops[i].push_back(2.0 * p.rows * w_a * da);
            } else {
                if (p.cols_b <= 0) throw parameter_error("matmat expectation needs cols_b");
                const double w_b = static_cast<double>(p.cols_b) / plan.delta_b;
                const double db = encoded_density(p.sigma_b, task.b->support.size());
                flops[i].push_back(static_cast<double>(p.rows) * (w_a * da) * (w_b * db));
            }
        }
    }
    return flops;
}

// ---------------------------------------------------------------------------
// Event-driven run.
// ---------------------------------------------------------------------------

struct TimelineEvent {
    double time = 0.0;
    long worker = 0;
    long task = 0;
};

struct RunReport {
    double completion_time = 0.0;
    ComputationState state;   // at the decode instant (or full completion)
    long long total_symbols = 0;
    bool decodable = false;
    std::vector<double> slowdowns;
    std::vector<TimelineEvent> timeline;  // filled only when requested
};

// Workers process their task lists strictly in order; completion time is the
// first event at which the accumulated state decodes. Decodability is only
// re-tested while the run is still undecodable (it is monotone in the state).
inline RunReport simulate(const EncodingPlan& plan, const std::vector<std::vector<double>>& flops,
                          const SpeedModel& speed, std::uint64_t seed,
                          bool keep_timeline = false) {
    if (static_cast<long>(flops.size()) != plan.n)
        throw parameter_error("per-task flops must cover every worker");
    Rng rng(seed);
    RunReport report;
    report.slowdowns = speed.draw(plan.n, rng);

    std::vector<TimelineEvent> events;
    for (long i = 0; i < plan.n; ++i) {
        const double s = report.slowdowns[i];
        if (std::isinf(s)) continue;  // dead worker, produces nothing
        double t = 0.0;
        for (long k = 0; k < plan.ell(); ++k) {
            double jitter = speed.per_task_jitter > 0.0
                                ? 1.0 + rng.uniform(0.0, speed.per_task_jitter)
                                : 1.0;
            t += s * jitter * speed.base_time * flops[i][k] + speed.per_task_overhead;
            events.push_back({t, i, k});
        }
    }
    std::sort(events.begin(), events.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.worker != b.worker) return a.worker < b.worker;
        return a.task < b.task;
    });

    const bool hall = detail::hall_supported(plan);
    std::optional<detail::OraclePair> oracle;
    if (!hall) oracle.emplace(plan);

    ComputationState state{std::vector<long>(plan.n, 0)};
    long long total = 0;
    const long long delta = plan.delta();
    double last_time = 0.0;
    // Simultaneous completions are applied atomically: the state at an
    // instant includes every task finishing at that instant.
    for (size_t k = 0; k < events.size();) {
        const double now = events[k].time;
        while (k < events.size() && events[k].time == now) {
            ++state.w[events[k].worker];
            ++total;
            if (keep_timeline) report.timeline.push_back(events[k]);
            ++k;
        }
        last_time = now;
        if (total < delta) continue;
        const bool dec = hall ? hall_decodable_matvec(plan, state) : oracle->decodable(state.w);
        if (dec) {
            // The Hall fast path and the prime-field oracle agree on the
            // supported plans; re-verify so the report is self-contained.
            if (hall && !is_decodable(plan, state)) continue;
            report.completion_time = now;
            report.state = state;
            report.total_symbols = total;
            report.decodable = true;
            return report;
        }
    }
    report.completion_time = last_time;
    report.state = state;
    report.total_symbols = total;
    report.decodable = false;
    return report;
}

}  // namespace strag
