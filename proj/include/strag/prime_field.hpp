#pragma once

#include <cstdint>
#include <vector>

#include "strag/common.hpp"
#include "strag/plan.hpp"

namespace strag {

// Arithmetic mod the Mersenne prime 2^61 - 1.
namespace gf {

constexpr std::uint64_t P = 2305843009213693951ULL;  // 2^61 - 1

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    if (s >= P) s -= P;
    return s;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) {
    return a >= b ? a - b : a + P - b;
}

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    __uint128_t x = static_cast<__uint128_t>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(x) & P;
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t s = lo + hi;
    if (s >= P) s -= P;
    return s;
}

inline std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t inv(std::uint64_t a) { return pow(a, P - 2); }

inline std::uint64_t random_nonzero(Rng& rng) {
    for (;;) {
        std::uint64_t v = rng.next_u64() & ((1ULL << 61) - 1);
        if (v != 0 && v < P) return v;
    }
}

// Rank of a dense row-major matrix over GF(P). Destroys its input.
inline long rank(std::vector<std::vector<std::uint64_t>>& rows, long cols) {
    long rank = 0;
    const long nrows = static_cast<long>(rows.size());
    for (long col = 0; col < cols && rank < nrows; ++col) {
        long pivot = -1;
        for (long r = rank; r < nrows; ++r) {
            if (rows[r][col] != 0) { pivot = r; break; }
        }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        const std::uint64_t piv_inv = inv(rows[rank][col]);
        for (long r = rank + 1; r < nrows; ++r) {
            if (rows[r][col] == 0) continue;
            const std::uint64_t f = mul(rows[r][col], piv_inv);
            rows[r][col] = 0;
            for (long c = col + 1; c < cols; ++c)
                if (rows[rank][c] != 0) rows[r][c] = sub(rows[r][c], mul(f, rows[rank][c]));
        }
        ++rank;
    }
    return rank;
}

}  // namespace gf

// A plan with its coefficient symbols resampled over GF(P). The resampling
// preserves both the Kronecker structure of matmat tasks and the sharing of
// coefficient vectors across the tasks of one worker, so generic-rank
// conclusions transfer to the real plan.
class ResampledPlan {
  public:
    ResampledPlan(const EncodingPlan& plan, std::uint64_t resample_seed)
        : n_(plan.n), ell_(plan.ell()), delta_(plan.delta()) {
        rows_.resize(n_ * ell_);
        Rng root(resample_seed);
        for (long i = 0; i < plan.n; ++i) {
            Rng rng = root.fork(i);
            const WorkerPlan& w = plan.workers[i];
            std::vector<std::vector<std::uint64_t>> av, bv;
            for (const auto& v : w.a_vecs) {
                std::vector<std::uint64_t> f(v.support.size());
                for (auto& x : f) x = gf::random_nonzero(rng);
                av.push_back(std::move(f));
            }
            for (const auto& v : w.b_vecs) {
                std::vector<std::uint64_t> f(v.support.size());
                for (auto& x : f) x = gf::random_nonzero(rng);
                bv.push_back(std::move(f));
            }
            for (long t = 0; t < ell_; ++t) {
                Task task = plan.task(i, t);
                auto& row = rows_[i * ell_ + t];
                row.assign(delta_, 0);
                if (task.b == nullptr) {
                    const auto& f = av[t];
                    for (size_t k = 0; k < task.a->support.size(); ++k)
                        row[task.a->support[k]] = f[k];
                } else {
                    const long ai = t / plan.ell_b, bi = t % plan.ell_b;
                    const auto& fa = av[ai];
                    const auto& fb = bv[bi];
                    for (size_t ka = 0; ka < task.a->support.size(); ++ka)
                        for (size_t kb = 0; kb < task.b->support.size(); ++kb)
                            row[task.a->support[ka] * plan.delta_b + task.b->support[kb]] =
                                gf::mul(fa[ka], fb[kb]);
                }
            }
        }
    }

    long delta() const { return delta_; }

    // Generic rank of the system assembled from the first w[i] tasks of each
    // worker equals delta?
    bool full_rank(const std::vector<long>& w) const {
        long total = 0;
        for (long x : w) total += x;
        if (total < delta_) return false;
        std::vector<std::vector<std::uint64_t>> rows;
        rows.reserve(total);
        for (long i = 0; i < n_; ++i)
            for (long t = 0; t < w[i]; ++t) rows.push_back(rows_[i * ell_ + t]);
        return gf::rank(rows, delta_) == delta_;
    }

  private:
    long n_, ell_, delta_;
    std::vector<std::vector<std::uint64_t>> rows_;
};

}  // namespace strag
