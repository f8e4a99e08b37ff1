#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strag/common.hpp"
#include "strag/plan.hpp"
#include "strag/prime_field.hpp"
#include "strag/sparse_matrix.hpp"

namespace strag {

// Per-worker count of completed tasks, in processing order.
struct ComputationState {
    std::vector<long> w;

    long total() const {
        long t = 0;
        for (long x : w) t += x;
        return t;
    }

    void validate(const EncodingPlan& plan) const {
        if (static_cast<long>(w.size()) != plan.n)
            throw shape_error("state must have one count per worker");
        for (long x : w)
            if (x < 0 || x > plan.ell()) throw shape_error("worker count outside [0, ell]");
    }

    static ComputationState full(const EncodingPlan& plan) {
        return ComputationState{std::vector<long>(plan.n, plan.ell())};
    }

    static ComputationState zeroed(const EncodingPlan& plan, const std::vector<long>& stragglers) {
        ComputationState s = full(plan);
        for (long i : stragglers) s.w[i] = 0;
        return s;
    }
};

// The real-valued system implied by a plan and a state: one row per processed
// task, unknown u = i * delta_b + j standing for the block A_i^T B_j.
struct LinearSystem {
    long delta_a = 0;
    long delta_b = 1;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<long, long>> row_origin;  // (worker, task)

    long delta() const { return delta_a * delta_b; }
    std::pair<long, long> unknown_label(long col) const {
        return {col / delta_b, col % delta_b};
    }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd m(rows.size(), delta());
        for (size_t r = 0; r < rows.size(); ++r)
            for (long c = 0; c < delta(); ++c) m(r, c) = rows[r][c];
        return m;
    }
};

// Rows in worker-major order, task order within each worker; each row is the
// Kronecker product of the task's A and B coefficients.
inline LinearSystem assemble(const EncodingPlan& plan, const ComputationState& state) {
    state.validate(plan);
    LinearSystem sys;
    sys.delta_a = plan.delta_a;
    sys.delta_b = plan.delta_b;
    for (long i = 0; i < plan.n; ++i) {
        for (long t = 0; t < state.w[i]; ++t) {
            Task task = plan.task(i, t);
            std::vector<double> row(sys.delta(), 0.0);
            if (task.b == nullptr) {
                for (size_t k = 0; k < task.a->support.size(); ++k)
                    row[task.a->support[k]] = task.a->values[k];
            } else {
                for (size_t ka = 0; ka < task.a->support.size(); ++ka)
                    for (size_t kb = 0; kb < task.b->support.size(); ++kb)
                        row[task.a->support[ka] * plan.delta_b + task.b->support[kb]] =
                            task.a->values[ka] * task.b->values[kb];
            }
            sys.rows.push_back(std::move(row));
            sys.row_origin.push_back({i, t});
        }
    }
    return sys;
}

enum class DecodabilityMode { prime_field, numeric };

namespace detail {

constexpr std::uint64_t kOracleSeeds[2] = {0x5f3759df9e3779b9ULL, 0xc2b2ae3d27d4eb4fULL};

inline long numeric_rank(const Eigen::MatrixXd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double thresh = std::max(m.rows(), m.cols()) * sv(0) * 1e-12;
    long rank = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return rank;
}

}  // namespace detail

// Whether the system generically determines all delta unknowns. Prime-field
// mode resamples coefficient symbols over GF(2^61 - 1) twice and ANDs the
// verdicts; numeric mode uses the plan's real coefficients and an SVD rank.
inline bool is_decodable(const EncodingPlan& plan, const ComputationState& state,
                         DecodabilityMode mode = DecodabilityMode::prime_field) {
    state.validate(plan);
    if (mode == DecodabilityMode::numeric) {
        LinearSystem sys = assemble(plan, state);
        if (static_cast<long>(sys.rows.size()) < sys.delta()) return false;
        return detail::numeric_rank(sys.matrix()) == sys.delta();
    }
    for (std::uint64_t seed : detail::kOracleSeeds) {
        ResampledPlan rp(plan, seed);
        if (!rp.full_rank(state.w)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Hall-condition decodability for matrix-vector plans whose rows carry
// independent random coefficients: decodable iff the bipartite graph between
// unknowns and processed tasks has a matching saturating every unknown.
// ---------------------------------------------------------------------------

namespace detail {

// Hopcroft-Karp maximum matching; left vertices are unknowns.
class BipartiteMatcher {
  public:
    BipartiteMatcher(long left, long right) : left_(left), right_(right), adj_(left) {}

    void add_edge(long l, long r) { adj_[l].push_back(r); }

    long max_matching() {
        match_l_.assign(left_, -1);
        match_r_.assign(right_, -1);
        long matching = 0;
        while (bfs_()) {
            for (long l = 0; l < left_; ++l)
                if (match_l_[l] < 0 && dfs_(l)) ++matching;
        }
        return matching;
    }

  private:
    static constexpr long kInf = std::numeric_limits<long>::max();

    bool bfs_() {
        std::queue<long> q;
        dist_.assign(left_, kInf);
        for (long l = 0; l < left_; ++l) {
            if (match_l_[l] < 0) {
                dist_[l] = 0;
                q.push(l);
            }
        }
        bool found = false;
        while (!q.empty()) {
            long l = q.front();
            q.pop();
            for (long r : adj_[l]) {
                long l2 = match_r_[r];
                if (l2 < 0) {
                    found = true;
                } else if (dist_[l2] == kInf) {
                    dist_[l2] = dist_[l] + 1;
                    q.push(l2);
                }
            }
        }
        return found;
    }

    bool dfs_(long l) {
        for (long r : adj_[l]) {
            long l2 = match_r_[r];
            if (l2 < 0 || (dist_[l2] == dist_[l] + 1 && dfs_(l2))) {
                match_l_[l] = r;
                match_r_[r] = l;
                return true;
            }
        }
        dist_[l] = kInf;
        return false;
    }

    long left_, right_;
    std::vector<std::vector<long>> adj_;
    std::vector<long> match_l_, match_r_, dist_;
};

inline bool hall_supported(const EncodingPlan& plan) {
    if (plan.kind != PlanKind::matvec) return false;
    // Requires per-row independent coefficients; the polynomial baseline's
    // structured rows do not qualify.
    return plan.scheme_id == "beta-matvec" || plan.scheme_id == "coded-bottom-matvec" ||
           plan.scheme_id == "scs-matvec" || plan.scheme_id == "dense-random";
}

}  // namespace detail

inline bool hall_decodable_matvec(const EncodingPlan& plan, const ComputationState& state) {
    if (!detail::hall_supported(plan))
        throw unsupported_plan_error("hall decodability needs a matvec plan with per-row random coefficients (got " +
                                     plan.scheme_id + ")");
    state.validate(plan);
    const long delta = plan.delta_a;
    long total = state.total();
    detail::BipartiteMatcher matcher(delta, total);
    long r = 0;
    for (long i = 0; i < plan.n; ++i) {
        for (long t = 0; t < state.w[i]; ++t) {
            for (long s : plan.workers[i].a_vecs[t].support) matcher.add_edge(s, r);
            ++r;
        }
    }
    return matcher.max_matching() == delta;
}

// ---------------------------------------------------------------------------
// Decoding and conditioning.
// ---------------------------------------------------------------------------

struct DecodeResult {
    Eigen::MatrixXd product;  // cols(A) x cols(B), or cols(A) x 1 for matvec
    double kappa = 0.0;
    double residual = 0.0;
};

// Least-squares solve of the assembled system. `products[i][t]` is the block
// computed by worker i's t-th task (w_a x w_b; w_b = 1 for matvec); only the
// first state.w[i] blocks of each worker are read.
inline DecodeResult decode(const EncodingPlan& plan, const ComputationState& state,
                           const std::vector<std::vector<Eigen::MatrixXd>>& products) {
    state.validate(plan);
    LinearSystem sys = assemble(plan, state);
    const long delta = sys.delta();
    if (static_cast<long>(sys.rows.size()) < delta)
        throw decode_error("decode: fewer equations than unknowns",
                           std::numeric_limits<double>::infinity(), 0.0);

    long w_a = -1, w_b = -1;
    for (long i = 0; i < plan.n && w_a < 0; ++i)
        if (state.w[i] > 0) {
            w_a = products[i][0].rows();
            w_b = products[i][0].cols();
        }
    if (w_a < 0) throw decode_error("decode: empty state", 0.0, 0.0);

    Eigen::MatrixXd m = sys.matrix();
    Eigen::MatrixXd rhs(sys.rows.size(), w_a * w_b);
    for (size_t r = 0; r < sys.rows.size(); ++r) {
        auto [i, t] = sys.row_origin[r];
        const Eigen::MatrixXd& blk = products[i][t];
        if (blk.rows() != w_a || blk.cols() != w_b)
            throw shape_error("decode: inconsistent product block shape");
        for (long p = 0; p < w_a; ++p)
            for (long q = 0; q < w_b; ++q) rhs(r, p * w_b + q) = blk(p, q);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double thresh = std::max(m.rows(), m.cols()) * sv(0) * 1e-12;
    const double smin = sv(sv.size() - 1);
    const double kappa = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (smin <= thresh)
        throw decode_error("decode: rank-deficient system", kappa, 0.0);
    Eigen::MatrixXd x = svd.solve(rhs);
    const double rhs_norm = rhs.norm();
    const double residual = rhs_norm > 0 ? (m * x - rhs).norm() / rhs_norm : 0.0;

    DecodeResult result;
    result.kappa = kappa;
    result.residual = residual;
    result.product.resize(plan.delta_a * w_a, plan.delta_b * w_b);
    for (long u = 0; u < delta; ++u) {
        const long i = u / plan.delta_b, j = u % plan.delta_b;
        for (long p = 0; p < w_a; ++p)
            for (long q = 0; q < w_b; ++q)
                result.product(i * w_a + p, j * w_b + q) = x(u, p * w_b + q);
    }
    return result;
}

// kappa = sigma_max / sigma_min of the system assembled from fully completed
// survivors; +infinity if rank-deficient.
inline double condition_number(const EncodingPlan& plan, const std::vector<long>& survivors) {
    ComputationState state{std::vector<long>(plan.n, 0)};
    for (long i : survivors) state.w[i] = plan.ell();
    state.validate(plan);
    LinearSystem sys = assemble(plan, state);
    if (static_cast<long>(sys.rows.size()) < sys.delta())
        return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd m = sys.matrix();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double thresh = std::max(m.rows(), m.cols()) * sv(0) * 1e-12;
    const double smin = sv(sv.size() - 1);
    if (smin <= thresh) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

// ---------------------------------------------------------------------------
// Worker-side products for end-to-end runs.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd to_dense_eigen(const SparseMatrix& m) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (const auto& e : m.entries()) d(e.row, e.col) = e.value;
    return d;
}

// All task results of every worker for the matvec job A^T x.
inline std::vector<std::vector<Eigen::MatrixXd>> compute_products_matvec(
    const EncodingPlan& plan, const SparseMatrix& a, const std::vector<double>& x) {
    BlockPartition part(a.cols(), plan.delta_a);
    std::vector<std::vector<Eigen::MatrixXd>> out(plan.n);
    for (long i = 0; i < plan.n; ++i) {
        for (const auto& v : plan.workers[i].a_vecs) {
            SparseMatrix coded = encode_block(a, part, v);
            std::vector<double> y = spmv_t(coded, x);
            Eigen::MatrixXd blk(y.size(), 1);
            for (size_t k = 0; k < y.size(); ++k) blk(k, 0) = y[k];
            out[i].push_back(std::move(blk));
        }
    }
    return out;
}

// All task results of every worker for the matmat job A^T B, in the worker's
// row-major (a, b) processing order.
inline std::vector<std::vector<Eigen::MatrixXd>> compute_products_matmat(const EncodingPlan& plan,
                                                                         const SparseMatrix& a,
                                                                         const SparseMatrix& b) {
    BlockPartition part_a(a.cols(), plan.delta_a);
    BlockPartition part_b(b.cols(), plan.delta_b);
    std::vector<std::vector<Eigen::MatrixXd>> out(plan.n);
    for (long i = 0; i < plan.n; ++i) {
        std::vector<SparseMatrix> coded_a, coded_b;
        for (const auto& v : plan.workers[i].a_vecs) coded_a.push_back(encode_block(a, part_a, v));
        for (const auto& v : plan.workers[i].b_vecs) coded_b.push_back(encode_block(b, part_b, v));
        for (long t = 0; t < plan.ell(); ++t)
            out[i].push_back(to_dense_eigen(spmm_t(coded_a[t / plan.ell_b], coded_b[t % plan.ell_b])));
    }
    return out;
}

// Direct reference product A^T x as a column.
inline Eigen::MatrixXd direct_product_matvec(const SparseMatrix& a, const std::vector<double>& x) {
    std::vector<double> y = spmv_t(a, x);
    Eigen::MatrixXd d(y.size(), 1);
    for (size_t k = 0; k < y.size(); ++k) d(k, 0) = y[k];
    return d;
}

inline Eigen::MatrixXd direct_product_matmat(const SparseMatrix& a, const SparseMatrix& b) {
    return to_dense_eigen(spmm_t(a, b));
}

}  // namespace strag
