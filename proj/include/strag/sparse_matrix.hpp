#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "strag/common.hpp"

namespace strag {

struct Entry {
    long row = 0;
    long col = 0;
    double value = 0.0;
};

// Coordinate-format sparse matrix. Entries are unique per (row, col) and kept
// sorted by (col, row) after construction.
class SparseMatrix {
  public:
    SparseMatrix() = default;

    SparseMatrix(long rows, long cols, std::vector<Entry> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (rows_ < 0 || cols_ < 0) throw shape_error("negative matrix dimension");
        normalize_();
    }

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    long nnz() const { return static_cast<long>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

    double density() const {
        if (rows_ == 0 || cols_ == 0) return 0.0;
        return static_cast<double>(nnz()) / (static_cast<double>(rows_) * cols_);
    }

    std::vector<std::vector<double>> dense() const {
        std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
        for (const auto& e : entries_) d[e.row][e.col] = e.value;
        return d;
    }

    bool operator==(const SparseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_ || entries_.size() != o.entries_.size())
            return false;
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].row != o.entries_[i].row || entries_[i].col != o.entries_[i].col ||
                entries_[i].value != o.entries_[i].value)
                return false;
        }
        return true;
    }

  private:
    void normalize_() {
        for (const auto& e : entries_) {
            if (e.row < 0 || e.row >= rows_ || e.col < 0 || e.col >= cols_)
                throw shape_error("entry index out of range");
        }
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.col, a.row) < std::tie(b.col, b.row);
        });
        for (size_t i = 1; i < entries_.size(); ++i) {
            if (entries_[i].row == entries_[i - 1].row && entries_[i].col == entries_[i - 1].col)
                throw shape_error("duplicate (row, col) coordinate");
        }
        // Exact zeros carry no information; dropping them keeps nnz meaningful.
        entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                      [](const Entry& e) { return e.value == 0.0; }),
                       entries_.end());
    }

    long rows_ = 0;
    long cols_ = 0;
    std::vector<Entry> entries_;
};

// Equal-width block-column partition of a matrix with `total_cols` columns.
struct BlockPartition {
    long total_cols = 0;
    long num_blocks = 1;

    BlockPartition(long total_cols_, long num_blocks_)
        : total_cols(total_cols_), num_blocks(num_blocks_) {
        if (num_blocks <= 0 || total_cols <= 0)
            throw parameter_error("block partition needs positive sizes");
        if (total_cols % num_blocks != 0)
            throw parameter_error("num_blocks must divide total_cols");
    }

    long block_width() const { return total_cols / num_blocks; }
};

// A length-delta vector of combination coefficients with explicit support.
struct CoefficientVector {
    long length = 0;
    std::vector<long> support;        // sorted, unique
    std::vector<double> values;       // aligned with support, all nonzero

    CoefficientVector() = default;
    CoefficientVector(long length_, std::vector<long> support_, std::vector<double> values_)
        : length(length_), support(std::move(support_)), values(std::move(values_)) {
        if (support.size() != values.size())
            throw shape_error("support/value length mismatch");
        std::vector<size_t> order(support.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return support[a] < support[b]; });
        std::vector<long> s(support.size());
        std::vector<double> v(values.size());
        for (size_t i = 0; i < order.size(); ++i) {
            s[i] = support[order[i]];
            v[i] = values[order[i]];
        }
        support.swap(s);
        values.swap(v);
        for (size_t i = 0; i < support.size(); ++i) {
            if (support[i] < 0 || support[i] >= length)
                throw shape_error("support index out of range");
            if (i > 0 && support[i] == support[i - 1])
                throw shape_error("duplicate support index");
            if (values[i] == 0.0)
                throw shape_error("zero value inside declared support");
        }
    }

    static CoefficientVector unit(long length, long index) {
        return CoefficientVector(length, {index}, {1.0});
    }

    std::vector<double> dense() const {
        std::vector<double> d(length, 0.0);
        for (size_t i = 0; i < support.size(); ++i) d[support[i]] = values[i];
        return d;
    }

    bool operator==(const CoefficientVector& o) const {
        return length == o.length && support == o.support && values == o.values;
    }
};

// i.i.d. Bernoulli(density) entries, values uniform on [-1, 1]; deterministic
// for a fixed seed. Skips over zero cells geometrically, so cost is O(nnz).
inline SparseMatrix generate_sparse(long rows, long cols, double density, std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw parameter_error("generate_sparse needs rows, cols >= 1");
    if (!(density > 0.0) || density > 1.0)
        throw parameter_error("density must lie in (0, 1]");
    Rng rng(seed);
    std::vector<Entry> entries;
    const std::uint64_t total = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if (density == 1.0) {
        entries.reserve(total);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c)
                entries.push_back({r, c, rng.uniform(-1.0, 1.0)});
        return SparseMatrix(rows, cols, std::move(entries));
    }
    entries.reserve(static_cast<size_t>(static_cast<double>(total) * density * 1.1) + 16);
    const double log1mp = std::log1p(-density);
    std::uint64_t pos = 0;
    for (;;) {
        double u = rng.next_double();
        // Geometric gap to the next nonzero cell in row-major order.
        std::uint64_t gap = static_cast<std::uint64_t>(std::floor(std::log1p(-u) / log1mp));
        pos += gap;
        if (pos >= total) break;
        entries.push_back({static_cast<long>(pos / cols), static_cast<long>(pos % cols),
                           rng.uniform(-1.0, 1.0)});
        ++pos;
    }
    return SparseMatrix(rows, cols, std::move(entries));
}

// Returns the i-th block-column of `m` under `partition` as a standalone
// rows x block_width matrix.
inline SparseMatrix block_column(const SparseMatrix& m, const BlockPartition& partition, long i) {
    if (partition.total_cols != m.cols()) throw shape_error("partition does not match matrix");
    if (i < 0 || i >= partition.num_blocks) throw parameter_error("block index out of range");
    const long w = partition.block_width();
    const long lo = i * w;
    std::vector<Entry> entries;
    for (const auto& e : m.entries()) {
        if (e.col >= lo && e.col < lo + w) entries.push_back({e.row, e.col - lo, e.value});
    }
    return SparseMatrix(m.rows(), w, std::move(entries));
}

// sum_i coeffs[i] * block_i. Output has the width of one block.
inline SparseMatrix encode_block(const SparseMatrix& m, const BlockPartition& partition,
                                 const CoefficientVector& coeffs) {
    if (partition.total_cols != m.cols()) throw shape_error("partition does not match matrix");
    if (coeffs.length != partition.num_blocks)
        throw shape_error("coefficient length != number of blocks");
    const long w = partition.block_width();
    std::vector<double> coef(partition.num_blocks, 0.0);
    std::vector<bool> in_support(partition.num_blocks, false);
    for (size_t i = 0; i < coeffs.support.size(); ++i) {
        coef[coeffs.support[i]] = coeffs.values[i];
        in_support[coeffs.support[i]] = true;
    }
    // Accumulate per local (col, row); the source is already (col, row) sorted,
    // so a sort of the remapped triples merges aligned cells.
    std::vector<Entry> acc;
    for (const auto& e : m.entries()) {
        const long b = e.col / w;
        if (!in_support[b]) continue;
        acc.push_back({e.row, e.col - b * w, e.value * coef[b]});
    }
    std::sort(acc.begin(), acc.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.col, a.row) < std::tie(b.col, b.row);
    });
    std::vector<Entry> merged;
    merged.reserve(acc.size());
    for (const auto& e : acc) {
        if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
            merged.back().value += e.value;
        else
            merged.push_back(e);
    }
    return SparseMatrix(m.rows(), w, std::move(merged));
}

// Exact A^T x.
inline std::vector<double> spmv_t(const SparseMatrix& a, const std::vector<double>& x) {
    if (static_cast<long>(x.size()) != a.rows())
        throw shape_error("spmv_t: vector length != rows");
    std::vector<double> y(a.cols(), 0.0);
    for (const auto& e : a.entries()) y[e.col] += e.value * x[e.row];
    return y;
}

// Exact A^T B.
inline SparseMatrix spmm_t(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows()) throw shape_error("spmm_t: row counts differ");
    // Bucket both operands by row, then pair within each row.
    std::vector<std::vector<std::pair<long, double>>> arows(a.rows()), brows(b.rows());
    for (const auto& e : a.entries()) arows[e.row].push_back({e.col, e.value});
    for (const auto& e : b.entries()) brows[e.row].push_back({e.col, e.value});
    std::vector<std::vector<double>> dense_acc(a.cols(), std::vector<double>(b.cols(), 0.0));
    for (long r = 0; r < a.rows(); ++r) {
        if (arows[r].empty() || brows[r].empty()) continue;
        for (const auto& [i, va] : arows[r])
            for (const auto& [j, vb] : brows[r]) dense_acc[i][j] += va * vb;
    }
    std::vector<Entry> entries;
    for (long i = 0; i < a.cols(); ++i)
        for (long j = 0; j < b.cols(); ++j)
            if (dense_acc[i][j] != 0.0) entries.push_back({i, j, dense_acc[i][j]});
    return SparseMatrix(a.cols(), b.cols(), std::move(entries));
}

// Multiply-add count of the row-pairing SpGEMM for A^T B.
inline std::uint64_t spgemm_flops(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows()) throw shape_error("spgemm_flops: row counts differ");
    std::vector<std::uint64_t> anr(a.rows(), 0), bnr(b.rows(), 0);
    for (const auto& e : a.entries()) ++anr[e.row];
    for (const auto& e : b.entries()) ++bnr[e.row];
    std::uint64_t total = 0;
    for (long r = 0; r < a.rows(); ++r) total += anr[r] * bnr[r];
    return total;
}

// ---------------------------------------------------------------------------
// Coordinate triplet text format:
//   first non-comment line:  rows cols nnz
//   then one "row col value" triple per line, 0-based; '#' starts a comment.
// ---------------------------------------------------------------------------

inline void write_triplets(std::ostream& os, const SparseMatrix& m) {
    os << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
    os << std::setprecision(17);
    for (const auto& e : m.entries()) os << e.row << " " << e.col << " " << e.value << "\n";
}

inline SparseMatrix read_triplets(std::istream& is) {
    std::string line;
    auto next_data_line = [&](std::string& out) -> bool {
        while (std::getline(is, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto notspace = line.find_first_not_of(" \t\r\n");
            if (notspace == std::string::npos) continue;
            out = line;
            return true;
        }
        return false;
    };
    std::string header;
    if (!next_data_line(header)) throw shape_error("triplet stream: missing header");
    std::istringstream hs(header);
    long rows = 0, cols = 0, nnz = 0;
    if (!(hs >> rows >> cols >> nnz)) throw shape_error("triplet stream: bad header");
    std::vector<Entry> entries;
    entries.reserve(nnz);
    for (long k = 0; k < nnz; ++k) {
        std::string l;
        if (!next_data_line(l)) throw shape_error("triplet stream: fewer entries than declared");
        std::istringstream es(l);
        Entry e;
        if (!(es >> e.row >> e.col >> e.value)) throw shape_error("triplet stream: bad entry line");
        entries.push_back(e);
    }
    return SparseMatrix(rows, cols, std::move(entries));
}

inline void save_triplets(const std::string& path, const SparseMatrix& m) {
    std::ofstream f(path);
    if (!f) throw parameter_error("cannot open for writing: " + path);
    write_triplets(f, m);
}

inline SparseMatrix load_triplets(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parameter_error("cannot open for reading: " + path);
    return read_triplets(f);
}

}  // namespace strag
