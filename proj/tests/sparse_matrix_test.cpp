#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "strag/sparse_matrix.hpp"

namespace strag {
namespace {

std::vector<std::vector<double>> dense_transpose_product(const SparseMatrix& a,
                                                         const SparseMatrix& b) {
    auto da = a.dense();
    auto db = b.dense();
    std::vector<std::vector<double>> out(a.cols(), std::vector<double>(b.cols(), 0.0));
    for (long i = 0; i < a.cols(); ++i)
        for (long j = 0; j < b.cols(); ++j)
            for (long k = 0; k < a.rows(); ++k) out[i][j] += da[k][i] * db[k][j];
    return out;
}

TEST(GenerateSparse, FullDensityFillsEveryCell) {
    SparseMatrix m = generate_sparse(10, 10, 1.0, 7);
    EXPECT_EQ(m.nnz(), 100);
}

TEST(GenerateSparse, DensityMatchesTarget) {
    SparseMatrix m = generate_sparse(10000, 10000, 0.03, 123);
    const double density = m.density();
    EXPECT_GE(density, 0.027);
    EXPECT_LE(density, 0.033);
}

TEST(GenerateSparse, DeterministicForFixedSeed) {
    SparseMatrix a = generate_sparse(100, 100, 0.05, 42);
    SparseMatrix b = generate_sparse(100, 100, 0.05, 42);
    EXPECT_TRUE(a == b);
    SparseMatrix c = generate_sparse(100, 100, 0.05, 43);
    EXPECT_FALSE(a == c);
}

TEST(GenerateSparse, RejectsBadDensity) {
    EXPECT_THROW(generate_sparse(10, 10, 0.0, 1), parameter_error);
    EXPECT_THROW(generate_sparse(10, 10, 1.5, 1), parameter_error);
    EXPECT_THROW(generate_sparse(0, 10, 0.5, 1), parameter_error);
}

TEST(SparseMatrix, RejectsDuplicatesAndOutOfRange) {
    EXPECT_THROW(SparseMatrix(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), shape_error);
    EXPECT_THROW(SparseMatrix(2, 2, {{0, 2, 1.0}}), shape_error);
}

TEST(EncodeBlock, UnitVectorCopiesBlock) {
    SparseMatrix m = generate_sparse(50, 60, 0.2, 5);
    BlockPartition part(60, 3);
    for (long j = 0; j < 3; ++j) {
        SparseMatrix coded = encode_block(m, part, CoefficientVector::unit(3, j));
        EXPECT_TRUE(coded == block_column(m, part, j));
    }
}

TEST(EncodeBlock, DisjointSupportsAddNnz) {
    // Three blocks whose nonzeros sit in different rows, so no cancellation.
    std::vector<Entry> entries;
    for (long r = 0; r < 30; ++r) entries.push_back({r, (r % 3) * 2 + r / 15, 1.0 + r});
    SparseMatrix m(30, 6, entries);
    BlockPartition part(6, 3);
    CoefficientVector coeffs(3, {0, 1, 2}, {0.5, -2.0, 3.0});
    SparseMatrix coded = encode_block(m, part, coeffs);
    long expected = block_column(m, part, 0).nnz() + block_column(m, part, 1).nnz() +
                    block_column(m, part, 2).nnz();
    EXPECT_EQ(coded.nnz(), expected);
}

TEST(EncodeBlock, LengthMismatchRejected) {
    SparseMatrix m = generate_sparse(10, 6, 0.5, 1);
    BlockPartition part(6, 3);
    EXPECT_THROW(encode_block(m, part, CoefficientVector::unit(2, 0)), shape_error);
}

TEST(EncodeBlock, EncodedDensityFollowsUnionModel) {
    // density sigma in, support beta -> expected density 1 - (1-sigma)^beta.
    const double sigma = 0.05;
    const long beta = 3;
    const double expected = 1.0 - std::pow(1.0 - sigma, beta);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SparseMatrix m = generate_sparse(2000, 1500, sigma, 1000 + seed);
        BlockPartition part(1500, 3);
        Rng rng(seed);
        CoefficientVector coeffs(3, {0, 1, 2},
                                 {rng.coefficient(), rng.coefficient(), rng.coefficient()});
        total += encode_block(m, part, coeffs).density();
    }
    const double mean = total / 20.0;
    EXPECT_NEAR(mean, expected, 0.1 * expected);
}

TEST(EncodeBlock, LinearInCoefficients) {
    SparseMatrix m = generate_sparse(80, 40, 0.3, 9);
    BlockPartition part(40, 4);
    CoefficientVector c1(4, {0, 2}, {1.5, -0.5});
    CoefficientVector c2(4, {1, 2, 3}, {2.0, 0.75, -1.0});
    CoefficientVector sum(4, {0, 1, 2, 3}, {1.5, 2.0, 0.25, -1.0});
    auto lhs = encode_block(m, part, sum).dense();
    auto r1 = encode_block(m, part, c1).dense();
    auto r2 = encode_block(m, part, c2).dense();
    for (size_t r = 0; r < lhs.size(); ++r)
        for (size_t c = 0; c < lhs[r].size(); ++c)
            EXPECT_NEAR(lhs[r][c], r1[r][c] + r2[r][c], 1e-12);
}

TEST(EncodeBlock, BlocksReassembleToOriginal) {
    SparseMatrix m = generate_sparse(60, 48, 0.1, 11);
    BlockPartition part(48, 6);
    std::vector<Entry> stacked;
    for (long j = 0; j < 6; ++j) {
        SparseMatrix blk = block_column(m, part, j);
        for (const auto& e : blk.entries())
            stacked.push_back({e.row, e.col + j * part.block_width(), e.value});
    }
    EXPECT_TRUE(SparseMatrix(60, 48, stacked) == m);
}

TEST(SpmvT, IdentityPassThrough) {
    SparseMatrix eye(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
    std::vector<double> y = spmv_t(eye, {1.0, 2.0, 3.0});
    EXPECT_EQ(y, (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(SpmvT, ZeroMatrixGivesZero) {
    SparseMatrix zero(4, 3, {});
    std::vector<double> y = spmv_t(zero, {1.0, 1.0, 1.0, 1.0});
    EXPECT_EQ(y, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(SpmvT, MatchesDenseReference) {
    SparseMatrix a = generate_sparse(50, 40, 0.25, 3);
    Rng rng(17);
    std::vector<double> x(50);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<double> got = spmv_t(a, x);
    auto d = a.dense();
    for (long c = 0; c < 40; ++c) {
        double want = 0.0;
        for (long r = 0; r < 50; ++r) want += d[r][c] * x[r];
        EXPECT_NEAR(got[c], want, 1e-12);
    }
}

TEST(SpmvT, ShapeMismatchRejected) {
    SparseMatrix a = generate_sparse(5, 4, 0.5, 3);
    EXPECT_THROW(spmv_t(a, std::vector<double>(4, 1.0)), shape_error);
}

TEST(SpmmT, IdentityAndZero) {
    SparseMatrix eye(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
    SparseMatrix b = generate_sparse(3, 5, 0.8, 2);
    EXPECT_TRUE(spmm_t(eye, b) == b);
    SparseMatrix zero(3, 4, {});
    EXPECT_EQ(spmm_t(zero, b).nnz(), 0);
}

TEST(SpmmT, MatchesDenseReference) {
    SparseMatrix a = generate_sparse(40, 30, 0.2, 4);
    SparseMatrix b = generate_sparse(40, 20, 0.2, 5);
    auto want = dense_transpose_product(a, b);
    auto got = spmm_t(a, b).dense();
    for (long i = 0; i < 30; ++i)
        for (long j = 0; j < 20; ++j) EXPECT_NEAR(got[i][j], want[i][j], 1e-12);
}

TEST(SpmmT, ShapeMismatchRejected) {
    SparseMatrix a = generate_sparse(4, 3, 0.5, 1);
    SparseMatrix b = generate_sparse(5, 3, 0.5, 1);
    EXPECT_THROW(spmm_t(a, b), shape_error);
}

TEST(SpgemmFlops, DenseCountsMultiplyOut) {
    SparseMatrix a = generate_sparse(7, 4, 1.0, 1);
    SparseMatrix b = generate_sparse(7, 5, 1.0, 2);
    EXPECT_EQ(spgemm_flops(a, b), 7u * 4u * 5u);
}

TEST(SpgemmFlops, ZeroOperandGivesZero) {
    SparseMatrix a(6, 4, {});
    SparseMatrix b = generate_sparse(6, 5, 0.5, 2);
    EXPECT_EQ(spgemm_flops(a, b), 0u);
}

TEST(SpgemmFlops, MatchesDirectRecount) {
    SparseMatrix a = generate_sparse(30, 20, 0.1, 8);
    SparseMatrix b = generate_sparse(30, 10, 0.1, 9);
    std::uint64_t want = 0;
    auto da = a.dense();
    auto db = b.dense();
    for (long r = 0; r < 30; ++r) {
        std::uint64_t na = 0, nb = 0;
        for (long c = 0; c < 20; ++c) na += da[r][c] != 0.0;
        for (long c = 0; c < 10; ++c) nb += db[r][c] != 0.0;
        want += na * nb;
    }
    EXPECT_EQ(spgemm_flops(a, b), want);
}

TEST(TripletFormat, RoundTripsWithComments) {
    SparseMatrix m = generate_sparse(12, 9, 0.4, 21);
    std::ostringstream os;
    os << "# coordinate triplets\n";
    write_triplets(os, m);
    std::istringstream is(os.str());
    EXPECT_TRUE(read_triplets(is) == m);
}

TEST(TripletFormat, RejectsDuplicateCoordinates) {
    std::istringstream is("2 2 2\n0 1 1.5\n0 1 2.5\n");
    EXPECT_THROW(read_triplets(is), shape_error);
}

TEST(TripletFormat, RejectsTruncatedStream) {
    std::istringstream is("2 2 2\n0 1 1.5\n");
    EXPECT_THROW(read_triplets(is), shape_error);
}

}  // namespace
}  // namespace strag
