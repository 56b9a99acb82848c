#include "commfact/errors.hpp"
#include "commfact/normalfact.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace commfact;

namespace {

const cplx I1(0.0, 1.0);

Matrix diag(const std::vector<cplx>& d) {
    Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (std::size_t k = 0; k < d.size(); ++k) m(static_cast<Index>(k), static_cast<Index>(k)) = d[k];
    return m;
}

double independent_residual(const Matrix& a, const Factorization& f) {
    return oracle::norm(a - oracle::commutator(f.b, f.c));
}

std::vector<cplx> diagonal_of(const Matrix& m) {
    std::vector<cplx> d;
    for (Index k = 0; k < m.rows(); ++k) d.push_back(m(k, k));
    return d;
}

}  // namespace

TEST(ShiftMatrix, Examples) {
    Matrix b2 = Matrix::Zero(2, 2);
    b2(0, 1) = 1.0;
    EXPECT_EQ(oracle::max_abs(shift_matrix(2) - b2), 0.0);
    EXPECT_EQ(oracle::max_abs(shift_matrix(1)), 0.0);
    const Matrix b4 = shift_matrix(4);
    EXPECT_EQ(oracle::max_abs(b4 * b4 * b4 * b4), 0.0);
    EXPECT_GT(oracle::max_abs(b4 * b4 * b4), 0.0);
    EXPECT_NEAR(oracle::norm(b4), 1.0, 1e-14);
}

TEST(PartialSumDiagonal, Examples) {
    EXPECT_EQ(oracle::max_abs(partial_sum_diagonal(std::vector<cplx>{1.0, -1.0}) - diag({1.0, 0.0})), 0.0);
    const std::vector<cplx> r{1.0, I1, -1.0, -I1};
    EXPECT_EQ(oracle::max_abs(partial_sum_diagonal(r) - diag({1.0, 1.0 + I1, I1, 0.0})), 0.0);
    EXPECT_EQ(oracle::max_abs(partial_sum_diagonal(std::vector<cplx>(3, 0.0))), 0.0);
    EXPECT_THROW(partial_sum_diagonal(std::vector<cplx>{1.0, 1.0}), SumNotZero);
}

TEST(PartialSumDiagonal, NormEqualsPrefixMax) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const auto v = oracle::random_zero_sum(9, rng);
        std::vector<std::size_t> id(9);
        std::iota(id.begin(), id.end(), std::size_t{0});
        EXPECT_NEAR(oracle::norm(partial_sum_diagonal(v)), oracle::prefix_max(v, id), 1e-14);
    }
}

TEST(FactorNormal, TwoByTwoDiagonal) {
    const Matrix a = diag({1.0, -1.0});
    const Factorization f = factor_normal(a);
    Matrix b = Matrix::Zero(2, 2), c = Matrix::Zero(2, 2);
    b(0, 1) = 1.0;
    c(1, 0) = 1.0;
    EXPECT_LE(oracle::max_abs(f.b - b), 1e-15);
    EXPECT_LE(oracle::max_abs(f.c - c), 1e-15);
    EXPECT_EQ(f.residual_op, 0.0);
    EXPECT_NEAR(f.norm_product, 1.0, 1e-15);
    EXPECT_EQ(f.method, Method::NormalShift);
    ASSERT_TRUE(f.certificate.has_value());
}

TEST(FactorNormal, ZeroMatrix) {
    const Factorization f = factor_normal(Matrix::Zero(4, 4));
    EXPECT_EQ(oracle::max_abs(f.c), 0.0);
    EXPECT_EQ(f.residual_op, 0.0);
}

TEST(FactorNormal, OneByOne) {
    const Factorization f = factor_normal(Matrix::Zero(1, 1));
    EXPECT_EQ(f.residual_op, 0.0);
    EXPECT_THROW(factor_normal(Matrix::Identity(1, 1)), TraceNotZero);
}

TEST(FactorNormal, RandomSixteen) {
    const Matrix a = random_normal_traceless(16, 42);
    const Factorization f = factor_normal(a);
    const double na = oracle::norm(a);
    EXPECT_LE(independent_residual(a, f), 1e-8 * na);
    EXPECT_NEAR(f.residual_op, independent_residual(a, f), 1e-12);
    EXPECT_LE(f.norm_product, 2.0 * na + 1e-8);
    EXPECT_LE(f.norm_product, f.certificate->prefix_max * (1 + 1e-10));
}

TEST(FactorNormal, BanaszczykBoundForSmallDimensions) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Index n = 2 + static_cast<Index>(seed % 7);
        const Matrix a = random_normal_traceless(n, 500 + seed);
        const Factorization f = factor_normal(a);
        const double na = oracle::norm(a);
        EXPECT_LE(f.norm_product, kBanaszczykConstant * na + 1e-9) << "n = " << n;
        EXPECT_LE(oracle::norm(f.b), 1.0 + 1e-12);
        EXPECT_LE(f.residual_op, 1e-8 * na);
    }
}

TEST(FactorNormal, UnitaryCovariance) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 8; ++trial) {
        const Matrix a = random_normal_traceless(12, 700 + static_cast<std::uint64_t>(trial));
        const Matrix w = oracle::random_unitary(12, rng);
        const Factorization f1 = factor_normal(a);
        const Factorization f2 = factor_normal(w * a * w.adjoint());
        EXPECT_NEAR(f1.residual_op, f2.residual_op, 1e-10);
    }
}

TEST(FactorNormal, Errors) {
    EXPECT_THROW(factor_normal(oracle::jordan(3)), NormalityViolation);
    EXPECT_THROW(factor_normal(Matrix::Identity(3, 3)), TraceNotZero);
    EXPECT_THROW(factor_normal(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST(FactorNormal, TraceOfCommutatorVanishes) {
    const Matrix a = random_normal_traceless(20, 44);
    const Factorization f = factor_normal(a);
    EXPECT_LE(std::abs(oracle::trace(oracle::commutator(f.b, f.c))),
              1e-12 * oracle::norm(f.b) * oracle::norm(f.c));
}

TEST(FactorDiagonalCyclic, TwoPoint) {
    const CyclicRealization r = factor_diagonal_cyclic(std::vector<cplx>{1.0, -1.0});
    Matrix u(2, 2);
    u << 0.0, 1.0, 1.0, 0.0;
    EXPECT_EQ(oracle::max_abs(r.factorization.b - u), 0.0);
    EXPECT_EQ(oracle::max_abs(u.adjoint() * r.factorization.c - diag({1.0, 0.0})), 0.0);
    EXPECT_EQ(oracle::max_abs(oracle::commutator(r.factorization.b, r.factorization.c) - diag({1.0, -1.0})),
              0.0);
    EXPECT_EQ(r.factorization.method, Method::CyclicUnitary);
}

TEST(FactorDiagonalCyclic, ZerosAndRootsOfUnity) {
    const CyclicRealization z = factor_diagonal_cyclic(std::vector<cplx>(3, 0.0));
    EXPECT_EQ(oracle::max_abs(oracle::commutator(z.factorization.b, z.factorization.c)), 0.0);

    const std::vector<cplx> roots{1.0, I1, -1.0, -I1};
    const CyclicRealization r = factor_diagonal_cyclic(roots);
    const Matrix comm = oracle::commutator(r.factorization.b, r.factorization.c);
    EXPECT_LE(oracle::max_abs(comm - comm.diagonal().asDiagonal().toDenseMatrix()), 1e-15);
    EXPECT_LE(oracle::multiset_distance(diagonal_of(comm), roots), 1e-10);
    double sup = 0.0;
    for (cplx d : r.potential) sup = std::max(sup, std::abs(d));
    EXPECT_LE(sup, kBanaszczykConstant + 1e-12);
}

TEST(FactorDiagonalCyclic, RealizesMultisetAndIsUnitary) {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 12);
        const auto v = oracle::random_zero_sum(n, rng);
        const CyclicRealization r = factor_diagonal_cyclic(v);
        const Matrix comm = oracle::commutator(r.factorization.b, r.factorization.c);
        EXPECT_LE(oracle::multiset_distance(diagonal_of(comm), v), 1e-10);
        EXPECT_TRUE(oracle::is_unitary(r.factorization.b, 1e-12));
        double sup = 0.0;
        for (cplx d : r.potential) sup = std::max(sup, std::abs(d));
        EXPECT_LE(sup, r.factorization.certificate->prefix_max + 1e-15);
    }
}

TEST(FactorDiagonalCyclic, PotentialIsCoboundary) {
    std::mt19937_64 rng(46);
    const auto v = oracle::random_zero_sum(7, rng);
    const CyclicRealization r = factor_diagonal_cyclic(v);
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
        const cplx prev = r.potential[(k + n - 1) % n];
        EXPECT_NEAR(std::abs(r.potential[k] - prev - r.ordered[k]), 0.0, 1e-14);
    }
}

TEST(Measure, Validation) {
    EXPECT_THROW(DiscreteMeasure({1.0, -1.0}, {0.5, 0.4}), InvalidArgument);
    EXPECT_THROW(DiscreteMeasure({1.0, 1.0}, {0.5, 0.5}), InvalidArgument);
    EXPECT_THROW(DiscreteMeasure({1.0, -1.0}, {1.0, 0.0}), InvalidArgument);
    EXPECT_NO_THROW(DiscreteMeasure({1.0, -1.0}, {0.5, 0.5}));
}

TEST(ApproximateMeasure, ExactWeights) {
    const DiscreteMeasure two({1.0, -1.0}, {0.5, 0.5});
    const MeasureSample s = approximate_measure(two, 4);
    EXPECT_EQ(s.counts, (std::vector<std::size_t>{2, 2}));
    EXPECT_LE(oracle::multiset_distance(s.values, {1.0, 1.0, -1.0, -1.0}), 0.0);

    const DiscreteMeasure four({1.0, I1, -1.0, -I1}, {0.25, 0.25, 0.25, 0.25});
    EXPECT_EQ(approximate_measure(four, 8).counts, (std::vector<std::size_t>{2, 2, 2, 2}));
}

TEST(ApproximateMeasure, LargestRemainderRounding) {
    const double w = 2.0 / 3.0;
    const DiscreteMeasure mu({1.0 - w, -w}, {w, 1.0 - w});
    const MeasureSample s = approximate_measure(mu, 5);
    EXPECT_EQ(s.counts, (std::vector<std::size_t>{3, 2}));
    cplx sum = 0.0;
    for (cplx v : s.values) sum += v;
    EXPECT_EQ(sum, cplx(0.0));
    EXPECT_NEAR(std::abs(s.correction), std::abs((3.0 * (1.0 - w) - 2.0 * w) / 5.0), 1e-15);
    for (cplx v : s.values) EXPECT_LE(std::abs(v), mu.max_modulus() + std::abs(s.correction) + 1e-15);
}

TEST(ApproximateMeasure, Errors) {
    EXPECT_THROW(approximate_measure(DiscreteMeasure({1.0, 0.0}, {0.5, 0.5}), 4), InvalidArgument);
    EXPECT_THROW(approximate_measure(DiscreteMeasure({1.0, -1.0}, {0.5, 0.5}), 1), InvalidArgument);
}

TEST(ApproximateMeasure, AlwaysSumsToZero) {
    const DiscreteMeasure mu({1.0, I1, -1.0 - I1}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    for (std::size_t n = 3; n < 40; ++n) {
        const MeasureSample s = approximate_measure(mu, n);
        cplx sum = 0.0;
        for (cplx v : s.values) sum += v;
        EXPECT_EQ(sum, cplx(0.0)) << "n = " << n;
        EXPECT_LE(std::abs(s.correction), mu.max_modulus() * 3.0 / static_cast<double>(n));
    }
}

TEST(CenteredProjection, Examples) {
    EXPECT_LE(oracle::max_abs(centered_projection(2, 1) - diag({0.5, -0.5})), 1e-16);
    EXPECT_LE(oracle::max_abs(centered_projection(3, 1) - diag({2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0})), 1e-15);
    EXPECT_LE(std::abs(oracle::trace(centered_projection(3, 1))), 1e-16);
    const Factorization f = factor_normal(centered_projection(5, 2));
    EXPECT_LE(f.residual_op, 1e-10);
    EXPECT_THROW(centered_projection(3, 3), InvalidArgument);
    EXPECT_THROW(centered_projection(3, 0), InvalidArgument);
}
