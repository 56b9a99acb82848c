#include "commfact/ergodic.hpp"
#include "commfact/errors.hpp"
#include "commfact/normalfact.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace commfact;
using namespace commfact::ergodic;

namespace {

const cplx I1(0.0, 1.0);

Function random_function(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Function f(static_cast<std::size_t>(n));
    for (cplx& x : f) x = cplx(g(rng), g(rng));
    return f;
}

Matrix diag_of(const Function& f) {
    Matrix d = Matrix::Zero(static_cast<Index>(f.size()), static_cast<Index>(f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) d(static_cast<Index>(j), static_cast<Index>(j)) = f[j];
    return d;
}

// The shift unitary, built column by column: U e_{j + step} = e_j.
Matrix shift_unitary(Index n, long long step) {
    Matrix u = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        const Index col = static_cast<Index>(((j + step) % n + n) % n);
        u(j, col) = 1.0;
    }
    return u;
}

double residual(const Matrix& target, const Factorization& f) {
    return oracle::max_abs(target - oracle::commutator(f.b, f.c));
}

}  // namespace

TEST(CyclicSystem, UnitaryPowersAndCovariance) {
    std::mt19937_64 rng(501);
    for (Index n : {1, 2, 7, 64, 256}) {
        const long long step = 1 + static_cast<long long>(n) / 3;
        const CyclicSystem sys(n, step);
        const Matrix u = sys.unitary();
        EXPECT_EQ(oracle::max_abs(u - shift_unitary(n, step)), 0.0);
        EXPECT_TRUE(oracle::is_unitary(u, 0.0));
        Matrix p = Matrix::Identity(n, n);
        Matrix sq = u;
        for (Index k = n; k > 0; k >>= 1) {
            if (k & 1) p = p * sq;
            sq = sq * sq;
        }
        EXPECT_LE(oracle::max_abs(p - Matrix::Identity(n, n)), 1e-12);
        EXPECT_EQ(oracle::max_abs(sys.unitary_power(-1) - u.adjoint()), 0.0);

        const int trials = n <= 64 ? 100 : 10;
        for (int t = 0; t < trials; ++t) {
            const Function f = random_function(n, rng);
            const Matrix lhs = u * sys.embed(f) * u.adjoint();
            EXPECT_EQ(oracle::max_abs(lhs - sys.embed(sys.compose(f))), 0.0);
        }
    }
    EXPECT_THROW(CyclicSystem(0, 1), InvalidArgument);
    EXPECT_EQ(CyclicSystem(5, -1).step(), 4);
}

TEST(CyclicSystem, EmbeddingIsMultiplicative) {
    std::mt19937_64 rng(502);
    const CyclicSystem sys(9, 2);
    const Function f = random_function(9, rng);
    const Function g = random_function(9, rng);
    Function fg(9);
    for (std::size_t j = 0; j < 9; ++j) fg[j] = f[j] * g[j];
    EXPECT_EQ(oracle::max_abs(sys.embed(f) * sys.embed(g) - sys.embed(fg)), 0.0);
    EXPECT_THROW(sys.embed(Function(8)), DimensionMismatch);
}

TEST(Eigenfunction, Examples) {
    const Eigenfunction e = eigenfunction(1, CyclicSystem(4, 1));
    EXPECT_EQ(e.h, (Function{1.0, I1, -1.0, -I1}));
    EXPECT_EQ(e.zeta, I1);
    EXPECT_TRUE(e.usable);

    const Eigenfunction d = eigenfunction(3, CyclicSystem(6, 2));
    EXPECT_EQ(d.zeta, cplx(1.0));
    EXPECT_FALSE(d.usable);
    EXPECT_FALSE(eigenfunction(2, CyclicSystem(8, 4)).usable);
    EXPECT_THROW(eigenfunction(0, CyclicSystem(4, 1)), InvalidArgument);
    EXPECT_THROW(eigenfunction(8, CyclicSystem(4, 1)), InvalidArgument);
}

TEST(Eigenfunction, EigenRelationAndUnitModulus) {
    for (Index n : {3, 8, 30, 256})
        for (long long step : {1LL, 5LL})
            for (long long m = 1; m < std::min<long long>(n, 12); ++m) {
                const CyclicSystem sys(n, step);
                const Eigenfunction e = eigenfunction(m, sys);
                const cplx zeta = std::exp(2.0 * std::numbers::pi * I1 * static_cast<double>(m * step) /
                                           static_cast<double>(n));
                EXPECT_LE(std::abs(e.zeta - zeta), 1e-13);
                const Function shifted = sys.compose(e.h);
                for (std::size_t j = 0; j < e.h.size(); ++j) {
                    EXPECT_LE(std::abs(shifted[j] - e.zeta * e.h[j]), 1e-13);
                    EXPECT_NEAR(std::abs(e.h[j]), 1.0, 1e-15);
                }
            }
}

TEST(SingleTerm, Examples) {
    const CyclicSystem sys(4, 1);
    const Factorization z = single_term_factor(Function(4, 0.0), 1, sys);
    EXPECT_EQ(oracle::max_abs(z.b), 0.0);
    EXPECT_EQ(z.residual_op, 0.0);

    const Factorization one = single_term_factor(Function(4, 1.0), 1, sys);
    const Function h{1.0, I1, -1.0, -I1};
    for (Index j = 0; j < 4; ++j) {
        const Index col = (j + 1) % 4;
        const cplx g = 1.0 / (h[static_cast<std::size_t>(col)] * (1.0 + I1));
        EXPECT_LE(std::abs(one.b(j, col) - g), 1e-15);
    }
    EXPECT_LE(residual(shift_unitary(4, 1), one), 1e-15);
    EXPECT_EQ(one.method, Method::Eigenfunction);

    EXPECT_THROW(single_term_factor(Function(6, 1.0), 3, CyclicSystem(6, 2)), EigenvalueDegenerate);
}

TEST(SingleTerm, RandomSweep) {
    std::mt19937_64 rng(503);
    for (Index n : {2, 5, 64, 256}) {
        const CyclicSystem sys(n, 1);
        const Function f = random_function(n, rng);
        const Factorization fac = single_term_factor(f, 1, sys);
        EXPECT_LE(residual(shift_unitary(n, 1) * diag_of(f), fac), 1e-12) << "n = " << n;
        EXPECT_LE(fac.residual_op, 1e-12);
        EXPECT_NEAR(oracle::norm(fac.c), 1.0, 1e-13);
        double gmax = 0.0;
        for (Index j = 0; j < n; ++j) gmax = std::max(gmax, oracle::max_abs(fac.b.row(j)));
        EXPECT_NEAR(oracle::norm(fac.b), gmax, 1e-12 * gmax);
    }
}

TEST(SingleTerm, CommutatorDisplayHoldsForArbitraryFunctions) {
    std::mt19937_64 rng(504);
    for (Index n : {3, 16, 100}) {
        const CyclicSystem sys(n, 2);
        const Function g = random_function(n, rng);
        const Function h = random_function(n, rng);
        const Function h_back = sys.compose(h, -1);
        Function rhs(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = g[j] * (h[j] - h_back[j]);
        const Matrix u = sys.unitary();
        const Matrix lhs = oracle::commutator(u * diag_of(g), diag_of(h));
        EXPECT_LE(oracle::max_abs(lhs - u * diag_of(rhs)), 1e-12);
    }
}

TEST(MultiTerm, Examples) {
    std::mt19937_64 rng(505);
    const CyclicSystem sys(8, 1);
    std::map<long long, Function> fs;
    for (long long k = 1; k <= 3; ++k) fs[k] = random_function(8, rng);
    EXPECT_EQ(admissible_eigenvalue({1, 2, 3}, sys), 1);
    const Factorization f = multi_term_factor(fs, sys);
    Matrix target = Matrix::Zero(8, 8);
    for (const auto& [k, v] : fs) target += shift_unitary(8, k) * diag_of(v);
    EXPECT_LE(residual(target, f), 1e-12);
    EXPECT_LE(oracle::max_abs(f.c - diag_of(eigenfunction(1, sys).h)), 0.0);
    EXPECT_LE(oracle::max_abs(crossed_sum(fs, sys) - target), 0.0);

    std::map<long long, Function> four;
    for (long long k = 1; k <= 4; ++k) four[k] = Function(4, 1.0);
    EXPECT_THROW(multi_term_factor(four, CyclicSystem(4, 1)), NoAdmissibleEigenvalue);
    EXPECT_THROW(admissible_eigenvalue({0, 1}, sys), InvalidArgument);
}

TEST(MultiTerm, SingleTermConsistency) {
    std::mt19937_64 rng(506);
    const CyclicSystem sys(12, 5);
    const Function f = random_function(12, rng);
    const Factorization one = single_term_factor(f, 1, sys);
    const Factorization many = multi_term_factor({{1, f}}, sys);
    EXPECT_LE(oracle::max_abs(one.b - many.b), 1e-15);
    EXPECT_LE(oracle::max_abs(one.c - many.c), 0.0);
}

TEST(MultiTerm, AdmissibleSearchMatchesBruteForce) {
    EXPECT_EQ(admissible_eigenvalue({2}, CyclicSystem(4, 1)), 1);
    EXPECT_THROW(admissible_eigenvalue({3}, CyclicSystem(6, 2)), NoAdmissibleEigenvalue);
    EXPECT_THROW(admissible_eigenvalue({12}, CyclicSystem(12, 1)), NoAdmissibleEigenvalue);
    for (long long n = 2; n <= 12; ++n)
        for (long long step = 0; step < n; ++step)
            for (long long k1 = 1; k1 <= n; ++k1)
                for (long long k2 = k1; k2 <= n; k2 += 3) {
                    const CyclicSystem sys(n, step);
                    long long expected = 0;
                    for (long long m = n - 1; m >= 1; --m) {
                        const cplx z1 = std::exp(2.0 * std::numbers::pi * I1 * static_cast<double>(m * k1 * step) / static_cast<double>(n));
                        const cplx z2 = std::exp(2.0 * std::numbers::pi * I1 * static_cast<double>(m * k2 * step) / static_cast<double>(n));
                        if (std::abs(z1 - 1.0) > 1e-9 && std::abs(z2 - 1.0) > 1e-9) expected = m;
                    }
                    if (expected == 0) {
                        EXPECT_THROW(admissible_eigenvalue({k1, k2}, sys), NoAdmissibleEigenvalue);
                    } else {
                        EXPECT_EQ(admissible_eigenvalue({k1, k2}, sys), expected);
                    }
                }
}

TEST(MultiTerm, RandomSweepWithNegativeTerms) {
    std::mt19937_64 rng(507);
    for (Index n : {16, 128, 256}) {
        const CyclicSystem sys(n, 3);
        std::map<long long, Function> fs;
        for (long long k : {-2LL, 1LL, 2LL, 5LL}) fs[k] = random_function(n, rng);
        const Factorization f = multi_term_factor(fs, sys);
        Matrix target = Matrix::Zero(n, n);
        for (const auto& [k, v] : fs) target += shift_unitary(n, 3 * k) * diag_of(v);
        EXPECT_LE(residual(target, f), 1e-12) << "n = " << n;
        EXPECT_LE(f.residual_op, 1e-12);
    }
}

TEST(Distribution, DiagonalSpectrumMatchesValues) {
    std::mt19937_64 rng(508);
    const CyclicSystem sys(8, 1);
    Function f = random_function(8, rng);
    cplx mean = 0.0;
    for (const cplx& x : f) mean += x / 8.0;
    for (cplx& x : f) x -= mean;
    const Eigen::ComplexEigenSolver<Matrix> es(sys.embed(f));
    std::vector<cplx> eig(es.eigenvalues().data(), es.eigenvalues().data() + 8);
    EXPECT_LE(oracle::multiset_distance(eig, f), 1e-15);

    const CyclicRealization r = factor_diagonal_cyclic(f);
    const Eigen::ComplexEigenSolver<Matrix> ec(oracle::commutator(r.factorization.b, r.factorization.c));
    std::vector<cplx> ceig(ec.eigenvalues().data(), ec.eigenvalues().data() + 8);
    EXPECT_LE(oracle::multiset_distance(ceig, f), 1e-10);
}
