#include "commfact/matcore.hpp"

#include "commfact/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace commfact {

void Tolerances::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) {
            std::ostringstream os;
            os << "tolerance " << name << " = " << v << " must lie in (0, 1)";
            throw InvalidArgument(os.str());
        }
    };
    check(rank_rel, "rank_rel");
    check(residual_rel, "residual_rel");
    check(norm_iter_rel, "norm_iter_rel");
}

void require_square(const Matrix& x, const char* what) {
    if (x.rows() != x.cols() || x.rows() == 0) {
        std::ostringstream os;
        os << what << ": expected a non-empty square matrix, got " << x.rows() << "x" << x.cols();
        throw DimensionMismatch(os.str());
    }
}

void require_finite(const Matrix& x, const char* what) {
    if (!x.allFinite()) throw NonFinite(std::string(what) + ": matrix has NaN or Inf entries");
}

void require_same_shape(const Matrix& x, const Matrix& y, const char* what) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        std::ostringstream os;
        os << what << ": dimension mismatch " << x.rows() << "x" << x.cols() << " vs " << y.rows()
           << "x" << y.cols();
        throw DimensionMismatch(os.str());
    }
}

Matrix commutator(const Matrix& x, const Matrix& y) {
    require_square(x, "commutator");
    require_same_shape(x, y, "commutator");
    return x * y - y * x;
}

cplx normalized_trace(const Matrix& x) {
    require_square(x, "normalized_trace");
    return x.trace() / static_cast<double>(x.rows());
}

double operator_norm(const Matrix& x, const Tolerances& tol) {
    require_square(x, "operator_norm");
    if (x.rows() <= kDenseNormCap) {
        Eigen::BDCSVD<Matrix> svd(x);
        return svd.singularValues()(0);
    }
    PowerIterationOptions opts;
    opts.rel_tol = tol.norm_iter_rel;
    return power_iteration_norm([&](const Vector& in, Vector& out) { out.noalias() = x * in; },
                                [&](const Vector& in, Vector& out) {
                                    out.noalias() = x.adjoint() * in;
                                },
                                x.rows(), opts);
}

Matrix remove_trace(const Matrix& x, const Tolerances& tol) {
    require_square(x, "remove_trace");
    const cplx tau = normalized_trace(x);
    if (std::abs(tau) > tol.residual_rel * operator_norm(x, tol)) {
        std::ostringstream os;
        os << "normalized trace " << tau << " is not zero";
        throw TraceNotZero(tau, os.str());
    }
    Matrix out = x;
    out.diagonal().array() -= tau;
    return out;
}

double l2_norm(const Matrix& x) {
    require_square(x, "l2_norm");
    return std::sqrt(x.squaredNorm() / static_cast<double>(x.rows()));
}

namespace {

Vector random_complex_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

Matrix ginibre(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Matrix z(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = cplx(re, im);
        }
    return z;
}

// Unitary whose first column is a unit multiple of v.
Matrix unitary_with_first_column(const Vector& v) {
    Eigen::HouseholderQR<Matrix> qr{Matrix(v)};
    Matrix q = qr.householderQ();
    return q;
}

cplx dominant_eigenvalue(const Matrix& block) {
    Eigen::ComplexEigenSolver<Matrix> es(block, false);
    const auto& ev = es.eigenvalues();
    Index best = 0;
    for (Index i = 1; i < ev.size(); ++i)
        if (std::abs(ev(i)) > std::abs(ev(best))) best = i;
    return ev.size() ? ev(best) : cplx(0.0);
}

}  // namespace

NormEstimate estimate_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, Index dim,
                           const PowerIterationOptions& opts) {
    NormEstimate est;
    if (dim == 0) {
        est.converged = true;
        return est;
    }
    Vector x = opts.start ? *opts.start : random_complex_vector(dim, opts.seed);
    if (x.size() != dim) throw DimensionMismatch("estimate_norm: start vector has wrong length");
    const double nx = x.norm();
    if (nx == 0.0) throw InvalidArgument("estimate_norm: start vector is zero");
    x /= nx;

    Vector y(dim), z(dim);
    double prev = -1.0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        apply(x, y);
        const double sigma = y.norm();
        est.iterations = it;
        est.value = std::max(est.value, sigma);
        if (sigma == 0.0) {
            est.converged = true;
            return est;
        }
        if (prev >= 0.0 && std::abs(sigma - prev) <= opts.rel_tol * sigma) {
            est.converged = true;
            return est;
        }
        prev = sigma;
        apply_adjoint(y, z);
        const double nz = z.norm();
        if (nz == 0.0) {
            est.converged = true;
            return est;
        }
        x = z / nz;
    }
    return est;
}

double power_iteration_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, Index dim,
                            const PowerIterationOptions& opts) {
    const NormEstimate est = estimate_norm(apply, apply_adjoint, dim, opts);
    if (!est.converged) {
        std::ostringstream os;
        os << "power iteration did not converge in " << opts.max_iter
           << " iterations (best estimate " << est.value << ")";
        throw NonConvergence(est.value, os.str());
    }
    return est.value;
}

bool lex_greater(cplx a, cplx b) noexcept {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

double normality_defect(const Matrix& x) {
    require_square(x, "normality_defect");
    const Matrix d = x.adjoint() * x - x * x.adjoint();
    return operator_norm(d);
}

SpectralData spectral_decomposition_normal(const Matrix& x, const Tolerances& tol) {
    require_square(x, "spectral_decomposition_normal");
    require_finite(x, "spectral_decomposition_normal");
    const Index n = x.rows();
    const double norm = operator_norm(x, tol);
    const double defect = normality_defect(x);
    if (defect > tol.residual_rel * norm * norm) {
        std::ostringstream os;
        os << "matrix is not normal: ||x*x - xx*|| = " << defect << " exceeds "
           << tol.residual_rel * norm * norm;
        throw NormalityViolation(defect, os.str());
    }
    if (norm == 0.0) return {Matrix::Identity(n, n), Vector::Zero(n)};

    Eigen::ComplexSchur<Matrix> schur(x);
    const Matrix& q = schur.matrixU();
    const Vector diag = schur.matrixT().diagonal();

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return lex_greater(diag(i), diag(j)); });

    SpectralData out{Matrix(n, n), Vector(n)};
    for (Index k = 0; k < n; ++k) {
        out.unitary.col(k) = q.col(order[static_cast<std::size_t>(k)]);
        out.values(k) = diag(order[static_cast<std::size_t>(k)]);
    }
    const Matrix rebuilt = out.unitary * out.values.asDiagonal() * out.unitary.adjoint();
    const double resid = operator_norm(rebuilt - x, tol);
    if (resid > tol.residual_rel * norm) {
        std::ostringstream os;
        os << "eigenbasis reconstruction residual " << resid << " exceeds "
           << tol.residual_rel * norm;
        throw NormalityViolation(defect, os.str());
    }
    return out;
}

TriangularForm schur_strict_triangularize(const Matrix& t, const Tolerances& tol) {
    require_square(t, "schur_strict_triangularize");
    require_finite(t, "schur_strict_triangularize");
    const Index n = t.rows();
    const double scale = operator_norm(t, tol);
    TriangularForm out{Matrix::Identity(n, n), Matrix::Zero(n, n)};
    if (scale == 0.0) return out;

    const double threshold = tol.residual_rel * scale;
    Matrix w = t;
    for (Index k = 0; k + 1 < n; ++k) {
        const Index m = n - k;
        const Matrix sub = w.bottomRightCorner(m, m);
        Eigen::BDCSVD<Matrix> svd(sub, Eigen::ComputeFullV);
        const double sigma_min = svd.singularValues()(m - 1);
        if (sigma_min > threshold) {
            const cplx ev = dominant_eigenvalue(sub);
            std::ostringstream os;
            os << "matrix is not nilpotent: deflation step " << k << " has smallest singular value "
               << sigma_min << " (eigenvalue " << ev << ")";
            throw NilpotencyViolation(ev, os.str());
        }
        const Matrix g = unitary_with_first_column(svd.matrixV().col(m - 1));
        w.rightCols(m) = w.rightCols(m) * g;
        w.bottomRows(m) = g.adjoint() * w.bottomRows(m);
        out.unitary.rightCols(m) = out.unitary.rightCols(m) * g;
    }

    double worst = 0.0;
    Index wi = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i)
            if (std::abs(w(i, j)) > worst) {
                worst = std::abs(w(i, j));
                wi = i;
            }
    if (worst > threshold) {
        std::ostringstream os;
        os << "matrix is not nilpotent: triangular form keeps an entry of size " << worst
           << " on or below the diagonal";
        throw NilpotencyViolation(w(wi, wi), os.str());
    }
    out.upper = w.triangularView<Eigen::StrictlyUpper>();
    return out;
}

RankSplit rank_split(const Matrix& x, const Tolerances& tol, double scale) {
    RankSplit out;
    const Index rows = x.rows();
    const Index cols = x.cols();
    if (rows == 0 || cols == 0) {
        out.range = Matrix(rows, 0);
        out.kernel = Matrix::Identity(cols, cols);
        out.gap_ratio = std::numeric_limits<double>::infinity();
        return out;
    }
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = tol.rank_rel * scale * static_cast<double>(std::max(rows, cols));
    Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    out.rank = r;
    out.range = svd.matrixU().leftCols(r);
    out.kernel = svd.matrixV().rightCols(cols - r);
    if (r > 0 && r < s.size() && s(r) > 0.0)
        out.gap_ratio = s(r - 1) / s(r);
    else
        out.gap_ratio = std::numeric_limits<double>::infinity();
    return out;
}

Matrix numerical_kernel(const Matrix& x, const Tolerances& tol) {
    require_square(x, "numerical_kernel");
    const Index n = x.rows();
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = tol.rank_rel * s(0) * static_cast<double>(n);
    Index r = 0;
    while (r < n && s(r) > cutoff) ++r;
    return svd.matrixV().rightCols(n - r);
}

Matrix orthonormal_span(const Matrix& columns, const Tolerances& tol, double scale,
                        double* gap_ratio) {
    RankSplit split = rank_split(columns, tol, scale);
    if (gap_ratio) *gap_ratio = split.gap_ratio;
    return std::move(split.range);
}

Matrix orthogonal_complement_within(const Matrix& outer, const Matrix& inner,
                                    const Tolerances& tol, double* gap_ratio) {
    Matrix residue = outer;
    if (inner.cols() > 0) residue -= inner * (inner.adjoint() * outer);
    return orthonormal_span(residue, tol, 1.0, gap_ratio);
}

Matrix haar_unitary(Index n, std::uint64_t seed) {
    const Matrix z = ginibre(n, seed);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (Index k = 0; k < n; ++k) {
        const cplx d = r(k, k);
        const double m = std::abs(d);
        if (m > 0.0) q.col(k) *= d / m;
    }
    return q;
}

Matrix random_normal_traceless(Index n, std::uint64_t seed) {
    Vector lambda = random_complex_vector(n, derive_seed(seed, 1)) / std::sqrt(2.0);
    lambda.array() -= lambda.mean();
    const Matrix u = haar_unitary(n, derive_seed(seed, 2));
    return u * lambda.asDiagonal() * u.adjoint();
}

Matrix random_strict_upper(Index n, std::uint64_t seed) {
    Matrix z = ginibre(n, seed);
    return z.triangularView<Eigen::StrictlyUpper>();
}

Matrix random_nilpotent(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> modulus(0.5, 1.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    Matrix nil = random_strict_upper(n, derive_seed(seed, 2)) / static_cast<double>(n);
    for (Index i = 0; i + 1 < n; ++i) nil(i, i + 1) = std::polar(modulus(rng), phase(rng));
    const Matrix u = haar_unitary(n, derive_seed(seed, 3));
    return u * nil * u.adjoint();
}

Matrix random_traceless(Index n, std::uint64_t seed) {
    Matrix z = ginibre(n, seed);
    const cplx tau = z.trace() / static_cast<double>(n);
    z.diagonal().array() -= tau;
    return z;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace commfact
