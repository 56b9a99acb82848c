#pragma once

// Dense complex matrix primitives shared by every factorizer.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace commfact {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Numerical cutoffs. All fields must lie strictly inside (0, 1).
struct Tolerances {
    /// Singular values below rank_rel * scale * n count as zero.
    double rank_rel = 1e-10;
    /// Relative residual accepted as "equal" after a numerical decomposition.
    double residual_rel = 1e-8;
    /// Relative change that stops a power iteration.
    double norm_iter_rel = 1e-10;

    void validate() const;
};

/// Matrices up to this dimension get an exact SVD norm; beyond it, power iteration.
inline constexpr Index kDenseNormCap = 4096;

void require_square(const Matrix& x, const char* what);
void require_finite(const Matrix& x, const char* what);
void require_same_shape(const Matrix& x, const Matrix& y, const char* what);

Matrix commutator(const Matrix& x, const Matrix& y);

/// (1/n) * sum of the diagonal; the identity has trace 1.
cplx normalized_trace(const Matrix& x);

/// x - tau(x) I when |tau(x)| <= residual_rel * ||x||; otherwise throws TraceNotZero.
Matrix remove_trace(const Matrix& x, const Tolerances& tol = {});

/// Largest singular value.
double operator_norm(const Matrix& x, const Tolerances& tol = {});

/// sqrt(normalized_trace(x* x)).
double l2_norm(const Matrix& x);

// ---------------------------------------------------------------------------
// Matrix-free norm estimation

using ApplyFn = std::function<void(const Vector& in, Vector& out)>;

struct PowerIterationOptions {
    double rel_tol = 1e-10;
    int max_iter = 1000;
    std::uint64_t seed = 0x5eedULL;
    /// Overrides the seeded random start vector when set.
    std::optional<Vector> start;
};

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Power iteration on A*A. The returned value ||A x_k|| never decreases
/// with k, so it is always a lower bound on ||A||.
NormEstimate estimate_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, Index dim,
                           const PowerIterationOptions& opts);

/// Same as estimate_norm but throws NonConvergence (carrying the best
/// estimate) when the iteration budget runs out.
double power_iteration_norm(const ApplyFn& apply, const ApplyFn& apply_adjoint, Index dim,
                            const PowerIterationOptions& opts);

// ---------------------------------------------------------------------------
// Spectral factorizations

struct SpectralData {
    Matrix unitary;
    Vector values;
};

/// Orders complex numbers by (Re, Im), largest first.
bool lex_greater(cplx a, cplx b) noexcept;

/// ||x* x - x x*||.
double normality_defect(const Matrix& x);

/// Unitary diagonalization of a normal matrix; eigenvalues sorted by lex_greater.
/// Throws NormalityViolation when ||x*x - xx*|| > residual_rel * ||x||^2.
SpectralData spectral_decomposition_normal(const Matrix& x, const Tolerances& tol = {});

struct TriangularForm {
    Matrix unitary;
    Matrix upper;  ///< exactly zero on and below the diagonal
};

/// Schur form of a nilpotent matrix, built by repeatedly deflating a null
/// vector of the trailing block. Throws NilpotencyViolation when a trailing
/// block has no singular value below residual_rel * ||t||.
TriangularForm schur_strict_triangularize(const Matrix& t, const Tolerances& tol = {});

/// Orthonormal basis (as columns) of right singular vectors whose singular
/// value is <= rank_rel * sigma_max * n. May have zero columns.
Matrix numerical_kernel(const Matrix& x, const Tolerances& tol = {});

/// Range/kernel split of a (possibly rectangular) matrix against an
/// explicit scale: singular values <= rank_rel * scale * max(rows, cols)
/// are discarded. `gap_ratio` is smallest kept / largest discarded singular
/// value (infinity when either side is empty or the discarded part is 0).
struct RankSplit {
    Index rank = 0;
    Matrix range;   ///< orthonormal basis of the column space (rows x rank)
    Matrix kernel;  ///< orthonormal basis of the null space (cols x (cols - rank))
    double gap_ratio = 0.0;
};

RankSplit rank_split(const Matrix& x, const Tolerances& tol, double scale);

/// Orthonormal basis of span(columns) with rank truncation at `scale`.
Matrix orthonormal_span(const Matrix& columns, const Tolerances& tol, double scale,
                        double* gap_ratio = nullptr);

/// Orthonormal basis of span(outer) minus span(inner), where `inner` has
/// orthonormal columns spanning a subspace of span(outer).
Matrix orthogonal_complement_within(const Matrix& outer, const Matrix& inner,
                                    const Tolerances& tol, double* gap_ratio = nullptr);

// ---------------------------------------------------------------------------
// Seeded generators. Deterministic for a fixed (n, seed).

Matrix haar_unitary(Index n, std::uint64_t seed);
/// U diag(lambda) U* with the lambdas mean-subtracted.
Matrix random_normal_traceless(Index n, std::uint64_t seed);
/// U N U* with N strictly upper triangular and a dominant superdiagonal.
Matrix random_nilpotent(Index n, std::uint64_t seed);
/// Strictly upper triangular with complex Gaussian entries.
Matrix random_strict_upper(Index n, std::uint64_t seed);
/// Ginibre matrix with its trace removed.
Matrix random_traceless(Index n, std::uint64_t seed);

/// Mixes a master seed with a stream index (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace commfact
