#pragma once

// Finite tensor truncations of A = sum a_n V_n, B = sum b_n V_n V_n*,
// C = sum c_n V_n on (C^2)^{(x)N}. Leg 1 is the leftmost Kronecker factor,
// i.e. the most significant bit of a basis index.

#include "commfact/matcore.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace commfact::tucci {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

/// Dense and sparse-explicit modes are limited to this many legs.
inline constexpr int kDenseCap = 12;
/// Matrix-free mode is limited to this many legs.
inline constexpr int kMatrixFreeCap = 20;

enum class Mode { Dense, MatrixFree };

const char* to_string(Mode m) noexcept;

/// Action on a single leg. E = [[0,1],[0,0]], Et = E*, P0 = E E*, P1 = E* E.
enum class LegOp : std::uint8_t { Identity, E, Et, P0, P1 };

/// Product x * y on one leg; `zero` is set when the product vanishes.
LegOp multiply(LegOp x, LegOp y, bool& zero) noexcept;
LegOp adjoint(LegOp x) noexcept;
/// Normalized trace of the 2x2 leg matrix.
double leg_trace(LegOp x) noexcept;

struct Term {
    cplx coefficient;
    std::vector<LegOp> legs;  ///< legs[n - 1] acts on leg n
};

/// Sparse vector as (basis index, value) pairs sorted by index.
using SparseVector = std::vector<std::pair<std::uint64_t, cplx>>;

class TensorOperator {
public:
    explicit TensorOperator(int depth);

    int depth() const noexcept { return depth_; }
    Index dim() const noexcept { return Index{1} << depth_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }

    /// Appends coefficient * (legs[0] (x) ... (x) legs[N-1]).
    void add_term(cplx coefficient, std::vector<LegOp> legs);

    /// out = T in, O(2^N) per term.
    void apply(const Vector& in, Vector& out) const;
    Vector apply(const Vector& in) const;
    SparseVector apply(const SparseVector& in) const;

    TensorOperator adjoint() const;
    /// True when every term uses only Identity, P0 and P1.
    bool is_diagonal() const noexcept;
    /// Diagonal of the operator (all terms, not only diagonal ones).
    Vector diagonal() const;
    /// Merges terms with identical legs and drops exact zeros.
    TensorOperator simplified() const;

    /// Explicit sparse matrix assembled from Kronecker products of the legs.
    SparseMatrix to_sparse() const;
    /// Dense matrix; requires depth <= kDenseCap.
    Matrix to_dense() const;

    friend TensorOperator operator+(const TensorOperator& x, const TensorOperator& y);
    friend TensorOperator operator-(const TensorOperator& x, const TensorOperator& y);
    friend TensorOperator operator*(const TensorOperator& x, const TensorOperator& y);
    friend TensorOperator operator*(cplx s, const TensorOperator& x);

private:
    int depth_;
    std::vector<Term> terms_;
};

TensorOperator identity_operator(int depth);
/// E on leg n, identity elsewhere. Requires 1 <= n <= depth.
TensorOperator build_V(int n, int depth);
/// V_n V_n* = P0 on leg n.
TensorOperator build_VVstar(int n, int depth);
/// sum coefficients[n-1] V_n.
TensorOperator build_A(const std::vector<cplx>& coefficients);
/// sum coefficients[n-1] V_n V_n*.
TensorOperator build_B(const std::vector<cplx>& coefficients);
/// Conditional expectation onto the legs in `legs` (1-based): every other
/// leg is replaced by its normalized trace.
TensorOperator conditional_expectation(const TensorOperator& x, const std::set<int>& legs);

struct TucciConfig {
    int depth = 1;
    std::vector<cplx> a, b, c;
    Mode mode = Mode::MatrixFree;

    /// a_n = n^-r, b_n = c_n = n^(-r/2).
    static TucciConfig sqrt_split(double r, int depth, Mode mode = Mode::MatrixFree);
    void validate() const;
};

struct IdentityReport {
    int depth = 0;
    Mode mode = Mode::MatrixFree;
    double residual_op = 0.0;        ///< power-iteration estimate of ||A - [B, C]||
    double residual_op_bound = 0.0;  ///< sqrt(||R||_1 ||R||_inf), an upper bound
    double residual_l2 = 0.0;        ///< exact
    bool converged = true;
    double max_coefficient_mismatch = 0.0;  ///< max |a_n - b_n c_n|
    double sum_abs_a = 0.0;
};

/// Commutator identity residuals for a_n = b_n c_n. Throws
/// CoefficientMismatch unless allow_mismatch is set.
IdentityReport tucci_commutator_identity(const TucciConfig& cfg, bool allow_mismatch = false);

struct LowerBoundCertificate {
    double lower = 0.0;          ///< (1/2) sum |c_k|
    double norm_estimate = 0.0;  ///< power-iteration lower estimate of ||C_N||
    int iterations = 0;
    bool holds = false;  ///< lower <= norm_estimate + slack
};

inline constexpr double kCertificateSlack = 1e-8;

/// Power iteration uses tolerance 1e-6 and at most 1000 iterations, starting
/// from the uniform unit vector. Throws NonConvergence when the budget runs out.
LowerBoundCertificate c_lower_bound_certificate(const std::vector<cplx>& c, int depth,
                                                Mode mode = Mode::MatrixFree);

struct L2Check {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = l2_norm(sum_{n in K} b_n V_n V_n*)^2, rhs = (1/4) sum |b_n|^2 + (1/4) |sum b_n|^2.
L2Check b_l2_formula_check(const std::vector<cplx>& b, const std::set<int>& legs, int depth);

struct ProjectionCheck {
    cplx expected;                ///< (y + sum_{n in F} b_n) / 2
    cplx measured;                ///< E_F(B) on the range of P (first basis vector in range)
    double max_deviation = 0.0;   ///< max |diag(E_F(B) P - expected P)|
    bool off_diagonal_free = true;
};

ProjectionCheck conditional_projection_check(const std::vector<cplx>& b, const std::set<int>& legs,
                                             cplx y, int depth);

struct ScanRow {
    int depth = 0;
    double lower_bound = 0.0;
    double norm_c = 0.0;
    double sum_b = 0.0;
    double norm_b = 0.0;
    double residual = 0.0;  ///< upper bound on ||[B, C] - A||
};

/// Requires 1 < r <= 2 and 1 <= n_min <= n_max <= kMatrixFreeCap.
std::vector<ScanRow> norm_scan(double r, int n_min, int n_max, std::size_t threads = 1);

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

}  // namespace commfact::tucci
