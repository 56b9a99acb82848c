#include "commfact/nilfact.hpp"

#include "commfact/errors.hpp"
#include "commfact/normalfact.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace commfact {

std::vector<Index> KernelChain::dims() const {
    std::vector<Index> d;
    d.reserve(layers.size());
    for (const Matrix& l : layers) d.push_back(l.cols());
    return d;
}

namespace {

cplx dominant_eigenvalue_of_compression(const Matrix& t, const Matrix& basis) {
    if (basis.cols() == 0) return 0.0;
    const Matrix block = basis.adjoint() * t * basis;
    Eigen::ComplexEigenSolver<Matrix> es(block, false);
    const auto& ev = es.eigenvalues();
    Index best = 0;
    for (Index i = 1; i < ev.size(); ++i)
        if (std::abs(ev(i)) > std::abs(ev(best))) best = i;
    return ev(best);
}

void note_gap(double* min_gap, double gap) {
    if (min_gap) *min_gap = std::min(*min_gap, gap);
}

[[noreturn]] void degenerate(double gap, const std::string& what) {
    std::ostringstream os;
    os << what << " (singular-value gap ratio " << gap << ")";
    throw RankDegeneracy(gap, os.str());
}

// ker T^j grown one layer at a time as ker((1 - K K*) T) with K = ker T^{j-1},
// every rank decision taken against the same fixed scale.
KernelChain chain_impl(const Matrix& t, const Tolerances& tol, double scale, double* min_gap) {
    const Index n = t.rows();
    KernelChain out;
    if (scale == 0.0 || t.norm() == 0.0) {
        out.layers.push_back(Matrix::Identity(n, n));
        return out;
    }
    Matrix k(n, 0);
    while (k.cols() < n) {
        Matrix m = t;
        if (k.cols() > 0) m -= k * (k.adjoint() * t);
        const RankSplit split = rank_split(m, tol, scale);
        const Index grow = split.kernel.cols() - k.cols();
        if (grow <= 0) {
            const Matrix rest = orthogonal_complement_within(Matrix::Identity(n, n), k, tol);
            const cplx ev = dominant_eigenvalue_of_compression(t, rest);
            std::ostringstream os;
            os << "matrix is not nilpotent: ker T^" << out.layers.size() + 1
               << " does not grow past dimension " << k.cols() << " (eigenvalue " << ev << ")";
            throw NilpotencyViolation(ev, os.str());
        }
        note_gap(min_gap, split.gap_ratio);
        double gap = 0.0;
        Matrix layer = orthogonal_complement_within(split.kernel, k, tol, &gap);
        note_gap(min_gap, gap);
        if (layer.cols() != grow) degenerate(gap, "kernel layer lost rank against the previous kernel");
        Matrix next(n, k.cols() + grow);
        next << k, layer;
        k = std::move(next);
        out.layers.push_back(std::move(layer));
    }
    return out;
}

}  // namespace

KernelChain kernel_chain(const Matrix& t, const Tolerances& tol) {
    tol.validate();
    require_square(t, "kernel_chain");
    require_finite(t, "kernel_chain");
    return chain_impl(t, tol, operator_norm(t, tol), nullptr);
}

Index nilpotency_index(const Matrix& t, const Tolerances& tol) {
    return kernel_chain(t, tol).index();
}

FlagDecomposition flag_decomposition(const Matrix& t, const Tolerances& tol) {
    tol.validate();
    require_square(t, "flag_decomposition");
    require_finite(t, "flag_decomposition");
    const Index n = t.rows();
    const double scale = operator_norm(t, tol);

    FlagDecomposition out;
    out.min_gap_ratio = std::numeric_limits<double>::infinity();
    double* min_gap = &out.min_gap_ratio;

    Matrix s = Matrix::Identity(n, n);
    while (s.cols() > 0) {
        const Index dim_s = s.cols();
        const Matrix tc = s.adjoint() * t * s;
        const KernelChain chain = chain_impl(tc, tol, scale, min_gap);
        const Index len = chain.index();
        const Index d = chain.layers.back().cols();
        if (!out.block_sizes.empty() && len >= out.block_sizes.back())
            degenerate(*min_gap, "flag block lengths are not strictly decreasing");

        std::vector<Matrix> q(static_cast<std::size_t>(len));
        q.back() = chain.layers.back();
        for (Index k = len - 2; k >= 0; --k) {
            double gap = 0.0;
            q[static_cast<std::size_t>(k)] =
                orthonormal_span(tc * q[static_cast<std::size_t>(k + 1)], tol, scale, &gap);
            note_gap(min_gap, gap);
            if (q[static_cast<std::size_t>(k)].cols() != d)
                degenerate(gap, "range of T on the flag lost rank");
        }

        FlagBlock block;
        block.length = len;
        block.dim = d;
        Matrix joined(dim_s, 0);
        for (Index k = 0; k < len; ++k) {
            const Matrix& qk = q[static_cast<std::size_t>(k)];
            Matrix cat(dim_s, joined.cols() + d);
            cat << joined, qk;
            double gap = 0.0;
            const Matrix join = orthonormal_span(cat, tol, 1.0, &gap);
            note_gap(min_gap, gap);
            if (join.cols() != (k + 1) * d) degenerate(gap, "join of flag subspaces lost rank");
            Matrix piece = orthogonal_complement_within(join, joined, tol, &gap);
            note_gap(min_gap, gap);
            if (piece.cols() != d) degenerate(gap, "flag difference has the wrong dimension");
            Matrix grown(dim_s, joined.cols() + d);
            grown << joined, piece;
            joined = std::move(grown);
            block.pieces.push_back(s * piece);
            block.q.push_back(s * qk);
            block.chain.push_back(s * chain.layers[static_cast<std::size_t>(k)]);
        }

        double gap = 0.0;
        const Matrix rest = orthogonal_complement_within(Matrix::Identity(dim_s, dim_s), joined, tol, &gap);
        note_gap(min_gap, gap);
        if (rest.cols() != dim_s - len * d) degenerate(gap, "complement of the flag has the wrong dimension");
        s = s * rest;

        out.block_sizes.push_back(len);
        out.subspace_dims.push_back(d);
        out.blocks.push_back(std::move(block));
    }

    if (out.min_gap_ratio < 10.0)
        degenerate(out.min_gap_ratio, "ambiguous numerical rank in the flag construction");

    out.basis = Matrix(n, n);
    Index col = 0;
    for (const FlagBlock& b : out.blocks)
        for (const Matrix& p : b.pieces) {
            out.basis.middleCols(col, p.cols()) = p;
            col += p.cols();
        }

    const Matrix upper = out.basis.adjoint() * t * out.basis;
    double worst = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) worst = std::max(worst, std::abs(upper(i, j)));
    if (worst > tol.residual_rel * scale) {
        std::ostringstream os;
        os << "flag basis leaves an entry of size " << worst << " on or below the diagonal";
        throw RankDegeneracy(out.min_gap_ratio, os.str());
    }
    return out;
}

Factorization strict_triangular_factor(const Matrix& a) {
    require_square(a, "strict_triangular_factor");
    require_finite(a, "strict_triangular_factor");
    const Index n = a.rows();
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i)
            if (a(i, j) != cplx(0.0)) {
                std::ostringstream os;
                os << "strict_triangular_factor: entry (" << i << ", " << j
                   << ") on or below the diagonal is nonzero";
                throw ShapeError(os.str());
            }
    Matrix c = Matrix::Zero(n, n);
    for (Index j = 1; j < n; ++j) c(1, j) = a(0, j);
    for (Index p = 1; p + 1 < n; ++p)
        for (Index j = p + 1; j < n; ++j) c(p + 1, j) = a(p, j) + c(p, j - 1);
    return make_factorization(a, shift_matrix(n), std::move(c), Method::NilpotentRecurrence);
}

Factorization factor_nilpotent(const Matrix& t, const Tolerances& tol, NilpotentPath path) {
    tol.validate();
    require_square(t, "factor_nilpotent");
    require_finite(t, "factor_nilpotent");
    const Index n = t.rows();

    Matrix u;
    Matrix upper;
    if (path == NilpotentPath::Schur) {
        TriangularForm tf = schur_strict_triangularize(t, tol);
        u = std::move(tf.unitary);
        upper = std::move(tf.upper);
    } else {
        u = flag_decomposition(t, tol).basis;
        upper = (u.adjoint() * t * u).triangularView<Eigen::StrictlyUpper>();
    }
    Matrix c = Matrix::Zero(n, n);
    if (n > 1) c = strict_triangular_factor(upper).c;
    const Matrix b = shift_matrix(n);
    return make_factorization(t, u * b * u.adjoint(), u * c * u.adjoint(), Method::NilpotentRecurrence);
}

}  // namespace commfact
