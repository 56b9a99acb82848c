#include "commfact/shoda.hpp"

#include "commfact/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace commfact {

namespace {

double max_diagonal(const Matrix& m) {
    return m.diagonal().cwiseAbs().maxCoeff();
}

// Rotates m in the (i, j) plane so that the new m(i, i) equals `target`,
// a point on the segment from m(i, i) to m(j, j). Accumulates into w.
void rotate_to(Matrix& m, Matrix& w, Index i, Index j, cplx target) {
    const cplx alpha = m(i, i);
    const cplx delta = m(j, j);
    const double len = std::abs(delta - alpha);
    if (len == 0.0) return;
    const cplx u = (delta - alpha) / len;
    const cplx p = std::conj(u) * m(i, j);
    const cplx q = std::conj(u) * m(j, i);
    const double phi = std::atan2(-(p.imag() + q.imag()), p.real() - q.real());
    const cplx e = std::polar(1.0, phi);
    const double kappa = (std::conj(u) * (e * m(i, j) + std::conj(e) * m(j, i))).real();
    const double radius = 0.5 * std::hypot(len, kappa);
    const double psi = std::atan2(kappa, len);
    const double along = std::clamp((std::conj(u) * (target - alpha)).real(), 0.0, len);
    const double v = std::clamp((0.5 * len - along) / radius, -1.0, 1.0);
    const double theta = 0.5 * (std::acos(v) - psi);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);

    Eigen::Matrix2cd g;
    g << cs, -sn, e * sn, e * cs;
    for (Index r = 0; r < m.rows(); ++r) {
        const cplx x = m(r, i);
        const cplx y = m(r, j);
        m(r, i) = x * g(0, 0) + y * g(1, 0);
        m(r, j) = x * g(0, 1) + y * g(1, 1);
    }
    for (Index col = 0; col < m.cols(); ++col) {
        const cplx x = m(i, col);
        const cplx y = m(j, col);
        m(i, col) = std::conj(g(0, 0)) * x + std::conj(g(1, 0)) * y;
        m(j, col) = std::conj(g(0, 1)) * x + std::conj(g(1, 1)) * y;
    }
    for (Index r = 0; r < w.rows(); ++r) {
        const cplx x = w(r, i);
        const cplx y = w(r, j);
        w(r, i) = x * g(0, 0) + y * g(1, 0);
        w(r, j) = x * g(0, 1) + y * g(1, 1);
    }
}

}  // namespace

Matrix zero_diagonal_unitary(const Matrix& a, const Tolerances& tol, int max_sweeps) {
    tol.validate();
    require_square(a, "zero_diagonal_unitary");
    require_finite(a, "zero_diagonal_unitary");
    if (max_sweeps < 1) throw InvalidArgument("zero_diagonal_unitary: max_sweeps must be positive");
    const Index n = a.rows();
    const double norm_a = operator_norm(a, tol);
    const double goal = tol.residual_rel * norm_a;
    const Matrix centered = remove_trace(a, tol);
    Matrix m = centered;
    Matrix w = Matrix::Identity(n, n);

    double best = max_diagonal(a);
    if (best <= goal) return w;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Index k = 0; k + 1 < n; ++k)
            for (Index j = k + 1; j < n; ++j) {
                const double weight = static_cast<double>(j - k);
                rotate_to(m, w, k, j, (weight * m(k, k) + m(j, j)) / (weight + 1.0));
            }
        const double achieved = max_diagonal(w.adjoint() * a * w);
        best = std::min(best, achieved);
        if (achieved <= goal) return w;
        m = w.adjoint() * centered * w;
    }
    std::ostringstream os;
    os << "zero_diagonal_unitary: diagonal modulus " << best << " after " << max_sweeps
       << " sweeps exceeds " << goal;
    throw NonConvergence(best, os.str());
}

Factorization factor_traceless(const Matrix& a, const Tolerances& tol) {
    const Matrix w = zero_diagonal_unitary(a, tol);
    const Index n = a.rows();
    const Matrix centered = remove_trace(a, tol);
    const Matrix z = w.adjoint() * centered * w;
    Matrix bt = Matrix::Zero(n, n);
    Matrix ct = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        bt(i, i) = static_cast<double>(i);
        for (Index j = 0; j < n; ++j)
            if (i != j) ct(i, j) = z(i, j) / static_cast<double>(i - j);
    }
    return make_factorization(a, w * bt * w.adjoint(), w * ct * w.adjoint(), Method::ShodaBaseline);
}

}  // namespace commfact
