#include "commfact/normalfact.hpp"

#include "commfact/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace commfact {

Matrix shift_matrix(Index n) {
    if (n < 1) throw InvalidArgument("shift_matrix: n must be positive");
    Matrix b = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) b(i, i + 1) = 1.0;
    return b;
}

Matrix cyclic_shift_unitary(Index n) {
    Matrix u = shift_matrix(n);
    u(n - 1, 0) = 1.0;
    return u;
}

Matrix partial_sum_diagonal(std::span<const cplx> ordered) {
    if (ordered.empty()) throw InvalidArgument("partial_sum_diagonal: empty sequence");
    enforce_zero_sum(ordered);
    const Index n = static_cast<Index>(ordered.size());
    Matrix d = Matrix::Zero(n, n);
    cplx s = 0.0;
    for (Index k = 0; k + 1 < n; ++k) {
        s += ordered[static_cast<std::size_t>(k)];
        d(k, k) = s;
    }
    return d;
}

namespace {

std::vector<cplx> reorder(std::span<const cplx> values, const Permutation& perm) {
    std::vector<cplx> out(values.size());
    for (std::size_t k = 0; k < perm.size(); ++k) out[k] = values[perm[k]];
    return out;
}

}  // namespace

Factorization factor_normal(const Matrix& a, const Tolerances& tol) {
    tol.validate();
    require_square(a, "factor_normal");
    require_finite(a, "factor_normal");
    const Index n = a.rows();
    const Matrix centered = remove_trace(a, tol);
    if (n == 1) {
        return make_factorization(a, shift_matrix(1), Matrix::Zero(1, 1), Method::NormalShift,
                                  exhaustive_best_order(std::vector<cplx>{0.0}));
    }
    const SpectralData sd = spectral_decomposition_normal(centered, tol);
    std::vector<cplx> lambda(sd.values.data(), sd.values.data() + n);
    RearrangementCertificate cert = best_available_order(lambda);
    const std::vector<cplx> ordered = reorder(lambda, cert.permutation);

    Matrix u(n, n);
    for (Index k = 0; k < n; ++k) u.col(k) = sd.unitary.col(static_cast<Index>(cert.permutation[k]));
    const Matrix bt = shift_matrix(n);
    const Matrix ct = bt.adjoint() * partial_sum_diagonal(ordered);
    return make_factorization(a, u * bt * u.adjoint(), u * ct * u.adjoint(), Method::NormalShift,
                              std::move(cert));
}

CyclicRealization factor_diagonal_cyclic(std::span<const cplx> values) {
    if (values.empty()) throw InvalidArgument("factor_diagonal_cyclic: empty sequence");
    RearrangementCertificate cert = best_available_order(values);
    CyclicRealization out;
    out.ordered = reorder(values, cert.permutation);
    const Index n = static_cast<Index>(values.size());
    const Matrix d = partial_sum_diagonal(out.ordered);
    out.potential.resize(values.size());
    for (Index k = 0; k < n; ++k) out.potential[static_cast<std::size_t>(k)] = d(k, k);
    Matrix target = Matrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) target(k, k) = out.ordered[static_cast<std::size_t>(k)];
    const Matrix u = cyclic_shift_unitary(n);
    out.factorization =
        make_factorization(target, u, u.adjoint() * d, Method::CyclicUnitary, std::move(cert));
    return out;
}

DiscreteMeasure::DiscreteMeasure(std::vector<cplx> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty() || atoms_.size() != weights_.size())
        throw InvalidArgument("DiscreteMeasure: need one positive weight per atom");
    double total = 0.0;
    mean_ = 0.0;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
        if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
            throw InvalidArgument("DiscreteMeasure: weights must be positive");
        if (!std::isfinite(atoms_[j].real()) || !std::isfinite(atoms_[j].imag()))
            throw NonFinite("DiscreteMeasure: atom is not finite");
        for (std::size_t i = 0; i < j; ++i)
            if (atoms_[i] == atoms_[j]) throw InvalidArgument("DiscreteMeasure: atoms must be distinct");
        total += weights_[j];
        mean_ += weights_[j] * atoms_[j];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "DiscreteMeasure: weights sum to " << total << ", not 1";
        throw InvalidArgument(os.str());
    }
}

double DiscreteMeasure::max_modulus() const noexcept {
    double m = 0.0;
    for (cplx a : atoms_) m = std::max(m, std::abs(a));
    return m;
}

MeasureSample approximate_measure(const DiscreteMeasure& mu, std::size_t n) {
    if (std::abs(mu.mean()) > 1e-12) {
        std::ostringstream os;
        os << "approximate_measure: measure has mean " << mu.mean() << ", not 0";
        throw InvalidArgument(os.str());
    }
    const std::size_t m = mu.size();
    if (n < m) {
        std::ostringstream os;
        os << "approximate_measure: n = " << n << " is smaller than the " << m << " atoms";
        throw InvalidArgument(os.str());
    }
    MeasureSample out;
    out.counts.resize(m);
    std::vector<double> remainder(m);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double exact = static_cast<double>(n) * mu.weights()[j];
        out.counts[j] = static_cast<std::size_t>(std::floor(exact));
        remainder[j] = exact - static_cast<double>(out.counts[j]);
        assigned += out.counts[j];
    }
    std::vector<std::size_t> rank(m);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++out.counts[rank[k % m]];
    while (assigned > n) {
        for (std::size_t k = m; k-- > 0 && assigned > n;) {
            if (out.counts[rank[k]] > 0) {
                --out.counts[rank[k]];
                --assigned;
            }
        }
    }

    out.values.reserve(n);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t c = 0; c < out.counts[j]; ++c) {
            out.values.push_back(mu.atoms()[j]);
            sum += mu.atoms()[j];
        }
    out.correction = sum / static_cast<double>(n);
    cplx head = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        out.values[k] -= out.correction;
        head += out.values[k];
    }
    out.values[n - 1] = -head;
    return out;
}

Matrix centered_projection(Index n, Index k) {
    if (n < 2 || k < 1 || k >= n) {
        std::ostringstream os;
        os << "centered_projection: need 1 <= k < n, got n = " << n << ", k = " << k;
        throw InvalidArgument(os.str());
    }
    const double t = static_cast<double>(k) / static_cast<double>(n);
    Matrix p = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) p(i, i) = (i < k ? 1.0 : 0.0) - t;
    return p;
}

}  // namespace commfact
