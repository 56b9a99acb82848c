#pragma once

// Single-commutator factorizations of traceless normal matrices and of
// finite atomic spectral distributions.

#include "commfact/factorization.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace commfact {

/// Ones on the superdiagonal, zero elsewhere.
Matrix shift_matrix(Index n);

/// Wraparound shift: U e_k = e_{k-1}, U e_0 = e_{n-1}.
Matrix cyclic_shift_unitary(Index n);

/// diag(s_1, ..., s_{n-1}, 0) with s_k the k-th prefix sum. The last entry is
/// set to 0, not computed. Throws SumNotZero unless is_zero_sum(ordered).
Matrix partial_sum_diagonal(std::span<const cplx> ordered);

/// A = [B, C] with B a unitary conjugate of the shift and ||C|| bounded by
/// the prefix maximum of the rearranged spectrum.
Factorization factor_normal(const Matrix& a, const Tolerances& tol = {});

struct CyclicRealization {
    Factorization factorization;
    std::vector<cplx> ordered;  ///< values in the order placed on the diagonal of [b, c]
    std::vector<cplx> potential;  ///< diagonal of D, the function f with [b, c] = f - f o alpha
};

/// b = cyclic_shift_unitary(n), c = b* D, so that [b, c] is diagonal with
/// the given values in the rearranged order.
CyclicRealization factor_diagonal_cyclic(std::span<const cplx> values);

class DiscreteMeasure {
public:
    /// Throws InvalidArgument unless weights are positive, sum to 1 within
    /// 1e-12, and atoms are distinct.
    DiscreteMeasure(std::vector<cplx> atoms, std::vector<double> weights);

    const std::vector<cplx>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    cplx mean() const noexcept { return mean_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    double max_modulus() const noexcept;

private:
    std::vector<cplx> atoms_;
    std::vector<double> weights_;
    cplx mean_;
};

struct MeasureSample {
    std::vector<cplx> values;       ///< length n, sums to 0
    std::vector<std::size_t> counts;  ///< copies of each atom
    cplx correction = 0.0;          ///< subtracted from every value to force a zero sum
};

/// Largest-remainder rounding of n * weights, then mean subtraction.
/// Ties among remainders go to the lowest atom index.
MeasureSample approximate_measure(const DiscreteMeasure& mu, std::size_t n);

/// p - tau(p) 1 for the rank-k diagonal projection p in dimension n.
Matrix centered_projection(Index n, Index k);

}  // namespace commfact
