#pragma once

// Single-commutator factorizations of nilpotent matrices.

#include "commfact/factorization.hpp"

#include <vector>

namespace commfact {

/// Orthonormal bases of p_1 = ker T and p_j = ker T^j minus ker T^{j-1}.
struct KernelChain {
    std::vector<Matrix> layers;

    std::vector<Index> dims() const;
    /// Nilpotency index: the number of layers.
    Index index() const noexcept { return static_cast<Index>(layers.size()); }
};

/// Throws NilpotencyViolation when the kernels stop growing before they
/// fill the space.
KernelChain kernel_chain(const Matrix& t, const Tolerances& tol = {});

/// Nilpotency index of t (0 for the empty case is impossible; 1 for t = 0).
Index nilpotency_index(const Matrix& t, const Tolerances& tol = {});

/// One inductive round: a nilpotent of index `length` restricted to the
/// pieces f_1, ..., f_length, each of dimension `dim`.
struct FlagBlock {
    Index length = 0;
    Index dim = 0;
    std::vector<Matrix> pieces;  ///< f_1, ..., f_length as orthonormal columns in the full space
    std::vector<Matrix> q;       ///< q_1, ..., q_length (range projections of T^j q_length)
    std::vector<Matrix> chain;   ///< kernel-chain layers p_1, ..., p_length of the compression
};

struct FlagDecomposition {
    std::vector<Index> block_sizes;    ///< k_1 > k_2 > ... > k_m
    std::vector<Index> subspace_dims;  ///< dim f^(j)_i, one per block
    Matrix basis;                      ///< unitary; columns grouped block by block, piece by piece
    std::vector<FlagBlock> blocks;
    double min_gap_ratio = 0.0;        ///< worst singular-value gap met in any rank decision
};

/// Kernel-chain flag construction. In `basis`, t is strictly upper
/// triangular; each diagonal block is k_j x k_j block strictly upper
/// triangular. Throws RankDegeneracy when a rank gap falls below 10.
FlagDecomposition flag_decomposition(const Matrix& t, const Tolerances& tol = {});

/// b = shift_matrix(n) and c from the column recurrence, for an exactly
/// strictly upper triangular a. Throws ShapeError otherwise.
Factorization strict_triangular_factor(const Matrix& a);

enum class NilpotentPath { Schur, Flag };

Factorization factor_nilpotent(const Matrix& t, const Tolerances& tol = {},
                               NilpotentPath path = NilpotentPath::Schur);

}  // namespace commfact
