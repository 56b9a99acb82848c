#pragma once

// Baseline factorizer for arbitrary traceless matrices.

#include "commfact/factorization.hpp"

namespace commfact {

/// Unitary W such that every diagonal entry of W* a W has modulus at most
/// residual_rel * ||a||. Built from 2x2 plane rotations. Throws
/// TraceNotZero, or NonConvergence after `max_sweeps` passes.
Matrix zero_diagonal_unitary(const Matrix& a, const Tolerances& tol = {}, int max_sweeps = 100);

/// b = W diag(0, ..., n-1) W*, c = W c~ W* with c~_ij = z_ij / (i - j) for z = W* a W.
Factorization factor_traceless(const Matrix& a, const Tolerances& tol = {});

}  // namespace commfact
