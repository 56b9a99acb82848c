#pragma once

// Finite cyclic crossed products: functions on Z/N act as diagonal
// matrices and the dynamics j -> j + step is implemented by a unitary U
// with U pi(f) U* = pi(f o alpha).

#include "commfact/factorization.hpp"
#include "commfact/matcore.hpp"

#include <map>
#include <set>
#include <vector>

namespace commfact::ergodic {

using Function = std::vector<cplx>;

/// exp(2 pi i k / n), exact at multiples of a quarter turn.
cplx root_of_unity(long long k, long long n);

class CyclicSystem {
public:
    /// Requires points >= 1. The step is reduced mod points.
    CyclicSystem(Index points, long long step);

    Index points() const noexcept { return points_; }
    long long step() const noexcept { return step_; }

    /// U^k with (U^k)(j, j + k step) = 1; negative k gives powers of U*.
    Matrix unitary_power(long long k) const;
    Matrix unitary() const { return unitary_power(1); }
    /// pi(f) = diag(f).
    Matrix embed(const Function& f) const;
    /// (f o alpha^k)(j) = f(j + k step).
    Function compose(const Function& f, long long k = 1) const;

private:
    Index points_;
    long long step_;
};

struct Eigenfunction {
    long long m = 0;
    Function h;
    cplx zeta;
    bool usable = false;  ///< zeta != 1
};

/// h(j) = exp(2 pi i m j / N), zeta = exp(2 pi i m step / N). Throws
/// InvalidArgument when m = 0 mod N.
Eigenfunction eigenfunction(long long m, const CyclicSystem& sys);

/// U pi(f) = [U pi(g), pi(h)] with g = f / (h (1 - zeta^-1)). Throws
/// EigenvalueDegenerate when zeta = 1.
Factorization single_term_factor(const Function& f, long long m, const CyclicSystem& sys);

/// Smallest m in 1..N-1 with zeta^k != 1 for every k in terms. Throws
/// NoAdmissibleEigenvalue when there is none.
long long admissible_eigenvalue(const std::set<long long>& terms, const CyclicSystem& sys);

/// sum_k U^k pi(f_k) = [sum_k U^k pi(g_k), pi(h)] with g_k = f_k / (h (1 - zeta^-k)).
Factorization multi_term_factor(const std::map<long long, Function>& fs, const CyclicSystem& sys);

/// sum_k U^k pi(f_k).
Matrix crossed_sum(const std::map<long long, Function>& fs, const CyclicSystem& sys);

}  // namespace commfact::ergodic
