#pragma once

// Reordering zero-sum complex tuples so that every prefix sum stays small.

#include "commfact/matcore.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace commfact {

/// sqrt(5)/2, the Steinitz constant of the Euclidean plane.
inline constexpr double kBanaszczykConstant = 1.1180339887498948482;
inline constexpr double kGrinbergSevastyanovConstant = 2.0;
/// Slack added to both bound classes to absorb rounding.
inline constexpr double kBoundSlack = 1e-12;
inline constexpr std::size_t kExhaustiveCap = 10;

enum class BoundClass { Banaszczyk, GrinbergSevastyanov, Unbounded };

const char* to_string(BoundClass b) noexcept;

/// A bijection on {0, ..., n-1}; position k holds the index of the value placed k-th.
class Permutation {
public:
    Permutation() = default;
    /// Throws InvalidArgument unless `order` is a bijection.
    explicit Permutation(std::vector<std::size_t> order);
    static Permutation identity(std::size_t n);

    std::size_t size() const noexcept { return order_.size(); }
    std::size_t operator[](std::size_t k) const { return order_[k]; }
    const std::vector<std::size_t>& indices() const noexcept { return order_; }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> order_;
};

struct RearrangementCertificate {
    Permutation permutation;
    double prefix_max = 0.0;   ///< max_k |sum_{j<=k} values[perm[j]]|, k = 1..n
    double max_modulus = 0.0;  ///< max_j |values[j]|
    BoundClass bound_class = BoundClass::Unbounded;

    /// Recomputes prefix_max from `values` and compares within `slack`.
    bool consistent_with(std::span<const cplx> values, double slack = 1e-14) const;
};

double prefix_max(std::span<const cplx> values, const Permutation& perm);

BoundClass classify_bound(double prefix_max, double max_modulus) noexcept;

/// True when |sum| <= 1e-12 * n * max_modulus.
bool is_zero_sum(std::span<const cplx> values) noexcept;

/// Mean-subtracted copy of `values`; throws SumNotZero when !is_zero_sum.
std::vector<cplx> enforce_zero_sum(std::span<const cplx> values);

/// Globally optimal order by branch and bound. Throws CapExceeded when
/// values.size() > cap and SumNotZero for a non-zero-sum tuple.
RearrangementCertificate exhaustive_best_order(std::span<const cplx> values,
                                               std::size_t cap = kExhaustiveCap);

struct GreedyOptions {
    std::size_t restarts = 32;
    std::uint64_t seed = 0x57e1a172ULL;
    std::size_t exhaustive_cap = kExhaustiveCap;
};

/// Nearest-prefix greedy with randomized restarts and an exhaustive
/// fallback. Always returns a certificate; bound_class says how good it is.
RearrangementCertificate greedy_order(std::span<const cplx> values, const GreedyOptions& opts = {});

/// Exhaustive search up to the cap, greedy above it.
RearrangementCertificate best_available_order(std::span<const cplx> values);

}  // namespace commfact
