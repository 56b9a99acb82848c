#pragma once

#include "commfact/matcore.hpp"
#include "commfact/steinitz.hpp"

#include <optional>

namespace commfact {

enum class Method {
    NormalShift,
    CyclicUnitary,
    NilpotentRecurrence,
    ShodaBaseline,
    Eigenfunction,
    TensorLegs,
};

const char* to_string(Method m) noexcept;

/// A = [b, c] up to the reported residuals.
struct Factorization {
    Matrix b;
    Matrix c;
    double residual_op = 0.0;  ///< ||A - [b, c]||
    double residual_l2 = 0.0;
    double norm_product = 0.0;  ///< ||b|| * ||c||
    Method method = Method::NormalShift;
    std::optional<RearrangementCertificate> certificate;
};

/// Fills the residual and norm fields from (a, b, c).
Factorization make_factorization(const Matrix& a, Matrix b, Matrix c, Method method,
                                 std::optional<RearrangementCertificate> certificate = std::nullopt);

}  // namespace commfact
