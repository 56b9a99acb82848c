#include "commfact/factorization.hpp"

namespace commfact {

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::NormalShift: return "NormalShift";
        case Method::CyclicUnitary: return "CyclicUnitary";
        case Method::NilpotentRecurrence: return "NilpotentRecurrence";
        case Method::ShodaBaseline: return "ShodaBaseline";
        case Method::Eigenfunction: return "Eigenfunction";
        case Method::TensorLegs: return "TensorLegs";
    }
    return "Unknown";
}

Factorization make_factorization(const Matrix& a, Matrix b, Matrix c, Method method,
                                 std::optional<RearrangementCertificate> certificate) {
    require_square(a, "make_factorization");
    require_same_shape(a, b, "make_factorization");
    require_same_shape(a, c, "make_factorization");
    Factorization f;
    const Matrix r = a - commutator(b, c);
    f.residual_op = operator_norm(r);
    f.residual_l2 = l2_norm(r);
    f.norm_product = operator_norm(b) * operator_norm(c);
    f.b = std::move(b);
    f.c = std::move(c);
    f.method = method;
    f.certificate = std::move(certificate);
    return f;
}

}  // namespace commfact
