#pragma once

#include "commfact/factorization.hpp"
#include "commfact/matcore.hpp"
#include "commfact/steinitz.hpp"

#include <optional>
#include <string>

namespace commfact {

/// Threshold for factorizations built by an exact recurrence or an
/// explicit formula; numerical decompositions use Tolerances::residual_rel.
inline constexpr double kExactPathThreshold = 1e-12;

struct CertificateSummary {
    double prefix_max = 0.0;
    double max_modulus = 0.0;
    BoundClass bound_class = BoundClass::Banaszczyk;
};

struct VerificationReport {
    std::string label;
    Index n = 0;
    double input_norm = 0.0;
    double residual_op = 0.0;
    double residual_l2 = 0.0;
    double residual_rel = 0.0;  ///< residual_op / input_norm (residual_op when input_norm = 0)
    double norm_b = 0.0;
    double norm_c = 0.0;
    double norm_product = 0.0;
    cplx trace_of_input;
    double commutator_trace = 0.0;  ///< |tau([b, c])|
    Method method = Method::NormalShift;
    std::optional<CertificateSummary> certificate;
    double threshold = 0.0;
    bool pass = false;
    std::string error;  ///< set when the factorizer threw instead of returning
};

/// Recomputes every field from (a, f.b, f.c); the stored residuals in `f`
/// are never read. pass iff residual_rel <= tol.residual_rel and
/// |tau(a)| <= tol.residual_rel * ||a||.
VerificationReport verify(const Matrix& a, const Factorization& f, const Tolerances& tol = {});

/// One JSON object on one line, fields in declaration order.
std::string to_json_line(const VerificationReport& r);
VerificationReport report_from_json(const std::string& line);

}  // namespace commfact
