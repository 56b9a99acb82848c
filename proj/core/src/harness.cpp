#include "commfact/harness.hpp"

#include "commfact/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace commfact {

namespace {

using json = nlohmann::ordered_json;

json real(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

double real_of(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

BoundClass bound_class_of(const std::string& s) {
    for (BoundClass b : {BoundClass::Banaszczyk, BoundClass::GrinbergSevastyanov, BoundClass::Unbounded})
        if (s == to_string(b)) return b;
    throw ParseError(1, 1, "unknown bound class '" + s + "'");
}

Method method_of(const std::string& s) {
    for (Method m : {Method::NormalShift, Method::CyclicUnitary, Method::NilpotentRecurrence,
                     Method::ShodaBaseline, Method::Eigenfunction, Method::TensorLegs})
        if (s == to_string(m)) return m;
    throw ParseError(1, 1, "unknown method '" + s + "'");
}

}  // namespace

VerificationReport verify(const Matrix& a, const Factorization& f, const Tolerances& tol) {
    tol.validate();
    require_square(a, "verify");
    require_same_shape(a, f.b, "verify");
    require_same_shape(a, f.c, "verify");
    VerificationReport r;
    r.n = a.rows();
    r.method = f.method;
    r.threshold = tol.residual_rel;
    if (f.certificate)
        r.certificate = CertificateSummary{f.certificate->prefix_max, f.certificate->max_modulus,
                                           f.certificate->bound_class};
    if (a.rows() == 0) {
        r.pass = true;
        return r;
    }
    const Matrix comm = commutator(f.b, f.c);
    const Matrix diff = a - comm;
    r.input_norm = operator_norm(a, tol);
    r.residual_op = operator_norm(diff, tol);
    r.residual_l2 = l2_norm(diff);
    r.residual_rel = r.input_norm > 0.0 ? r.residual_op / r.input_norm : r.residual_op;
    r.norm_b = operator_norm(f.b, tol);
    r.norm_c = operator_norm(f.c, tol);
    r.norm_product = r.norm_b * r.norm_c;
    r.trace_of_input = normalized_trace(a);
    r.commutator_trace = std::abs(normalized_trace(comm));
    r.pass = r.residual_rel <= tol.residual_rel &&
             std::abs(r.trace_of_input) <= tol.residual_rel * r.input_norm;
    return r;
}

std::string to_json_line(const VerificationReport& r) {
    json j;
    j["label"] = r.label;
    j["n"] = r.n;
    j["input_norm"] = real(r.input_norm);
    j["residual_op"] = real(r.residual_op);
    j["residual_l2"] = real(r.residual_l2);
    j["residual_rel"] = real(r.residual_rel);
    j["norm_b"] = real(r.norm_b);
    j["norm_c"] = real(r.norm_c);
    j["norm_product"] = real(r.norm_product);
    j["trace_of_input"] = json::array({real(r.trace_of_input.real()), real(r.trace_of_input.imag())});
    j["commutator_trace"] = real(r.commutator_trace);
    j["method"] = to_string(r.method);
    if (r.certificate) {
        j["certificate"] = {{"prefix_max", real(r.certificate->prefix_max)},
                            {"max_modulus", real(r.certificate->max_modulus)},
                            {"bound_class", to_string(r.certificate->bound_class)}};
    } else {
        j["certificate"] = nullptr;
    }
    j["threshold"] = real(r.threshold);
    j["pass"] = r.pass;
    j["error"] = r.error;
    return j.dump();
}

VerificationReport report_from_json(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.byte, std::string("report: ") + e.what());
    }
    try {
        VerificationReport r;
        r.label = j.at("label").get<std::string>();
        r.n = j.at("n").get<Index>();
        r.input_norm = real_of(j.at("input_norm"));
        r.residual_op = real_of(j.at("residual_op"));
        r.residual_l2 = real_of(j.at("residual_l2"));
        r.residual_rel = real_of(j.at("residual_rel"));
        r.norm_b = real_of(j.at("norm_b"));
        r.norm_c = real_of(j.at("norm_c"));
        r.norm_product = real_of(j.at("norm_product"));
        const json& t = j.at("trace_of_input");
        r.trace_of_input = cplx(real_of(t.at(0)), real_of(t.at(1)));
        r.commutator_trace = real_of(j.at("commutator_trace"));
        r.method = method_of(j.at("method").get<std::string>());
        const json& c = j.at("certificate");
        if (!c.is_null())
            r.certificate = CertificateSummary{real_of(c.at("prefix_max")), real_of(c.at("max_modulus")),
                                               bound_class_of(c.at("bound_class").get<std::string>())};
        r.threshold = real_of(j.at("threshold"));
        r.pass = j.at("pass").get<bool>();
        r.error = j.at("error").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(1, 1, std::string("report: ") + e.what());
    }
}

}  // namespace commfact
