#include "commfact/ergodic.hpp"

#include "commfact/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace commfact::ergodic {

namespace {

long long mod(long long a, long long n) {
    const long long r = a % n;
    return r < 0 ? r + n : r;
}

void require_length(const Function& f, const CyclicSystem& sys, const char* what) {
    if (static_cast<Index>(f.size()) != sys.points()) {
        std::ostringstream os;
        os << what << ": function has " << f.size() << " values, system has " << sys.points()
           << " points";
        throw DimensionMismatch(os.str());
    }
    for (const cplx& x : f)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw NonFinite(std::string(what) + ": function value is not finite");
}

}  // namespace

cplx root_of_unity(long long k, long long n) {
    if (n < 1) throw InvalidArgument("root_of_unity: order must be positive");
    const long long r = mod(k, n);
    if ((4 * r) % n == 0) {
        switch ((4 * r) / n) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

CyclicSystem::CyclicSystem(Index points, long long step) : points_(points), step_(0) {
    if (points < 1) throw InvalidArgument("CyclicSystem: need at least one point");
    step_ = mod(step, points);
}

Matrix CyclicSystem::unitary_power(long long k) const {
    const long long shift = mod(k * step_, points_);
    Matrix u = Matrix::Zero(points_, points_);
    for (Index j = 0; j < points_; ++j) u(j, static_cast<Index>(mod(j + shift, points_))) = 1.0;
    return u;
}

Matrix CyclicSystem::embed(const Function& f) const {
    require_length(f, *this, "CyclicSystem::embed");
    Matrix d = Matrix::Zero(points_, points_);
    for (Index j = 0; j < points_; ++j) d(j, j) = f[static_cast<std::size_t>(j)];
    return d;
}

Function CyclicSystem::compose(const Function& f, long long k) const {
    require_length(f, *this, "CyclicSystem::compose");
    const long long shift = mod(k * step_, points_);
    Function out(f.size());
    for (Index j = 0; j < points_; ++j)
        out[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(mod(j + shift, points_))];
    return out;
}

Eigenfunction eigenfunction(long long m, const CyclicSystem& sys) {
    const long long n = sys.points();
    if (mod(m, n) == 0) {
        std::ostringstream os;
        os << "eigenfunction: m = " << m << " is 0 mod " << n;
        throw InvalidArgument(os.str());
    }
    Eigenfunction ef;
    ef.m = m;
    ef.h.resize(static_cast<std::size_t>(n));
    for (long long j = 0; j < n; ++j) ef.h[static_cast<std::size_t>(j)] = root_of_unity(mod(m * j, n), n);
    const long long z = mod(m * sys.step(), n);
    ef.zeta = root_of_unity(z, n);
    ef.usable = z != 0;
    return ef;
}

Factorization single_term_factor(const Function& f, long long m, const CyclicSystem& sys) {
    require_length(f, sys, "single_term_factor");
    const Eigenfunction ef = eigenfunction(m, sys);
    if (!ef.usable) {
        std::ostringstream os;
        os << "single_term_factor: zeta = 1 for m = " << m << ", step = " << sys.step();
        throw EigenvalueDegenerate(os.str());
    }
    const long long n = sys.points();
    const cplx denom = 1.0 - root_of_unity(-m * sys.step(), n);
    Function g(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) g[j] = f[j] / (ef.h[j] * denom);
    const Matrix u = sys.unitary();
    return make_factorization(u * sys.embed(f), u * sys.embed(g), sys.embed(ef.h), Method::Eigenfunction);
}

long long admissible_eigenvalue(const std::set<long long>& terms, const CyclicSystem& sys) {
    const long long n = sys.points();
    for (long long k : terms)
        if (k == 0) throw InvalidArgument("admissible_eigenvalue: term 0 is not allowed");
    for (long long m = 1; m < n; ++m) {
        bool ok = true;
        for (long long k : terms)
            if (mod(m * mod(k * sys.step(), n), n) == 0) {
                ok = false;
                break;
            }
        if (ok) return m;
    }
    std::ostringstream os;
    os << "admissible_eigenvalue: every eigenvalue of the " << n << "-point system has zeta^k = 1 for some k in {";
    bool first = true;
    for (long long k : terms) {
        os << (first ? "" : ", ") << k;
        first = false;
    }
    os << "}";
    throw NoAdmissibleEigenvalue(os.str());
}

Matrix crossed_sum(const std::map<long long, Function>& fs, const CyclicSystem& sys) {
    Matrix out = Matrix::Zero(sys.points(), sys.points());
    for (const auto& [k, f] : fs) out += sys.unitary_power(k) * sys.embed(f);
    return out;
}

Factorization multi_term_factor(const std::map<long long, Function>& fs, const CyclicSystem& sys) {
    if (fs.empty()) throw InvalidArgument("multi_term_factor: no terms");
    std::set<long long> terms;
    for (const auto& [k, f] : fs) {
        require_length(f, sys, "multi_term_factor");
        terms.insert(k);
    }
    const long long m = admissible_eigenvalue(terms, sys);
    const Eigenfunction ef = eigenfunction(m, sys);
    const long long n = sys.points();
    Matrix b = Matrix::Zero(n, n);
    for (const auto& [k, f] : fs) {
        const cplx denom = 1.0 - root_of_unity(-m * mod(k * sys.step(), n), n);
        Function g(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) g[j] = f[j] / (ef.h[j] * denom);
        b += sys.unitary_power(k) * sys.embed(g);
    }
    return make_factorization(crossed_sum(fs, sys), std::move(b), sys.embed(ef.h), Method::Eigenfunction);
}

}  // namespace commfact::ergodic
