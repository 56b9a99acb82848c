#include "commfact/tucci.hpp"

#include "commfact/errors.hpp"
#include "commfact/numfmt.hpp"
#include "commfact/parallel.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace commfact::tucci {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPowerTol = 1e-6;
constexpr int kPowerMaxIter = 1000;
constexpr std::uint64_t kResidualSeed = 0x7ecc1ULL;

// Non-identity leg operators are matrix units |r><s|.
struct Unit {
    int r;
    int s;
};

Unit unit_of(LegOp x) noexcept {
    switch (x) {
        case LegOp::E: return {0, 1};
        case LegOp::Et: return {1, 0};
        case LegOp::P0: return {0, 0};
        case LegOp::P1: return {1, 1};
        case LegOp::Identity: break;
    }
    return {-1, -1};
}

LegOp op_of(int r, int s) noexcept {
    if (r == 0) return s == 0 ? LegOp::P0 : LegOp::E;
    return s == 0 ? LegOp::Et : LegOp::P1;
}

// Bit masks of a term: input j contributes iff (j & need) == want, and
// lands on (j & ~need) | put.
struct Masks {
    std::uint64_t need = 0;
    std::uint64_t want = 0;
    std::uint64_t put = 0;
};

Masks masks_of(const Term& t, int depth) noexcept {
    Masks m;
    for (int n = 1; n <= depth; ++n) {
        const LegOp op = t.legs[static_cast<std::size_t>(n - 1)];
        if (op == LegOp::Identity) continue;
        const std::uint64_t bit = std::uint64_t{1} << (depth - n);
        const Unit u = unit_of(op);
        m.need |= bit;
        if (u.s == 1) m.want |= bit;
        if (u.r == 1) m.put |= bit;
    }
    return m;
}

SparseVector merge(SparseVector v) {
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    SparseVector out;
    for (const auto& [i, value] : v) {
        if (!out.empty() && out.back().first == i)
            out.back().second += value;
        else
            out.emplace_back(i, value);
    }
    return out;
}

SparseVector combine(const SparseVector& x, const SparseVector& y, cplx sy) {
    SparseVector all = x;
    for (const auto& [i, value] : y) all.emplace_back(i, sy * value);
    return merge(std::move(all));
}

SparseMatrix leg_matrix(LegOp op) {
    SparseMatrix m(2, 2);
    if (op == LegOp::Identity) {
        m.insert(0, 0) = 1.0;
        m.insert(1, 1) = 1.0;
    } else {
        const Unit u = unit_of(op);
        m.insert(u.r, u.s) = 1.0;
    }
    m.makeCompressed();
    return m;
}

void require_depth(int depth, int cap, const char* what) {
    if (depth < 1) throw InvalidArgument(std::string(what) + ": depth must be positive");
    if (depth > cap) {
        std::ostringstream os;
        os << what << ": depth " << depth << " exceeds cap " << cap;
        throw CapExceeded(static_cast<std::size_t>(depth), static_cast<std::size_t>(cap), os.str());
    }
}

void require_legs(const std::set<int>& legs, int depth, const char* what) {
    for (int n : legs)
        if (n < 1 || n > depth) {
            std::ostringstream os;
            os << what << ": leg " << n << " outside 1.." << depth;
            throw InvalidArgument(os.str());
        }
}

void require_length(const std::vector<cplx>& v, int depth, const char* what) {
    if (v.size() != static_cast<std::size_t>(depth)) {
        std::ostringstream os;
        os << what << ": expected " << depth << " coefficients, got " << v.size();
        throw DimensionMismatch(os.str());
    }
    for (const cplx& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            throw NonFinite(std::string(what) + ": coefficient is not finite");
}

// Residual R = A - (B C - C B) as an explicit sparse matrix.
SparseMatrix residual_dense(const TensorOperator& a, const TensorOperator& b,
                            const TensorOperator& c) {
    const SparseMatrix as = a.to_sparse();
    const SparseMatrix bs = b.to_sparse();
    const SparseMatrix cs = c.to_sparse();
    const SparseMatrix bc = bs * cs;
    const SparseMatrix cb = cs * bs;
    SparseMatrix r = as - (bc - cb);
    r.prune([](Index, Index, const cplx& v) { return v != cplx(0.0); });
    return r;
}

// Column j of R is A e_j - B (C e_j) + C (B e_j), propagated sparsely.
SparseMatrix residual_matrix_free(const TensorOperator& a, const TensorOperator& b,
                                  const TensorOperator& c) {
    const Index dim = a.dim();
    std::vector<Eigen::Triplet<cplx, std::int64_t>> triplets;
    for (Index j = 0; j < dim; ++j) {
        const SparseVector e{{static_cast<std::uint64_t>(j), cplx(1.0)}};
        const SparseVector bc = b.apply(c.apply(e));
        const SparseVector cb = c.apply(b.apply(e));
        const SparseVector col = combine(a.apply(e), combine(bc, cb, -1.0), -1.0);
        for (const auto& [i, value] : col)
            if (value != cplx(0.0))
                triplets.emplace_back(static_cast<std::int64_t>(i), j, value);
    }
    SparseMatrix r(dim, dim);
    r.setFromTriplets(triplets.begin(), triplets.end());
    return r;
}

}  // namespace

const char* to_string(Mode m) noexcept {
    return m == Mode::Dense ? "dense" : "matrix_free";
}

LegOp multiply(LegOp x, LegOp y, bool& zero) noexcept {
    zero = false;
    if (x == LegOp::Identity) return y;
    if (y == LegOp::Identity) return x;
    const Unit ux = unit_of(x);
    const Unit uy = unit_of(y);
    if (ux.s != uy.r) {
        zero = true;
        return LegOp::Identity;
    }
    return op_of(ux.r, uy.s);
}

LegOp adjoint(LegOp x) noexcept {
    if (x == LegOp::E) return LegOp::Et;
    if (x == LegOp::Et) return LegOp::E;
    return x;
}

double leg_trace(LegOp x) noexcept {
    switch (x) {
        case LegOp::Identity: return 1.0;
        case LegOp::P0:
        case LegOp::P1: return 0.5;
        case LegOp::E:
        case LegOp::Et: break;
    }
    return 0.0;
}

TensorOperator::TensorOperator(int depth) : depth_(depth) {
    require_depth(depth, kMatrixFreeCap, "TensorOperator");
}

void TensorOperator::add_term(cplx coefficient, std::vector<LegOp> legs) {
    if (legs.size() != static_cast<std::size_t>(depth_))
        throw DimensionMismatch("TensorOperator::add_term: leg count differs from depth");
    terms_.push_back({coefficient, std::move(legs)});
}

void TensorOperator::apply(const Vector& in, Vector& out) const {
    if (in.size() != dim()) throw DimensionMismatch("TensorOperator::apply: vector length");
    out.setZero(dim());
    for (const Term& t : terms_) {
        const Masks m = masks_of(t, depth_);
        const std::uint64_t free = (static_cast<std::uint64_t>(dim()) - 1) & ~m.need;
        std::uint64_t s = 0;
        do {
            const std::uint64_t j = s | m.want;
            const std::uint64_t i = s | m.put;
            out(static_cast<Index>(i)) += t.coefficient * in(static_cast<Index>(j));
            s = (s - free) & free;
        } while (s != 0);
    }
}

Vector TensorOperator::apply(const Vector& in) const {
    Vector out;
    apply(in, out);
    return out;
}

SparseVector TensorOperator::apply(const SparseVector& in) const {
    SparseVector out;
    for (const Term& t : terms_) {
        const Masks m = masks_of(t, depth_);
        for (const auto& [j, value] : in)
            if ((j & m.need) == m.want) out.emplace_back((j & ~m.need) | m.put, t.coefficient * value);
    }
    return merge(std::move(out));
}

TensorOperator TensorOperator::adjoint() const {
    TensorOperator out(depth_);
    for (const Term& t : terms_) {
        std::vector<LegOp> legs = t.legs;
        for (LegOp& l : legs) l = tucci::adjoint(l);
        out.terms_.push_back({std::conj(t.coefficient), std::move(legs)});
    }
    return out;
}

bool TensorOperator::is_diagonal() const noexcept {
    for (const Term& t : terms_)
        for (LegOp l : t.legs)
            if (l == LegOp::E || l == LegOp::Et) return false;
    return true;
}

Vector TensorOperator::diagonal() const {
    Vector d = Vector::Zero(dim());
    for (const Term& t : terms_) {
        const Masks m = masks_of(t, depth_);
        if (m.want != m.put) continue;
        const std::uint64_t free = (static_cast<std::uint64_t>(dim()) - 1) & ~m.need;
        std::uint64_t s = 0;
        do {
            d(static_cast<Index>(s | m.want)) += t.coefficient;
            s = (s - free) & free;
        } while (s != 0);
    }
    return d;
}

TensorOperator TensorOperator::simplified() const {
    TensorOperator out(depth_);
    std::map<std::vector<LegOp>, std::size_t> position;
    for (const Term& t : terms_) {
        const auto [it, inserted] = position.emplace(t.legs, out.terms_.size());
        if (inserted)
            out.terms_.push_back(t);
        else
            out.terms_[it->second].coefficient += t.coefficient;
    }
    std::erase_if(out.terms_, [](const Term& t) { return t.coefficient == cplx(0.0); });
    return out;
}

SparseMatrix TensorOperator::to_sparse() const {
    require_depth(depth_, kDenseCap, "TensorOperator::to_sparse");
    SparseMatrix total(dim(), dim());
    for (const Term& t : terms_) {
        SparseMatrix k = leg_matrix(t.legs[0]);
        for (int n = 2; n <= depth_; ++n) {
            SparseMatrix next = Eigen::kroneckerProduct(k, leg_matrix(t.legs[static_cast<std::size_t>(n - 1)]));
            k = std::move(next);
        }
        total += t.coefficient * k;
    }
    total.makeCompressed();
    return total;
}

Matrix TensorOperator::to_dense() const { return Matrix(to_sparse()); }

TensorOperator operator+(const TensorOperator& x, const TensorOperator& y) {
    if (x.depth_ != y.depth_) throw DimensionMismatch("TensorOperator: depths differ");
    TensorOperator out = x;
    out.terms_.insert(out.terms_.end(), y.terms_.begin(), y.terms_.end());
    return out;
}

TensorOperator operator-(const TensorOperator& x, const TensorOperator& y) {
    return x + cplx(-1.0) * y;
}

TensorOperator operator*(const TensorOperator& x, const TensorOperator& y) {
    if (x.depth_ != y.depth_) throw DimensionMismatch("TensorOperator: depths differ");
    TensorOperator out(x.depth_);
    for (const Term& s : x.terms_)
        for (const Term& t : y.terms_) {
            std::vector<LegOp> legs(s.legs.size());
            bool zero = false;
            for (std::size_t n = 0; n < legs.size() && !zero; ++n)
                legs[n] = multiply(s.legs[n], t.legs[n], zero);
            if (!zero) out.terms_.push_back({s.coefficient * t.coefficient, std::move(legs)});
        }
    return out;
}

TensorOperator operator*(cplx s, const TensorOperator& x) {
    TensorOperator out = x;
    for (Term& t : out.terms_) t.coefficient *= s;
    return out;
}

TensorOperator identity_operator(int depth) {
    TensorOperator out(depth);
    out.add_term(1.0, std::vector<LegOp>(static_cast<std::size_t>(depth), LegOp::Identity));
    return out;
}

namespace {

TensorOperator single_leg(int n, int depth, LegOp op, const char* what) {
    if (n < 1 || n > depth) {
        std::ostringstream os;
        os << what << ": leg " << n << " outside 1.." << depth;
        throw InvalidArgument(os.str());
    }
    TensorOperator out(depth);
    std::vector<LegOp> legs(static_cast<std::size_t>(depth), LegOp::Identity);
    legs[static_cast<std::size_t>(n - 1)] = op;
    out.add_term(1.0, std::move(legs));
    return out;
}

TensorOperator weighted_sum(const std::vector<cplx>& coefficients, LegOp op) {
    TensorOperator out(static_cast<int>(coefficients.size()));
    const int depth = out.depth();
    for (int n = 1; n <= depth; ++n) {
        std::vector<LegOp> legs(static_cast<std::size_t>(depth), LegOp::Identity);
        legs[static_cast<std::size_t>(n - 1)] = op;
        out.add_term(coefficients[static_cast<std::size_t>(n - 1)], std::move(legs));
    }
    return out;
}

}  // namespace

TensorOperator build_V(int n, int depth) { return single_leg(n, depth, LegOp::E, "build_V"); }

TensorOperator build_VVstar(int n, int depth) {
    return single_leg(n, depth, LegOp::P0, "build_VVstar");
}

TensorOperator build_A(const std::vector<cplx>& coefficients) {
    return weighted_sum(coefficients, LegOp::E);
}

TensorOperator build_B(const std::vector<cplx>& coefficients) {
    return weighted_sum(coefficients, LegOp::P0);
}

TensorOperator conditional_expectation(const TensorOperator& x, const std::set<int>& legs) {
    require_legs(legs, x.depth(), "conditional_expectation");
    TensorOperator out(x.depth());
    for (const Term& t : x.terms()) {
        cplx coefficient = t.coefficient;
        std::vector<LegOp> kept = t.legs;
        for (int n = 1; n <= x.depth(); ++n) {
            if (legs.count(n)) continue;
            LegOp& l = kept[static_cast<std::size_t>(n - 1)];
            coefficient *= leg_trace(l);
            l = LegOp::Identity;
        }
        out.add_term(coefficient, std::move(kept));
    }
    return out.simplified();
}

TucciConfig TucciConfig::sqrt_split(double r, int depth, Mode mode) {
    if (depth < 1) throw InvalidArgument("sqrt_split: depth must be positive");
    TucciConfig cfg;
    cfg.depth = depth;
    cfg.mode = mode;
    for (int n = 1; n <= depth; ++n) {
        const double nn = static_cast<double>(n);
        cfg.a.emplace_back(std::pow(nn, -r));
        cfg.b.emplace_back(std::pow(nn, -r / 2.0));
        cfg.c.emplace_back(std::pow(nn, -r / 2.0));
    }
    return cfg;
}

void TucciConfig::validate() const {
    require_depth(depth, mode == Mode::Dense ? kDenseCap : kMatrixFreeCap, "TucciConfig");
    require_length(a, depth, "TucciConfig a");
    require_length(b, depth, "TucciConfig b");
    require_length(c, depth, "TucciConfig c");
}

IdentityReport tucci_commutator_identity(const TucciConfig& cfg, bool allow_mismatch) {
    cfg.validate();
    IdentityReport rep;
    rep.depth = cfg.depth;
    rep.mode = cfg.mode;
    for (std::size_t n = 0; n < cfg.a.size(); ++n) {
        const cplx bc = cfg.b[n] * cfg.c[n];
        const double diff = std::abs(cfg.a[n] - bc);
        rep.max_coefficient_mismatch = std::max(rep.max_coefficient_mismatch, diff);
        rep.sum_abs_a += std::abs(cfg.a[n]);
        const double allowed = 4.0 * kEps * std::max(std::abs(cfg.a[n]), std::abs(bc));
        if (!allow_mismatch && diff > allowed) {
            std::ostringstream os;
            os << "tucci_commutator_identity: a_" << n + 1 << " != b_" << n + 1 << " c_" << n + 1
               << " (difference " << diff << ")";
            throw CoefficientMismatch(n + 1, os.str());
        }
    }

    const TensorOperator a = build_A(cfg.a);
    const TensorOperator b = build_B(cfg.b);
    const TensorOperator c = build_A(cfg.c);
    const SparseMatrix r =
        cfg.mode == Mode::Dense ? residual_dense(a, b, c) : residual_matrix_free(a, b, c);

    const Index dim = a.dim();
    Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(dim);
    double frob2 = 0.0;
    for (Index j = 0; j < r.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(r, j); it; ++it) {
            const double m = std::abs(it.value());
            col_sums(it.col()) += m;
            row_sums(it.row()) += m;
            frob2 += m * m;
        }
    rep.residual_op_bound = std::sqrt(col_sums.maxCoeff() * row_sums.maxCoeff());
    rep.residual_l2 = std::sqrt(frob2 / static_cast<double>(dim));
    if (r.nonZeros() == 0) return rep;

    const SparseMatrix rh = r.adjoint();
    PowerIterationOptions opts;
    opts.rel_tol = kPowerTol;
    opts.max_iter = kPowerMaxIter;
    opts.seed = kResidualSeed;
    const NormEstimate est = estimate_norm([&](const Vector& x, Vector& y) { y = r * x; },
                                           [&](const Vector& x, Vector& y) { y = rh * x; }, dim, opts);
    rep.residual_op = est.value;
    rep.converged = est.converged;
    return rep;
}

LowerBoundCertificate c_lower_bound_certificate(const std::vector<cplx>& c, int depth, Mode mode) {
    require_depth(depth, mode == Mode::Dense ? kDenseCap : kMatrixFreeCap, "c_lower_bound_certificate");
    require_length(c, depth, "c_lower_bound_certificate");
    LowerBoundCertificate cert;
    std::vector<cplx> moduli;
    for (const cplx& x : c) {
        moduli.emplace_back(std::abs(x));
        cert.lower += 0.5 * std::abs(x);
    }
    if (cert.lower == 0.0) {
        cert.holds = true;
        return cert;
    }

    const TensorOperator op = build_A(moduli);
    const TensorOperator op_h = op.adjoint();
    PowerIterationOptions opts;
    opts.rel_tol = kPowerTol;
    opts.max_iter = kPowerMaxIter;
    opts.start = Vector::Constant(op.dim(), cplx(1.0));
    NormEstimate est;
    if (mode == Mode::Dense) {
        const SparseMatrix s = op.to_sparse();
        const SparseMatrix sh = s.adjoint();
        est = estimate_norm([&](const Vector& x, Vector& y) { y = s * x; },
                            [&](const Vector& x, Vector& y) { y = sh * x; }, op.dim(), opts);
    } else {
        est = estimate_norm([&](const Vector& x, Vector& y) { op.apply(x, y); },
                            [&](const Vector& x, Vector& y) { op_h.apply(x, y); }, op.dim(), opts);
    }
    if (!est.converged) {
        std::ostringstream os;
        os << "c_lower_bound_certificate: power iteration did not converge in " << kPowerMaxIter
           << " iterations (best estimate " << est.value << ")";
        throw NonConvergence(est.value, os.str());
    }
    cert.norm_estimate = est.value;
    cert.iterations = est.iterations;
    cert.holds = cert.lower <= cert.norm_estimate + kCertificateSlack;
    return cert;
}

L2Check b_l2_formula_check(const std::vector<cplx>& b, const std::set<int>& legs, int depth) {
    require_depth(depth, kMatrixFreeCap, "b_l2_formula_check");
    require_length(b, depth, "b_l2_formula_check");
    require_legs(legs, depth, "b_l2_formula_check");
    std::vector<cplx> restricted(b.size(), 0.0);
    double sum_sq = 0.0;
    cplx sum = 0.0;
    for (int n : legs) {
        const cplx v = b[static_cast<std::size_t>(n - 1)];
        restricted[static_cast<std::size_t>(n - 1)] = v;
        sum_sq += std::norm(v);
        sum += v;
    }
    const Vector d = build_B(restricted).diagonal();
    L2Check out;
    out.lhs = d.squaredNorm() / static_cast<double>(d.size());
    out.rhs = 0.25 * sum_sq + 0.25 * std::norm(sum);
    return out;
}

ProjectionCheck conditional_projection_check(const std::vector<cplx>& b, const std::set<int>& legs,
                                             cplx y, int depth) {
    require_depth(depth, kMatrixFreeCap, "conditional_projection_check");
    require_length(b, depth, "conditional_projection_check");
    require_legs(legs, depth, "conditional_projection_check");
    const TensorOperator id = identity_operator(depth);
    TensorOperator bh = (y / 2.0) * id;
    for (int n = 1; n <= depth; ++n) {
        const cplx bn = b[static_cast<std::size_t>(n - 1)];
        bh = bh + bn * (build_VVstar(n, depth) - cplx(0.5) * id);
    }
    TensorOperator p = id;
    for (int n : legs) p = p * build_VVstar(n, depth);

    ProjectionCheck out;
    out.expected = y / 2.0;
    for (int n : legs) out.expected += b[static_cast<std::size_t>(n - 1)] / 2.0;
    const TensorOperator x = (conditional_expectation(bh, legs) * p).simplified();
    out.off_diagonal_free = x.is_diagonal();
    const Vector dx = x.diagonal();
    const Vector dp = p.diagonal();
    out.measured = dx(0);
    out.max_deviation = (dx - out.expected * dp).cwiseAbs().maxCoeff();
    return out;
}

std::vector<ScanRow> norm_scan(double r, int n_min, int n_max, std::size_t threads) {
    if (!(r > 1.0 && r <= 2.0)) {
        std::ostringstream os;
        os << "norm_scan: r = " << r << " outside (1, 2]";
        throw InvalidArgument(os.str());
    }
    if (n_min < 1 || n_min > n_max) throw InvalidArgument("norm_scan: empty or invalid depth range");
    require_depth(n_max, kMatrixFreeCap, "norm_scan");
    std::vector<ScanRow> rows(static_cast<std::size_t>(n_max - n_min + 1));
    parallel_for(rows.size(), threads, [&](std::size_t k) {
        const int depth = n_min + static_cast<int>(k);
        const TucciConfig cfg = TucciConfig::sqrt_split(r, depth, Mode::MatrixFree);
        const IdentityReport rep = tucci_commutator_identity(cfg);
        const LowerBoundCertificate cert = c_lower_bound_certificate(cfg.c, depth);
        ScanRow& row = rows[k];
        row.depth = depth;
        row.lower_bound = cert.lower;
        row.norm_c = cert.norm_estimate;
        for (const cplx& x : cfg.b) row.sum_b += x.real();
        row.norm_b = build_B(cfg.b).diagonal().cwiseAbs().maxCoeff();
        row.residual = rep.residual_op_bound;
    });
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "N,lower_bound,norm_C,sum_b,norm_B,residual\n";
    for (const ScanRow& row : rows)
        os << row.depth << ',' << format_shortest(row.lower_bound) << ',' << format_shortest(row.norm_c)
           << ',' << format_shortest(row.sum_b) << ',' << format_shortest(row.norm_b) << ','
           << format_shortest(row.residual) << '\n';
}

}  // namespace commfact::tucci
