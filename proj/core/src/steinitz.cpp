#include "commfact/steinitz.hpp"

#include "commfact/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace commfact {

const char* to_string(BoundClass b) noexcept {
    switch (b) {
        case BoundClass::Banaszczyk: return "Banaszczyk";
        case BoundClass::GrinbergSevastyanov: return "GrinbergSevastyanov";
        case BoundClass::Unbounded: return "Unbounded";
    }
    return "Unknown";
}

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
    std::vector<char> seen(order_.size(), 0);
    for (std::size_t k : order_) {
        if (k >= order_.size() || seen[k]) {
            std::ostringstream os;
            os << "not a permutation of 0.." << order_.size() << ": entry " << k;
            throw InvalidArgument(os.str());
        }
        seen[k] = 1;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return Permutation(std::move(order));
}

double prefix_max(std::span<const cplx> values, const Permutation& perm) {
    if (perm.size() != values.size()) throw DimensionMismatch("prefix_max: permutation size differs");
    cplx s = 0.0;
    double best = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        s += values[perm[k]];
        best = std::max(best, std::abs(s));
    }
    return best;
}

BoundClass classify_bound(double pm, double mm) noexcept {
    if (pm <= kBanaszczykConstant * mm + kBoundSlack) return BoundClass::Banaszczyk;
    if (pm <= kGrinbergSevastyanovConstant * mm + kBoundSlack) return BoundClass::GrinbergSevastyanov;
    return BoundClass::Unbounded;
}

bool RearrangementCertificate::consistent_with(std::span<const cplx> values, double slack) const {
    if (permutation.size() != values.size()) return false;
    return std::abs(commfact::prefix_max(values, permutation) - prefix_max) <= slack;
}

namespace {

double max_modulus(std::span<const cplx> values) {
    double m = 0.0;
    for (cplx v : values) m = std::max(m, std::abs(v));
    return m;
}

cplx total(std::span<const cplx> values) {
    cplx s = 0.0;
    for (cplx v : values) s += v;
    return s;
}

void require_finite_values(std::span<const cplx> values) {
    for (cplx v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFinite("value tuple has NaN or Inf entries");
}

RearrangementCertificate certify(std::span<const cplx> values, Permutation perm) {
    RearrangementCertificate cert;
    cert.prefix_max = prefix_max(values, perm);
    cert.max_modulus = max_modulus(values);
    cert.bound_class = classify_bound(cert.prefix_max, cert.max_modulus);
    cert.permutation = std::move(perm);
    return cert;
}

// Nearest-prefix greedy. `scan` fixes the order candidates are examined in,
// so ties go to whichever comes first in it. `first` forces the opening element.
std::vector<std::size_t> greedy_pass(std::span<const cplx> v, const std::vector<std::size_t>& scan,
                                     std::size_t first) {
    const std::size_t n = v.size();
    std::vector<char> used(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    cplx s = 0.0;
    if (first < n) {
        order.push_back(first);
        used[first] = 1;
        s = v[first];
    }
    while (order.size() < n) {
        std::size_t pick = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i : scan) {
            if (used[i]) continue;
            const double d = std::abs(s + v[i]);
            if (d < best) {
                best = d;
                pick = i;
            }
        }
        used[pick] = 1;
        order.push_back(pick);
        s += v[pick];
    }
    return order;
}

struct BranchAndBound {
    std::span<const cplx> v;
    std::vector<char> used;
    std::vector<std::size_t> path;
    std::vector<std::size_t> best_path;
    double best = 0.0;

    void search(cplx s, double running) {
        const std::size_t n = v.size();
        if (path.size() == n) {
            if (running < best) {
                best = running;
                best_path = path;
            }
            return;
        }
        std::vector<cplx> tried;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            if (std::find(tried.begin(), tried.end(), v[i]) != tried.end()) continue;
            tried.push_back(v[i]);
            const cplx next = s + v[i];
            const double r = std::max(running, std::abs(next));
            if (r >= best) continue;
            used[i] = 1;
            path.push_back(i);
            search(next, r);
            path.pop_back();
            used[i] = 0;
        }
    }
};

}  // namespace

bool is_zero_sum(std::span<const cplx> values) noexcept {
    const double mm = max_modulus(values);
    return std::abs(total(values)) <= 1e-12 * static_cast<double>(values.size()) * mm;
}

std::vector<cplx> enforce_zero_sum(std::span<const cplx> values) {
    require_finite_values(values);
    if (!is_zero_sum(values)) {
        const cplx s = total(values);
        std::ostringstream os;
        os << "values sum to " << s << ", not zero";
        throw SumNotZero(s, os.str());
    }
    std::vector<cplx> out(values.begin(), values.end());
    if (!out.empty()) {
        const cplx mean = total(values) / static_cast<double>(out.size());
        for (cplx& x : out) x -= mean;
    }
    return out;
}

RearrangementCertificate exhaustive_best_order(std::span<const cplx> values, std::size_t cap) {
    if (values.size() > cap) {
        std::ostringstream os;
        os << "exhaustive search over " << values.size() << " values exceeds the cap " << cap;
        throw CapExceeded(values.size(), cap, os.str());
    }
    const std::vector<cplx> v = enforce_zero_sum(values);
    const std::size_t n = v.size();
    std::vector<std::size_t> scan(n);
    std::iota(scan.begin(), scan.end(), std::size_t{0});

    BranchAndBound bb{v, std::vector<char>(n, 0), {}, greedy_pass(v, scan, n), 0.0};
    bb.best = prefix_max(v, Permutation(bb.best_path));
    bb.path.reserve(n);
    bb.search(0.0, 0.0);
    return certify(values, Permutation(bb.best_path));
}

RearrangementCertificate greedy_order(std::span<const cplx> values, const GreedyOptions& opts) {
    require_finite_values(values);
    std::vector<cplx> v(values.begin(), values.end());
    if (is_zero_sum(values) && !v.empty()) {
        const cplx mean = total(values) / static_cast<double>(v.size());
        for (cplx& x : v) x -= mean;
    }
    const std::size_t n = v.size();
    std::vector<std::size_t> scan(n);
    std::iota(scan.begin(), scan.end(), std::size_t{0});

    RearrangementCertificate cert = certify(values, Permutation(greedy_pass(v, scan, n)));
    const double mm = cert.max_modulus;
    auto good_enough = [&](const RearrangementCertificate& c) {
        return c.prefix_max <= kGrinbergSevastyanovConstant * mm + kBoundSlack;
    };
    if (good_enough(cert) || n < 2) return cert;

    for (std::size_t r = 0; r < opts.restarts; ++r) {
        std::mt19937_64 rng(derive_seed(opts.seed, r));
        std::vector<std::size_t> shuffled = scan;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        RearrangementCertificate trial = certify(values, Permutation(greedy_pass(v, shuffled, first)));
        if (trial.prefix_max < cert.prefix_max) cert = std::move(trial);
        if (good_enough(cert)) return cert;
    }
    if (n <= opts.exhaustive_cap && is_zero_sum(values)) {
        RearrangementCertificate ex = exhaustive_best_order(values, opts.exhaustive_cap);
        if (ex.prefix_max < cert.prefix_max) cert = std::move(ex);
    }
    return cert;
}

RearrangementCertificate best_available_order(std::span<const cplx> values) {
    if (values.size() <= kExhaustiveCap) return exhaustive_best_order(values);
    enforce_zero_sum(values);
    return greedy_order(values);
}

}  // namespace commfact
