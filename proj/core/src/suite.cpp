#include "commfact/suite.hpp"

#include "commfact/ergodic.hpp"
#include "commfact/errors.hpp"
#include "commfact/io.hpp"
#include "commfact/nilfact.hpp"
#include "commfact/numfmt.hpp"
#include "commfact/normalfact.hpp"
#include "commfact/parallel.hpp"
#include "commfact/shoda.hpp"
#include "commfact/tucci.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace commfact {

namespace {

struct Case {
    std::string suite;
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::function<VerificationReport(std::uint64_t)> run;
};

Index size_in(std::uint64_t seed, Index lo, Index hi) {
    return lo + static_cast<Index>(seed % static_cast<std::uint64_t>(hi - lo + 1));
}

Tolerances with_threshold(double threshold) {
    Tolerances tol;
    tol.residual_rel = threshold;
    return tol;
}

std::vector<cplx> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(n);
    cplx mean = 0.0;
    for (cplx& x : v) {
        x = cplx(u(rng), u(rng));
        mean += x;
    }
    mean /= static_cast<double>(n);
    for (cplx& x : v) x -= mean;
    return v;
}

ergodic::Function random_function(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ergodic::Function f(static_cast<std::size_t>(n));
    for (cplx& x : f) x = cplx(g(rng), g(rng));
    return f;
}

std::size_t count_or(std::size_t requested, std::size_t fallback) {
    return requested == 0 ? fallback : requested;
}

void add_normal(std::vector<Case>& cases, const SuiteConfig& cfg) {
    const Index hi = std::min<Index>(cfg.max_n, 64);
    for (std::size_t i = 0; i < count_or(cfg.cases, 200); ++i)
        cases.push_back({"normal", i, 0, [hi](std::uint64_t s) {
                             const Matrix a = random_normal_traceless(size_in(s, 2, hi), s);
                             return verify(a, factor_normal(a));
                         }});
}

void add_steinitz(std::vector<Case>& cases, const SuiteConfig& cfg) {
    const Index hi = std::min<Index>(cfg.max_n, 8);
    for (std::size_t i = 0; i < count_or(cfg.cases, 500); ++i)
        cases.push_back({"steinitz", i, 0, [hi](std::uint64_t s) {
                             const auto v = random_values(static_cast<std::size_t>(size_in(s, 1, hi)), s);
                             const CyclicRealization r = factor_diagonal_cyclic(v);
                             Matrix target = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
                             for (std::size_t k = 0; k < v.size(); ++k)
                                 target(static_cast<Index>(k), static_cast<Index>(k)) = r.ordered[k];
                             return verify(target, r.factorization, with_threshold(kExactPathThreshold));
                         }});
}

void add_nilpotent(std::vector<Case>& cases, const SuiteConfig& cfg) {
    const Index hi_exact = std::min<Index>(cfg.max_n, 128);
    const Index hi_pipeline = std::min<Index>(cfg.max_n, 64);
    for (std::size_t i = 0; i < count_or(cfg.cases, 200); ++i) {
        if (i % 2 == 0) {
            cases.push_back({"nilpotent", i, 0, [hi_exact](std::uint64_t s) {
                                 const Matrix a = random_strict_upper(size_in(s, 2, hi_exact), s);
                                 return verify(a, strict_triangular_factor(a), with_threshold(kExactPathThreshold));
                             }});
        } else {
            cases.push_back({"nilpotent", i, 0, [hi_pipeline](std::uint64_t s) {
                                 const Matrix a = random_nilpotent(size_in(s, 2, hi_pipeline), s);
                                 return verify(a, factor_nilpotent(a));
                             }});
        }
    }
}

void add_shoda(std::vector<Case>& cases, const SuiteConfig& cfg) {
    const Index hi = std::min<Index>(cfg.max_n, 64);
    for (std::size_t i = 0; i < count_or(cfg.cases, 100); ++i)
        cases.push_back({"shoda", i, 0, [hi, i](std::uint64_t s) {
                             const Index n = size_in(s, 2, hi);
                             const Matrix a = i % 3 == 0   ? random_traceless(n, s)
                                              : i % 3 == 1 ? random_normal_traceless(n, s)
                                                           : random_nilpotent(n, s);
                             return verify(a, factor_traceless(a));
                         }});
}

void add_tucci(std::vector<Case>& cases, const SuiteConfig&) {
    std::size_t index = 0;
    for (double r : {3.0, 1.5})
        for (int depth = 1; depth <= 8; ++depth)
            cases.push_back({"tucci", index++, 0, [r, depth](std::uint64_t) {
                                 const tucci::TucciConfig t = tucci::TucciConfig::sqrt_split(r, depth, tucci::Mode::Dense);
                                 const Matrix a = tucci::build_A(t.a).to_dense();
                                 const Factorization f = make_factorization(a, tucci::build_B(t.b).to_dense(),
                                                                            tucci::build_A(t.c).to_dense(),
                                                                            Method::TensorLegs);
                                 return verify(a, f, with_threshold(kExactPathThreshold));
                             }});
}

void add_ergodic(std::vector<Case>& cases, const SuiteConfig& cfg) {
    const Index hi = std::min<Index>(cfg.max_n, 256);
    for (std::size_t i = 0; i < count_or(cfg.cases, 60); ++i)
        cases.push_back({"ergodic", i, 0, [hi, i](std::uint64_t s) {
                             const Index n = size_in(s, 2, hi);
                             const Tolerances tol = with_threshold(kExactPathThreshold);
                             if (i % 2 == 0) {
                                 const long long step = 1 + static_cast<long long>((s >> 17) % static_cast<std::uint64_t>(n - 1));
                                 const ergodic::CyclicSystem sys(n, step);
                                 const ergodic::Function f = random_function(n, s);
                                 const Factorization fac = ergodic::single_term_factor(f, 1, sys);
                                 return verify(sys.unitary() * sys.embed(f), fac, tol);
                             }
                             const ergodic::CyclicSystem sys(n, 1);
                             std::map<long long, ergodic::Function> fs;
                             std::uint64_t stream = 0;
                             for (long long k : {-1LL, 1LL, 2LL, 3LL})
                                 if (k % n != 0) fs[k] = random_function(n, derive_seed(s, ++stream));
                             const Factorization fac = ergodic::multi_term_factor(fs, sys);
                             return verify(ergodic::crossed_sum(fs, sys), fac, tol);
                         }});
}

using Adder = void (*)(std::vector<Case>&, const SuiteConfig&);

const std::vector<std::pair<std::string, Adder>>& adders() {
    static const std::vector<std::pair<std::string, Adder>> table{
        {"normal", add_normal}, {"steinitz", add_steinitz}, {"nilpotent", add_nilpotent},
        {"shoda", add_shoda},   {"tucci", add_tucci},       {"ergodic", add_ergodic},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, adder] : adders()) out.push_back(name);
        out.push_back("all");
        return out;
    }();
    return names;
}

SuiteResult run_suite(const SuiteConfig& config) {
    if (config.suite.empty()) throw InvalidArgument("run_suite: no suite named");
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), config.suite) == names.end())
        throw InvalidArgument("run_suite: unknown suite '" + config.suite + "'");
    if (config.max_n > kSuiteMaxNCap) {
        std::ostringstream os;
        os << "run_suite: max_n " << config.max_n << " exceeds cap " << kSuiteMaxNCap;
        throw CapExceeded(static_cast<std::size_t>(config.max_n), static_cast<std::size_t>(kSuiteMaxNCap), os.str());
    }
    if (config.max_n < 2) throw InvalidArgument("run_suite: max_n must be at least 2");

    std::vector<Case> cases;
    std::uint64_t stream = 0;
    for (const auto& [name, adder] : adders()) {
        ++stream;
        if (config.suite != "all" && config.suite != name) continue;
        const std::size_t first = cases.size();
        adder(cases, config);
        const std::uint64_t suite_seed = derive_seed(config.seed, stream);
        for (std::size_t k = first; k < cases.size(); ++k)
            cases[k].seed = derive_seed(suite_seed, cases[k].index);
    }

    SuiteResult result;
    result.config = config;
    result.reports.resize(cases.size());
    const std::size_t threads = config.threads == 0 ? thread_count_from_env() : config.threads;
    parallel_for(cases.size(), threads, [&](std::size_t k) {
        const Case& c = cases[k];
        VerificationReport r;
        try {
            r = c.run(c.seed);
        } catch (const std::exception& e) {
            r = VerificationReport{};
            r.pass = false;
            r.error = e.what();
        }
        r.label = c.suite + "/" + std::to_string(c.index);
        result.reports[k] = std::move(r);
    });

    result.all_pass = true;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const VerificationReport& r = result.reports[k];
        if (result.summary.empty() || result.summary.back().suite != cases[k].suite)
            result.summary.push_back(SummaryRow{cases[k].suite});
        SummaryRow& row = result.summary.back();
        ++row.cases;
        if (r.pass) ++row.passed;
        result.all_pass = result.all_pass && r.pass;
        row.max_residual_rel = std::max(row.max_residual_rel, r.residual_rel);
        if (r.input_norm > 0.0) row.max_norm_ratio = std::max(row.max_norm_ratio, r.norm_product / r.input_norm);
        if (r.norm_product > 0.0)
            row.max_commutator_trace_ratio = std::max(row.max_commutator_trace_ratio, r.commutator_trace / r.norm_product);
    }
    return result;
}

ReportBundle make_bundle(const SuiteResult& result, const std::string& timestamp) {
    ReportBundle b;
    nlohmann::ordered_json header;
    header["suite"] = result.config.suite;
    header["seed"] = result.config.seed;
    header["max_n"] = result.config.max_n;
    header["cases_per_suite"] = result.config.cases;
    header["report_count"] = result.reports.size();
    header["all_pass"] = result.all_pass;
    header["timestamp"] = timestamp;
    b.header_json = header.dump(2) + "\n";

    std::ostringstream reports;
    for (const VerificationReport& r : result.reports) reports << to_json_line(r) << '\n';
    b.reports_jsonl = reports.str();

    std::ostringstream summary;
    summary << "suite,cases,passed,max_residual_rel,max_norm_ratio,max_commutator_trace_ratio\n";
    for (const SummaryRow& row : result.summary)
        summary << row.suite << ',' << row.cases << ',' << row.passed << ',' << format_shortest(row.max_residual_rel) << ','
                << format_shortest(row.max_norm_ratio) << ',' << format_shortest(row.max_commutator_trace_ratio) << '\n';
    b.summary_csv = summary.str();
    return b;
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    io::write_text(dir / "header.json", bundle.header_json);
    io::write_text(dir / "reports.jsonl", bundle.reports_jsonl);
    io::write_text(dir / "summary.csv", bundle.summary_csv);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace commfact
