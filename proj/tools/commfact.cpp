#include "commfact/ergodic.hpp"
#include "commfact/errors.hpp"
#include "commfact/harness.hpp"
#include "commfact/io.hpp"
#include "commfact/nilfact.hpp"
#include "commfact/normalfact.hpp"
#include "commfact/parallel.hpp"
#include "commfact/shoda.hpp"
#include "commfact/steinitz.hpp"
#include "commfact/suite.hpp"
#include "commfact/tucci.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace commfact;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNonConvergence = 3;

using ojson = nlohmann::ordered_json;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ParseError:
        case ErrorKind::InvalidArgument:
        case ErrorKind::CapExceeded:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ShapeError:
            return kExitUsage;
        case ErrorKind::NonConvergence:
            return kExitNonConvergence;
        default:
            return kExitFail;
    }
}

void emit(const std::string& line, const std::string& path) {
    if (path.empty())
        std::cout << line << '\n';
    else
        io::write_text(path, line + "\n");
}

tucci::Mode parse_mode(const std::string& s) {
    return s == "dense" ? tucci::Mode::Dense : tucci::Mode::MatrixFree;
}

struct FactorArgs {
    std::string method = "auto";
    std::string in, out_b, out_c, report;
    double tol = 1e-8;
};

Factorization dispatch(const Matrix& a, const std::string& method, const Tolerances& tol) {
    if (method == "normal") return factor_normal(a, tol);
    if (method == "nilpotent") return factor_nilpotent(a, tol);
    if (method == "flag") return factor_nilpotent(a, tol, NilpotentPath::Flag);
    if (method == "shoda") return factor_traceless(a, tol);
    try {
        return factor_normal(a, tol);
    } catch (const NormalityViolation&) {
    }
    try {
        return factor_nilpotent(a, tol);
    } catch (const NilpotencyViolation&) {
    } catch (const RankDegeneracy&) {
    }
    return factor_traceless(a, tol);
}

int run_factor(const FactorArgs& args) {
    const Matrix a = io::read_matrix(args.in);
    Tolerances tol;
    tol.residual_rel = args.tol;
    const Factorization f = dispatch(a, args.method, tol);
    VerificationReport r = verify(a, f, tol);
    r.label = args.in;
    if (!args.out_b.empty()) io::write_matrix(args.out_b, f.b);
    if (!args.out_c.empty()) io::write_matrix(args.out_c, f.c);
    emit(to_json_line(r), args.report);
    return r.pass ? kExitPass : kExitFail;
}

int run_steinitz(const std::string& path, const std::string& mode) {
    const std::vector<cplx> values = io::read_values(path);
    const RearrangementCertificate cert =
        mode == "greedy" ? greedy_order(values) : exhaustive_best_order(values);
    ojson out;
    out["mode"] = mode;
    out["n"] = values.size();
    out["permutation"] = cert.permutation.indices();
    out["prefix_max"] = cert.prefix_max;
    out["max_modulus"] = cert.max_modulus;
    out["ratio"] = cert.max_modulus > 0.0 ? cert.prefix_max / cert.max_modulus : 0.0;
    out["bound_class"] = to_string(cert.bound_class);
    std::cout << out.dump() << '\n';
    return kExitPass;
}

struct TucciArgs {
    double r = 3.0;
    int depth = 4;
    int from = 1;
    std::string mode = "matrix-free";
    double tol = 1e-12;
    std::string out;
};

int run_tucci_identity(const TucciArgs& t) {
    const tucci::IdentityReport rep =
        tucci::tucci_commutator_identity(tucci::TucciConfig::sqrt_split(t.r, t.depth, parse_mode(t.mode)));
    const bool pass = rep.converged && rep.residual_op <= t.tol && rep.residual_op_bound <= t.tol;
    ojson out;
    out["depth"] = rep.depth;
    out["mode"] = tucci::to_string(rep.mode);
    out["r"] = t.r;
    out["residual_op"] = rep.residual_op;
    out["residual_op_bound"] = rep.residual_op_bound;
    out["residual_l2"] = rep.residual_l2;
    out["converged"] = rep.converged;
    out["sum_abs_a"] = rep.sum_abs_a;
    out["threshold"] = t.tol;
    out["pass"] = pass;
    emit(out.dump(), t.out);
    if (!rep.converged) return kExitNonConvergence;
    return pass ? kExitPass : kExitFail;
}

int run_tucci_certify(const TucciArgs& t) {
    const tucci::TucciConfig cfg = tucci::TucciConfig::sqrt_split(t.r, t.depth);
    const tucci::LowerBoundCertificate cert = tucci::c_lower_bound_certificate(cfg.c, t.depth, parse_mode(t.mode));
    ojson out;
    out["depth"] = t.depth;
    out["r"] = t.r;
    out["lower"] = cert.lower;
    out["norm_estimate"] = cert.norm_estimate;
    out["iterations"] = cert.iterations;
    out["holds"] = cert.holds;
    emit(out.dump(), t.out);
    return cert.holds ? kExitPass : kExitFail;
}

int run_tucci_scan(const TucciArgs& t) {
    const std::vector<tucci::ScanRow> rows = tucci::norm_scan(t.r, t.from, t.depth, thread_count_from_env());
    std::ostringstream os;
    tucci::write_scan_csv(os, rows);
    if (t.out.empty())
        std::cout << os.str();
    else
        io::write_text(t.out, os.str());
    return kExitPass;
}

struct ErgodicArgs {
    long long points = 16;
    long long step = 1;
    std::vector<long long> terms{1};
    std::uint64_t seed = 7;
    double tol = kExactPathThreshold;
    std::string report;
};

int run_ergodic(const ErgodicArgs& e) {
    const ergodic::CyclicSystem sys(e.points, e.step);
    std::map<long long, ergodic::Function> fs;
    std::uint64_t stream = 0;
    for (long long k : e.terms) {
        std::mt19937_64 rng(derive_seed(e.seed, ++stream));
        std::normal_distribution<double> g(0.0, 1.0);
        ergodic::Function f(static_cast<std::size_t>(e.points));
        for (cplx& x : f) x = cplx(g(rng), g(rng));
        fs[k] = f;
    }
    const Factorization fac = ergodic::multi_term_factor(fs, sys);
    Tolerances tol;
    tol.residual_rel = e.tol;
    VerificationReport r = verify(ergodic::crossed_sum(fs, sys), fac, tol);
    r.label = "ergodic-demo";
    emit(to_json_line(r), e.report);
    return r.pass ? kExitPass : kExitFail;
}

struct SuiteArgs {
    std::string name;
    std::uint64_t seed = 7;
    long long max_n = 16;
    std::size_t cases = 0;
    std::string out;
};

int run_suite_cmd(const SuiteArgs& s) {
    SuiteConfig cfg{s.name, s.seed, static_cast<Index>(s.max_n), s.cases};
    const SuiteResult result = run_suite(cfg);
    const ReportBundle bundle = make_bundle(result, utc_timestamp());
    if (!s.out.empty()) write_bundle(bundle, s.out);
    std::cout << bundle.summary_csv;
    for (const VerificationReport& r : result.reports)
        if (!r.pass) std::cerr << "fail: " << r.label << (r.error.empty() ? "" : ": " + r.error) << '\n';
    return result.all_pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Commutator factorizations of traceless matrices"};
    app.require_subcommand(1);
    int code = kExitPass;

    FactorArgs fa;
    auto* factor = app.add_subcommand("factor", "Factor a traceless matrix as [B, C]");
    factor->add_option("--method", fa.method, "Factorizer")
        ->check(CLI::IsMember({"auto", "normal", "nilpotent", "flag", "shoda"}))
        ->capture_default_str();
    factor->add_option("--in", fa.in, "Input matrix (.json or .csv)")->required();
    factor->add_option("--out-b", fa.out_b, "Write B here");
    factor->add_option("--out-c", fa.out_c, "Write C here");
    factor->add_option("--tol", fa.tol, "residual_rel threshold")->capture_default_str();
    factor->add_option("--report", fa.report, "Write the JSON report line here instead of stdout");
    factor->callback([&] { code = run_factor(fa); });

    std::string values_path, steinitz_mode = "exhaustive";
    auto* steinitz = app.add_subcommand("steinitz", "Reorder a zero-sum list to bound its prefix sums");
    steinitz->add_option("--values", values_path, "Value list, one 're,im' per line")->required();
    steinitz->add_option("--mode", steinitz_mode, "Search mode")
        ->check(CLI::IsMember({"exhaustive", "greedy"}))
        ->capture_default_str();
    steinitz->callback([&] { code = run_steinitz(values_path, steinitz_mode); });

    TucciArgs ta;
    auto* tucci_cmd = app.add_subcommand("tucci", "Tensor-leg operator identities");
    tucci_cmd->require_subcommand(1);
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--r", ta.r, "Decay exponent of a_n = n^-r")->capture_default_str();
        sub->add_option("--depth", ta.depth, "Number of legs N")->capture_default_str();
        sub->add_option("--mode", ta.mode, "Operator backend")
            ->check(CLI::IsMember({"dense", "matrix-free"}))
            ->capture_default_str();
        sub->add_option("--out", ta.out, "Write output here instead of stdout");
    };
    auto* identity = tucci_cmd->add_subcommand("identity", "Check A_N = [B_N, C_N]");
    add_common(identity);
    identity->add_option("--tol", ta.tol, "Residual threshold")->capture_default_str();
    identity->callback([&] { code = run_tucci_identity(ta); });
    auto* certify = tucci_cmd->add_subcommand("certify", "Certify ||C_N|| >= (1/2) sum |c_n|");
    add_common(certify);
    certify->callback([&] { code = run_tucci_certify(ta); });
    auto* scan = tucci_cmd->add_subcommand("scan", "Norm table for depths --from..--depth");
    add_common(scan);
    scan->add_option("--from", ta.from, "Smallest depth")->capture_default_str();
    scan->callback([&] { code = run_tucci_scan(ta); });

    ErgodicArgs ea;
    auto* ergodic_cmd = app.add_subcommand("ergodic-demo", "Eigenfunction factorization on a cyclic system");
    ergodic_cmd->add_option("--points", ea.points, "Cycle length N")->capture_default_str();
    ergodic_cmd->add_option("--step", ea.step, "Shift step k")->capture_default_str();
    ergodic_cmd->add_option("--terms", ea.terms, "Nonzero powers of U, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    ergodic_cmd->add_option("--seed", ea.seed, "Seed for the random coefficient functions")->capture_default_str();
    ergodic_cmd->add_option("--report", ea.report, "Write the JSON report line here instead of stdout");
    ergodic_cmd->callback([&] { code = run_ergodic(ea); });

    SuiteArgs sa;
    auto* suite_cmd = app.add_subcommand("suite", "Run a seeded sweep and write a report bundle");
    suite_cmd->add_option("name", sa.name, "normal, steinitz, nilpotent, shoda, tucci, ergodic or all")->required();
    suite_cmd->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
    suite_cmd->add_option("--max-n", sa.max_n, "Largest matrix size")->capture_default_str();
    suite_cmd->add_option("--cases", sa.cases, "Cases per sub-suite (0 = default)")->capture_default_str();
    suite_cmd->add_option("--out", sa.out, "Bundle directory");
    suite_cmd->callback([&] { code = run_suite_cmd(sa); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? kExitPass : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "commfact: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "commfact: " << e.what() << '\n';
        return kExitFail;
    }
    return code;
}
