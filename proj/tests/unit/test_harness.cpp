#include "commfact/errors.hpp"
#include "commfact/harness.hpp"
#include "commfact/io.hpp"
#include "commfact/normalfact.hpp"
#include "commfact/parallel.hpp"
#include "commfact/suite.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <bit>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>

using namespace commfact;

namespace {

Matrix diag_pm1() {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    return a;
}

bool bit_equal(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    for (Index j = 0; j < x.cols(); ++j)
        for (Index i = 0; i < x.rows(); ++i)
            if (std::bit_cast<std::uint64_t>(x(i, j).real()) != std::bit_cast<std::uint64_t>(y(i, j).real()) ||
                std::bit_cast<std::uint64_t>(x(i, j).imag()) != std::bit_cast<std::uint64_t>(y(i, j).imag()))
                return false;
    return true;
}

template <typename F>
ParseError parse_error_of(F&& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ParseError";
    return ParseError(0, 0, "none");
}

}  // namespace

TEST(Verify, Examples) {
    const Matrix a = diag_pm1();
    const VerificationReport ok = verify(a, factor_normal(a));
    EXPECT_TRUE(ok.pass);
    EXPECT_EQ(ok.residual_op, 0.0);
    EXPECT_NEAR(ok.norm_product, 1.0, 1e-15);
    EXPECT_EQ(ok.method, Method::NormalShift);
    ASSERT_TRUE(ok.certificate.has_value());
    EXPECT_DOUBLE_EQ(ok.certificate->prefix_max, 1.0);

    Matrix other = Matrix::Zero(2, 2);
    other(0, 1) = 3.0;
    const VerificationReport bad = verify(other, factor_normal(a));
    EXPECT_FALSE(bad.pass);
    EXPECT_NEAR(bad.residual_op, oracle::norm(other - a), 1e-12);

    Matrix traced = a;
    traced(0, 0) = 2.0;
    const Factorization f = make_factorization(traced, Matrix::Zero(2, 2), Matrix::Zero(2, 2), Method::ShodaBaseline);
    const VerificationReport tr = verify(traced, f);
    EXPECT_EQ(tr.trace_of_input, cplx(0.5));
    EXPECT_GE(tr.residual_op, std::abs(tr.trace_of_input));
    EXPECT_FALSE(tr.pass);

    EXPECT_THROW(verify(Matrix::Zero(3, 3), factor_normal(a)), DimensionMismatch);
}

TEST(Verify, IgnoresStoredResiduals) {
    const Matrix a = random_normal_traceless(6, 11);
    Factorization f = factor_normal(a);
    const VerificationReport honest = verify(a, f);
    f.residual_op = 123.0;
    f.residual_l2 = -1.0;
    f.norm_product = 0.0;
    const VerificationReport tampered = verify(a, f);
    EXPECT_EQ(to_json_line(honest), to_json_line(tampered));
    EXPECT_NEAR(honest.residual_op, oracle::norm(a - oracle::commutator(f.b, f.c)), 1e-13);
    EXPECT_NEAR(honest.norm_product, oracle::norm(f.b) * oracle::norm(f.c), 1e-12);
}

TEST(Verify, JsonLineRoundTrip) {
    const Matrix a = random_normal_traceless(5, 12);
    VerificationReport r = verify(a, factor_normal(a));
    r.label = "normal/3";
    const std::string line = to_json_line(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const std::vector<std::string> keys{"label", "n", "input_norm", "residual_op", "residual_l2", "residual_rel",
                                        "norm_b", "norm_c", "norm_product", "trace_of_input", "commutator_trace",
                                        "method", "certificate", "threshold", "pass", "error"};
    std::size_t at = 0;
    for (const std::string& k : keys) {
        const std::size_t pos = line.find("\"" + k + "\":");
        ASSERT_NE(pos, std::string::npos) << k;
        EXPECT_GT(pos, at == 0 ? 0 : at) << k;
        at = pos;
    }
    const VerificationReport back = report_from_json(line);
    EXPECT_EQ(to_json_line(back), line);
    EXPECT_EQ(back.residual_op, r.residual_op);
    EXPECT_EQ(back.certificate->bound_class, r.certificate->bound_class);
    EXPECT_THROW(report_from_json("{\"label\":1}"), ParseError);
}

TEST(MatrixIo, FormatExamples) {
    const Matrix j = io::parse_matrix("{\"n\":2,\"data\":[[1,0],[0,0],[0,0],[-1,0]]}", io::MatrixFormat::Json);
    EXPECT_TRUE(bit_equal(j, diag_pm1()));
    const Matrix c = io::parse_matrix("1,0,0,0\n0,0,-1,0", io::MatrixFormat::Csv);
    EXPECT_TRUE(bit_equal(c, diag_pm1()));
    const Matrix spaced = io::parse_matrix(" 1, 0 ,0,0\r\n0,0, -1,0\n\n", io::MatrixFormat::Csv);
    EXPECT_TRUE(bit_equal(spaced, diag_pm1()));
}

TEST(MatrixIo, RoundTripIsBitExact) {
    std::mt19937_64 rng(13);
    Matrix m = oracle::random_matrix(7, rng);
    m(0, 0) = cplx(-0.0, 0.0);
    m(1, 2) = cplx(std::numeric_limits<double>::denorm_min(), -1e300);
    m(2, 1) = cplx(0.1, 1.0 / 3.0);
    m(3, 3) = cplx(9007199254740993.0, -123456789.0);
    m(4, 4) = cplx(std::numeric_limits<double>::max(), std::numeric_limits<double>::min());
    for (io::MatrixFormat f : {io::MatrixFormat::Json, io::MatrixFormat::Csv}) {
        const Matrix back = io::parse_matrix(io::serialize_matrix(m, f), f);
        EXPECT_TRUE(bit_equal(back, m));
        EXPECT_EQ(io::serialize_matrix(back, f), io::serialize_matrix(m, f));
    }
    Matrix bad = m;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(io::serialize_matrix(bad, io::MatrixFormat::Json), NonFinite);
}

TEST(MatrixIo, FileRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "commfact_io_test";
    std::filesystem::create_directories(dir);
    const Matrix m = random_traceless(4, 14);
    for (const char* name : {"m.json", "m.csv"}) {
        io::write_matrix(dir / name, m);
        EXPECT_TRUE(bit_equal(io::read_matrix(dir / name), m));
    }
    EXPECT_THROW(io::read_matrix(dir / "m.txt"), InvalidArgument);
    EXPECT_THROW(io::read_matrix(dir / "missing.json"), InvalidArgument);
    std::filesystem::remove_all(dir);
}

TEST(MatrixIo, MalformedInputDiagnostics) {
    const ParseError truncated = parse_error_of(
        [] { io::parse_matrix("1,0,0,0,0,0\n0,0,1,0,0,0\n", io::MatrixFormat::Csv); });
    EXPECT_NE(std::string(truncated.what()).find("3 entries missing"), std::string::npos) << truncated.what();
    EXPECT_EQ(truncated.line(), 3u);

    const ParseError json_short = parse_error_of(
        [] { io::parse_matrix("{\"n\":2,\"data\":[[1,0],[0,0],[0,0]]}", io::MatrixFormat::Json); });
    EXPECT_NE(std::string(json_short.what()).find("1 missing"), std::string::npos) << json_short.what();

    const ParseError cut = parse_error_of(
        [] { io::parse_matrix("{\"n\":2,\n\"data\":[[1,0],[0,0]", io::MatrixFormat::Json); });
    EXPECT_EQ(cut.line(), 2u);

    const ParseError nan = parse_error_of([] { io::parse_matrix("1,0,0,0\n0,0,nan,0", io::MatrixFormat::Csv); });
    EXPECT_EQ(nan.line(), 2u);
    EXPECT_EQ(nan.column(), 5u);

    const ParseError word = parse_error_of([] { io::parse_matrix("1,0,x,0\n0,0,1,0", io::MatrixFormat::Csv); });
    EXPECT_EQ(word.line(), 1u);
    EXPECT_EQ(word.column(), 5u);

    EXPECT_THROW(io::parse_matrix("1,0,0,0\n0,0\n", io::MatrixFormat::Csv), ParseError);
    EXPECT_THROW(io::parse_matrix("1,0\n0,0\n", io::MatrixFormat::Csv), ParseError);
    EXPECT_THROW(io::parse_matrix("1,0,0\n", io::MatrixFormat::Csv), ParseError);
    EXPECT_THROW(io::parse_matrix("", io::MatrixFormat::Csv), ParseError);
    EXPECT_THROW(io::parse_matrix("{\"n\":0,\"data\":[]}", io::MatrixFormat::Json), ParseError);
    EXPECT_THROW(io::parse_matrix("{\"n\":1,\"data\":[[1]]}", io::MatrixFormat::Json), ParseError);
    EXPECT_THROW(io::parse_matrix("[1,2]", io::MatrixFormat::Json), ParseError);
    EXPECT_THROW(io::parse_matrix("{\"n\":1,\"data\":[[1e999,0]]}", io::MatrixFormat::Json), ParseError);
}

TEST(ValuesIo, Parse) {
    const auto v = io::parse_values("# roots\n1,0\n-1\n\n0,1\n0,-1\n");
    EXPECT_EQ(v, (std::vector<cplx>{1.0, -1.0, cplx(0, 1), cplx(0, -1)}));
    EXPECT_THROW(io::parse_values("1,2,3\n"), ParseError);
    EXPECT_THROW(io::parse_values("# nothing\n"), ParseError);
    EXPECT_EQ(parse_error_of([] { io::parse_values("1,0\n2,y\n"); }).line(), 2u);
}

TEST(Parallel, EveryIndexOnceAndErrorsPropagate) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw InvalidArgument("boom"); }),
                 InvalidArgument);
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Parallel, ThreadCountFromEnvironment) {
    const char* old = std::getenv("COMMFACT_THREADS");
    const std::string saved = old ? old : "";
    setenv("COMMFACT_THREADS", "3", 1);
    EXPECT_EQ(thread_count_from_env(), 3u);
    setenv("COMMFACT_THREADS", "zero", 1);
    EXPECT_GE(thread_count_from_env(), 1u);
    if (old)
        setenv("COMMFACT_THREADS", saved.c_str(), 1);
    else
        unsetenv("COMMFACT_THREADS");
}

TEST(Suite, ConfigErrors) {
    EXPECT_THROW(run_suite(SuiteConfig{}), InvalidArgument);
    EXPECT_THROW(run_suite(SuiteConfig{"bogus"}), InvalidArgument);
    SuiteConfig big{"normal"};
    big.max_n = 513;
    EXPECT_THROW(run_suite(big), CapExceeded);
    SuiteConfig tiny{"normal"};
    tiny.max_n = 1;
    EXPECT_THROW(run_suite(tiny), InvalidArgument);
    EXPECT_EQ(suite_names().back(), "all");
}

TEST(Suite, NormalSeedSevenPasses) {
    SuiteConfig cfg{"normal"};
    cfg.seed = 7;
    cfg.max_n = 16;
    const SuiteResult r = run_suite(cfg);
    EXPECT_TRUE(r.all_pass);
    EXPECT_EQ(r.reports.size(), 200u);
    for (std::size_t k = 0; k < r.reports.size(); ++k) {
        EXPECT_EQ(r.reports[k].label, "normal/" + std::to_string(k));
        EXPECT_LE(r.reports[k].n, 16);
        EXPECT_TRUE(r.reports[k].error.empty());
    }
}

TEST(Suite, TucciDenseResiduals) {
    const SuiteResult r = run_suite(SuiteConfig{"tucci"});
    EXPECT_TRUE(r.all_pass);
    for (const VerificationReport& rep : r.reports) {
        EXPECT_LE(rep.residual_op, 1e-12);
        EXPECT_EQ(rep.method, Method::TensorLegs);
    }
}

TEST(Suite, BundlesDeterministicAcrossThreadCounts) {
    SuiteConfig cfg{"all"};
    cfg.cases = 6;
    cfg.threads = 1;
    const ReportBundle a = make_bundle(run_suite(cfg), "2000-01-01T00:00:00Z");
    cfg.threads = 4;
    const ReportBundle b = make_bundle(run_suite(cfg), "2001-01-01T00:00:00Z");
    EXPECT_EQ(a.reports_jsonl, b.reports_jsonl);
    EXPECT_EQ(a.summary_csv, b.summary_csv);
    EXPECT_NE(a.header_json, b.header_json);
    EXPECT_EQ(a.reports_jsonl.find("2000-01-01"), std::string::npos);

    std::string ha = a.header_json, hb = b.header_json;
    ha.replace(ha.find("2000-01-01T00:00:00Z"), 20, "T");
    hb.replace(hb.find("2001-01-01T00:00:00Z"), 20, "T");
    EXPECT_EQ(ha, hb);

    cfg.seed = 8;
    EXPECT_NE(make_bundle(run_suite(cfg), "x").reports_jsonl, a.reports_jsonl);
}

TEST(Suite, BundleFilesWritten) {
    const auto dir = std::filesystem::temp_directory_path() / "commfact_bundle_test";
    SuiteConfig cfg{"ergodic"};
    cfg.cases = 4;
    const ReportBundle b = make_bundle(run_suite(cfg), utc_timestamp());
    write_bundle(b, dir);
    EXPECT_EQ(io::read_text(dir / "reports.jsonl"), b.reports_jsonl);
    EXPECT_EQ(io::read_text(dir / "summary.csv"), b.summary_csv);
    EXPECT_EQ(io::read_text(dir / "header.json"), b.header_json);
    std::filesystem::remove_all(dir);
}
