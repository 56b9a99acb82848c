#include "commfact/io.hpp"

#include "commfact/errors.hpp"
#include "commfact/numfmt.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace commfact::io {

namespace {

using json = nlohmann::json;

struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
};

Position position_of(const std::string& text, std::size_t byte) {
    Position p;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

[[noreturn]] void fail(Position p, const std::string& what) {
    std::ostringstream os;
    os << "line " << p.line << ", column " << p.column << ": " << what;
    throw ParseError(p.line, p.column, os.str());
}

std::string json_number(double x) {
    if (!std::isfinite(x)) throw NonFinite("serialize_matrix: entry is not finite");
    if (x == 0.0 && std::signbit(x)) return "-0.0";
    return format_shortest(x);
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Field {
    std::string text;
    std::size_t column;
};

std::vector<Field> split_fields(const std::string& line) {
    std::vector<Field> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        const std::string raw = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const std::size_t lead = raw.find_first_not_of(" \t");
        out.push_back({trim(raw), start + 1 + (lead == std::string::npos ? 0 : lead)});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(const Field& f, std::size_t line) {
    double x = 0.0;
    if (!parse_double(f.text, x)) fail({line, f.column}, "'" + f.text + "' is not a number");
    if (!std::isfinite(x)) fail({line, f.column}, "entry '" + f.text + "' is not finite");
    return x;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

Matrix parse_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(position_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    } catch (const json::exception& e) {
        fail({1, 1}, e.what());
    }
    const std::size_t data_at = text.find("\"data\"");
    const Position data_pos = position_of(text, data_at == std::string::npos ? 0 : data_at);
    if (!j.is_object()) fail({1, 1}, "expected a JSON object with keys \"n\" and \"data\"");
    if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1)
        fail(position_of(text, text.find("\"n\"") == std::string::npos ? 0 : text.find("\"n\"")),
             "\"n\" must be a positive integer");
    if (!j.contains("data") || !j["data"].is_array()) fail(data_pos, "\"data\" must be an array");
    const auto n = j["n"].get<long long>();
    const json& data = j["data"];
    const std::size_t expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    if (data.size() != expected) {
        std::ostringstream os;
        os << "\"data\" has " << data.size() << " entries, expected n^2 = " << expected;
        if (data.size() < expected) os << " (" << expected - data.size() << " missing)";
        fail(data_pos, os.str());
    }
    Matrix m(n, n);
    for (std::size_t k = 0; k < expected; ++k) {
        const json& e = data[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            std::ostringstream os;
            os << "data entry " << k << " is not a [re, im] pair of numbers";
            fail(data_pos, os.str());
        }
        const double re = e[0].get<double>();
        const double im = e[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im)) {
            std::ostringstream os;
            os << "data entry " << k << " is not finite";
            fail(data_pos, os.str());
        }
        m(static_cast<Index>(k / static_cast<std::size_t>(n)), static_cast<Index>(k % static_cast<std::size_t>(n))) =
            cplx(re, im);
    }
    return m;
}

Matrix parse_csv(const std::string& text) {
    std::vector<std::string> lines = split_lines(text);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) fail({1, 1}, "empty matrix file");
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        if (trim(lines[li]).empty()) fail({line_no, 1}, "blank line inside matrix");
        const std::vector<Field> fields = split_fields(lines[li]);
        if (li == 0) {
            width = fields.size();
            if (width % 2 != 0)
                fail({1, 1}, "row has an odd number of values; expected (re, im) pairs");
        } else if (fields.size() != width) {
            std::ostringstream os;
            os << "row has " << fields.size() << " values, expected " << width;
            fail({line_no, 1}, os.str());
        }
        std::vector<double> row;
        for (const Field& f : fields) row.push_back(parse_real(f, line_no));
        rows.push_back(std::move(row));
    }
    const std::size_t n = width / 2;
    if (rows.size() > n) {
        std::ostringstream os;
        os << "found " << rows.size() << " rows of " << n << " entries; matrix is not square";
        fail({n + 1, 1}, os.str());
    }
    if (rows.size() < n) {
        std::ostringstream os;
        os << "expected " << n << " rows of " << n << " entries, found " << rows.size() << " rows; "
           << (n - rows.size()) * n << " entries missing";
        fail({rows.size() + 1, 1}, os.str());
    }
    Matrix m(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Index>(i), static_cast<Index>(j)) = cplx(rows[i][2 * j], rows[i][2 * j + 1]);
    return m;
}

}  // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".json") return MatrixFormat::Json;
    if (ext == ".csv") return MatrixFormat::Csv;
    throw InvalidArgument("cannot infer matrix format from '" + path.string() + "' (use .json or .csv)");
}

Matrix parse_matrix(const std::string& text, MatrixFormat format) {
    return format == MatrixFormat::Json ? parse_json(text) : parse_csv(text);
}

Matrix read_matrix(const std::filesystem::path& path) { return read_matrix(path, format_from_path(path)); }

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
    return parse_matrix(read_text(path), format);
}

std::string serialize_matrix(const Matrix& m, MatrixFormat format) {
    require_square(m, "serialize_matrix");
    std::ostringstream os;
    if (format == MatrixFormat::Json) {
        os << "{\"n\":" << m.rows() << ",\"data\":[";
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j) {
                if (i != 0 || j != 0) os << ',';
                os << '[' << json_number(m(i, j).real()) << ',' << json_number(m(i, j).imag()) << ']';
            }
        os << "]}\n";
    } else {
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                if (j != 0) os << ',';
                os << json_number(m(i, j).real()) << ',' << json_number(m(i, j).imag());
            }
            os << '\n';
        }
    }
    return os.str();
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
    write_text(path, serialize_matrix(m, format_from_path(path)));
}

std::vector<cplx> parse_values(const std::string& text) {
    const std::vector<std::string> lines = split_lines(text);
    std::vector<cplx> out;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::string t = trim(lines[li]);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<Field> fields = split_fields(lines[li]);
        if (fields.size() > 2) fail({li + 1, fields[2].column}, "expected 're' or 're,im'");
        const double re = parse_real(fields[0], li + 1);
        const double im = fields.size() == 2 ? parse_real(fields[1], li + 1) : 0.0;
        out.emplace_back(re, im);
    }
    if (out.empty()) fail({1, 1}, "no values found");
    return out;
}

std::vector<cplx> read_values(const std::filesystem::path& path) { return parse_values(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw InvalidArgument("failed writing '" + path.string() + "'");
}

}  // namespace commfact::io
