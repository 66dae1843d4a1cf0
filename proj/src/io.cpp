#include "vineuq/io.hpp"

#include "vineuq/error.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vuq {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& field, std::size_t line, std::size_t col) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw ConfigError("CSV line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": not a number: '" + field + "'");
    return v;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ConfigError("CSV: missing header row");
    t.columns = split(line);
    for (const auto& c : t.columns)
        if (c.empty()) throw ConfigError("CSV line " + std::to_string(lineno) + ": empty column name");
    const std::size_t m = t.columns.size();
    std::vector<double> data;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != m)
            throw ConfigError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(m) +
                              " fields, found " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < m; ++c) data.push_back(parse_double(fields[c], lineno, c + 1));
        ++rows;
    }
    t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < m; ++c)
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * m + c];
    return t;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
    try {
        return read_csv(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string format_double(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(std::ostream& out, const std::vector<std::string>& columns, const Matrix& values) {
    if (static_cast<Eigen::Index>(columns.size()) != values.cols())
        throw DomainError("write_csv: header and data widths differ");
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    std::string row;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        row.clear();
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c) row += ',';
            row += format_double(values(r, c));
        }
        row += '\n';
        out << row;
    }
}

void write_csv_file(const std::string& path, const std::vector<std::string>& columns, const Matrix& values) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write CSV file '" + path + "'");
    write_csv(out, columns, values);
}

std::vector<std::string> default_columns(std::size_t m, const std::string& prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

ExternalModel::ExternalModel(ExternalModelSpec spec) : spec_(std::move(spec)) {
    if (spec_.command.empty()) throw ConfigError("external model: empty command");
    if (spec_.dimension == 0) throw ConfigError("external model: dimension must be positive");
    if (!(spec_.timeout_seconds > 0.0)) throw ConfigError("external model: timeout must be positive");
}

double ExternalModel::evaluate(std::span<const double> x) const {
    Matrix row(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = x[i];
    return evaluate_batch(row).front();
}

std::vector<double> ExternalModel::evaluate_batch(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != spec_.dimension)
        throw DomainError("external model: expected " + std::to_string(spec_.dimension) + " inputs");
    char path[] = "/tmp/vineuq-ext-XXXXXX";
    const int fd = mkstemp(path);
    if (fd < 0) throw NumericalError("external model: cannot create temporary input file");
    close(fd);
    {
        std::ofstream tmp(path);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < x.cols(); ++c) tmp << (c ? "," : "") << format_double(x(r, c));
            tmp << '\n';
        }
    }
    std::ostringstream cmd;
    cmd << "timeout " << spec_.timeout_seconds << " sh -c " << shell_quote(spec_.command) << " < "
        << shell_quote(path);
    FILE* pipe = popen(cmd.str().c_str(), "r");
    if (!pipe) {
        std::remove(path);
        throw NumericalError("external model: cannot start '" + spec_.command + "'");
    }
    std::string output;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    const int status = pclose(pipe);
    std::remove(path);
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        if (code == 124)
            throw NumericalError("external model: timed out after " + format_double(spec_.timeout_seconds) + " s");
        throw NumericalError("external model: command exited with status " + std::to_string(code));
    }
    std::vector<double> y;
    std::istringstream lines(output);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        try {
            y.push_back(parse_double(t, lineno, 1));
        } catch (const ConfigError&) {
            throw NumericalError("external model: output line " + std::to_string(lineno) + " is not a number: '" + t + "'");
        }
    }
    if (y.size() != static_cast<std::size_t>(x.rows()))
        throw NumericalError("external model: expected " + std::to_string(x.rows()) + " outputs, got " +
                             std::to_string(y.size()));
    return y;
}

}  // namespace vuq
