#pragma once

#include "vineuq/model.hpp"
#include "vineuq/types.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vuq {

struct CsvTable {
    std::vector<std::string> columns;
    Matrix values;
};

/// Comma-separated, header row required, '.' decimal. Errors name the line.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Writes with 17 significant digits so finite doubles round-trip exactly.
void write_csv(std::ostream& out, const std::vector<std::string>& columns, const Matrix& values);
void write_csv_file(const std::string& path, const std::vector<std::string>& columns, const Matrix& values);
std::string format_double(double v);

/// Default column names x1..xM.
std::vector<std::string> default_columns(std::size_t m, const std::string& prefix = "x");

/// Black-box model run as a shell command: x rows go to stdin as CSV lines
/// (no header), one response per line is read from stdout.
struct ExternalModelSpec {
    std::string command;
    std::size_t dimension = 0;
    double timeout_seconds = 60.0;
    bool concurrent = false;
};

class ExternalModel final : public ComputationalModel {
public:
    explicit ExternalModel(ExternalModelSpec spec);

    double evaluate(std::span<const double> x) const override;
    std::size_t dimension() const override { return spec_.dimension; }
    std::string name() const override { return "external"; }
    bool thread_safe() const override { return spec_.concurrent; }

    /// One process invocation for all rows.
    std::vector<double> evaluate_batch(const Matrix& x) const;

    const ExternalModelSpec& spec() const { return spec_; }

private:
    ExternalModelSpec spec_;
};

}  // namespace vuq
