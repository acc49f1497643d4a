#pragma once

// CSV formats: datasets, gamma tables, test reports. Lines starting with '#' carry provenance.

#include "pactest/pac_engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pactest {

/// Malformed CSV input; `rows()` lists the offending 1-based data row numbers.
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::vector<std::size_t> rows = {})
        : std::runtime_error(what), rows_(std::move(rows)) {}
    const std::vector<std::size_t>& rows() const { return rows_; }

private:
    std::vector<std::size_t> rows_;
};

/// Header t,p_1..p_K,x_1..x_K,income. `header` lines are written as '# ' comments, then the label.
void write_dataset_csv(std::ostream& os, const Dataset& data, const std::vector<std::string>& header = {});
/// Reads the format above. Every malformed row is reported in one CsvError. Comments are kept in
/// `comments` when given; a '# label=' comment becomes the dataset label.
Dataset read_dataset_csv(std::istream& is, std::vector<std::string>* comments = nullptr);

void write_gamma_csv(std::ostream& os, const GammaTable& table, const std::vector<std::string>& header = {});
GammaTable read_gamma_csv(std::istream& is);

void write_report_csv(std::ostream& os, const TestReport& report, const std::vector<std::string>& header = {});

/// Fixed-width table: k, eps, delta, n, norm, T_n, decision.
std::string format_report_table(const TestReport& report);

}  // namespace pactest
