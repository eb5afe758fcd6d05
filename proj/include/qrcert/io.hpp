#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrcert/bell.hpp"
#include "qrcert/certify.hpp"
#include "qrcert/search.hpp"

namespace qrcert {

using Json = nlohmann::json;

/// {"n_alice", "n_bob", "constant", "alice_marginal", "bob_marginal", "joint"}; joint is row-major nested arrays.
Json to_json(const BellOperator& op);
BellOperator operator_from_json(const Json& j);
BellOperator load_operator(const std::string& path);

Json to_json(const CertificationResult& r);
Json to_json(const SearchReport& report);

/// A rectangular table of strings with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double number(std::size_t row, const std::string& name) const;
};

/// Shortest "%.{digits}g" rendering; NaN prints as "nan".
std::string format_number(double value, int digits = 6);
double parse_number(const std::string& text);

void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// p, param, level, pair, outcome maxima, guessing probability, min-entropy, certified.
CsvTable results_table(const std::vector<CertificationResult>& results, int digits = 6);
/// bin_low, bin_high, count.
CsvTable histogram_table(const SearchReport& report, int digits = 6);

}  // namespace qrcert
