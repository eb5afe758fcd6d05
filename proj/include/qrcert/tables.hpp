#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrcert/certify.hpp"
#include "qrcert/io.hpp"

namespace qrcert {

/// Published values, row-major over (p, column).
struct PublishedTable {
  std::string name;
  std::string title;
  std::vector<std::string> columns;
  std::vector<double> p;
  std::vector<std::vector<double>> values;

  std::optional<double> value(double p_value, const std::string& column) const;
};

/// table2 ... table7 and table_optc.
std::vector<std::string> table_names();
const PublishedTable& published_table(const std::string& name);

struct TableCell {
  double value = 0.0;
  bool certified = false;
};

struct GeneratedTable {
  std::string name;
  std::string title;
  std::vector<std::string> columns;
  std::vector<double> p;
  std::vector<std::vector<TableCell>> cells;

  bool all_certified() const;
  const TableCell& cell(double p_value, const std::string& column) const;
};

struct TableOptions {
  SolverOptions solver;
  unsigned threads = 1;
  /// Grid and refinement for the tuned tables (table4, table_optc).
  int grid_points = 0;
  int refine_steps = 30;
};

/// Fresh solves laid out like the published table. The E0E1 and T3C entries
/// of table3/table6 use the published angles and C values as fixed parameters.
GeneratedTable generate_table(const std::string& name, const TableOptions& options = {});

CsvTable table_csv(const GeneratedTable& table, int digits = 6);

struct DiffRow {
  std::string table;
  double p = 0.0;
  std::string column;
  double computed = 0.0;
  double published = 0.0;
  double deviation = 0.0;
  std::string status;  // ok, warn, uncertified
};

/// Default ok/warn threshold: 0.02 rad for table4, 0.05 for table_optc, 0.01 bits otherwise.
double default_tolerance(const std::string& table);

/// Deviations beyond the tolerance are reported as warn; they never fail the run.
std::vector<DiffRow> diff_against_published(const GeneratedTable& table, std::optional<double> tolerance = std::nullopt);
CsvTable diff_csv(const std::vector<DiffRow>& rows, int digits = 6);

}  // namespace qrcert
