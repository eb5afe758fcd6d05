#include "qrcert/tables.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "qrcert/parallel.hpp"

namespace qrcert {

namespace {

const std::vector<double> kNoise{0.99999, 0.999, 0.95, 0.9, 0.8};

std::vector<PublishedTable> build_published_tables() {
  std::vector<PublishedTable> t;
  t.push_back({"table2", "CHSH: pair and single-party min-entropy", {"global", "local"}, kNoise,
               {{1.21757, 0.99090}, {1.12231, 0.91155}, {0.58411, 0.47234}, {0.37757, 0.30718}, {0.13510, 0.11362}}});
  t.push_back({"table3", "T3 alone versus T3 with CHSH side conditions", {"T3", "T3C"}, kNoise,
               {{1.3294, 1.7871}, {1.2171, 1.4101}, {0.55873, 0.5931}, {0.19515, 0.3072}, {0.0, 0.1136}}});
  t.push_back({"table4",
               "E0E1: entropy-maximising angle phi",
               {"phi"},
               {0.9999999, 0.999999, 0.99999, 0.9999, 0.999, 0.99, 0.95, 0.9, 0.85, 0.8},
               {{0.0252}, {0.0452}, {0.0811}, {0.1460}, {0.2638}, {0.4562}, {0.6179}, {0.6948}, {0.7357}, {0.7617}}});
  t.push_back({"table5", "modified CHSH with and without the auxiliary CHSH condition", {"modCHSH", "modCHSH+"}, kNoise,
               {{1.9764, 1.9764}, {1.7751, 1.7751}, {0.7775, 0.78024}, {0.4365, 0.45443}, {0.0468, 0.1342}}});
  t.push_back({"table6",
               "certificate comparison",
               {"BC3", "BC5", "BC7", "E0E1", "T3C"},
               kNoise,
               {{1.9769, 1.9656, 1.9537, 1.7854, 1.7871},
                {1.7792, 1.6841, 1.5917, 1.4013, 1.4101},
                {0.7885, 0.5534, 0.4258, 0.6484, 0.5931},
                {0.4474, 0.2342, 0.1064, 0.4163, 0.3072},
                {0.0709, 0.0, 0.0, 0.1461, 0.1136}}});
  t.push_back({"table7", "search-derived certificates", {"modCHSH+", "I1", "I2"}, kNoise,
               {{1.9764, 1.9753, 1.9742},
                {1.7751, 1.7649, 1.7558},
                {0.78024, 0.7219, 0.7262},
                {0.45443, 0.3625, 0.3959},
                {0.1342, 0.0, 0.0398}}});
  t.push_back({"table_optc",
               "T3C: entropy-maximising C",
               {"C"},
               {0.999999, 0.99999, 0.9999, 0.999, 0.99, 0.95, 0.9, 0.8},
               {{2.826}, {2.82}, {2.8}, {2.75}, {2.6}, {2.55}, {2.828}, {2.828}}});
  return t;
}

const std::vector<PublishedTable>& published_tables() {
  static const std::vector<PublishedTable> tables = build_published_tables();
  return tables;
}

bool same_p(double a, double b) { return std::abs(a - b) <= 1e-12; }

/// Published parameter for a noise level (angle from table4, C from table_optc).
double published_param(const std::string& table, double p) {
  const auto v = published_table(table).value(p, table == "table4" ? "phi" : "C");
  if (!v) throw Error("no published parameter for p=" + std::to_string(p) + " in " + table);
  return *v;
}

TableCell cell_of(const CertificationResult& r) { return {r.min_entropy, r.certified}; }

using Job = std::function<TableCell()>;

}  // namespace

std::optional<double> PublishedTable::value(double p_value, const std::string& column) const {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!same_p(p[i], p_value)) continue;
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == column) return values[i][c];
  }
  return std::nullopt;
}

std::vector<std::string> table_names() {
  std::vector<std::string> names;
  for (const auto& t : published_tables()) names.push_back(t.name);
  return names;
}

const PublishedTable& published_table(const std::string& name) {
  for (const auto& t : published_tables())
    if (t.name == name) return t;
  throw Error("unknown table '" + name + "'");
}

bool GeneratedTable::all_certified() const {
  for (const auto& row : cells)
    for (const auto& c : row)
      if (!c.certified) return false;
  return true;
}

const TableCell& GeneratedTable::cell(double p_value, const std::string& column) const {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!same_p(p[i], p_value)) continue;
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c] == column) return cells[i][c];
  }
  throw Error("no cell (" + std::to_string(p_value) + ", " + column + ") in " + name);
}

GeneratedTable generate_table(const std::string& name, const TableOptions& options) {
  const PublishedTable& published = published_table(name);
  GeneratedTable out;
  out.name = published.name;
  out.title = published.title;
  out.columns = published.columns;
  out.p = published.p;

  EvalOptions eval;
  eval.solver = options.solver;

  auto entropy = [eval](std::string cert, double p, std::optional<double> param = std::nullopt) -> Job {
    return [=] { return cell_of(guessing_probability(certificate(cert), p, param, eval)); };
  };
  auto tuned = [eval, &options](std::string cert, double p) -> Job {
    return [=] {
      const TuneResult r = tune_parameter(certificate(cert), p, options.grid_points, options.refine_steps, eval);
      return TableCell{r.best_param, r.result.certified};
    };
  };

  std::vector<Job> jobs;
  for (double p : out.p) {
    if (name == "table2") {
      jobs.push_back(entropy("chsh", p));
      jobs.push_back([=] {
        return cell_of(local_guessing_probability(certificate("chsh"), p, std::nullopt, Party::Alice, eval));
      });
    } else if (name == "table3") {
      jobs.push_back(entropy("t3", p));
      jobs.push_back(entropy("t3c", p, published_param("table_optc", p)));
    } else if (name == "table4") {
      jobs.push_back(tuned("e0e1", p));
    } else if (name == "table5") {
      jobs.push_back(entropy("modchsh", p));
      jobs.push_back(entropy("modchsh+", p));
    } else if (name == "table6") {
      jobs.push_back(entropy("bc3", p));
      jobs.push_back(entropy("bc5", p));
      jobs.push_back(entropy("bc7", p));
      jobs.push_back(entropy("e0e1", p, published_param("table4", p)));
      jobs.push_back(entropy("t3c", p, published_param("table_optc", p)));
    } else if (name == "table7") {
      jobs.push_back(entropy("modchsh+", p));
      jobs.push_back(entropy("i1", p));
      jobs.push_back(entropy("i2", p));
    } else if (name == "table_optc") {
      jobs.push_back(tuned("t3c", p));
    }
  }

  std::vector<TableCell> flat(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t k) { flat[k] = jobs[k](); });
  const std::size_t width = out.columns.size();
  for (std::size_t i = 0; i < out.p.size(); ++i)
    out.cells.emplace_back(flat.begin() + i * width, flat.begin() + (i + 1) * width);
  return out;
}

CsvTable table_csv(const GeneratedTable& table, int digits) {
  CsvTable t;
  t.header.push_back("p");
  t.header.insert(t.header.end(), table.columns.begin(), table.columns.end());
  for (std::size_t i = 0; i < table.p.size(); ++i) {
    std::vector<std::string> row{format_number(table.p[i], 12)};
    for (const auto& c : table.cells[i]) {
      row.push_back(c.certified ? format_number(c.value, digits) : "nan");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double default_tolerance(const std::string& table) {
  if (table == "table4") return 0.02;
  if (table == "table_optc") return 0.05;
  return 1e-2;
}

std::vector<DiffRow> diff_against_published(const GeneratedTable& table, std::optional<double> tolerance) {
  const PublishedTable& ref = published_table(table.name);
  const double tol = tolerance.value_or(default_tolerance(table.name));
  std::vector<DiffRow> rows;
  for (std::size_t i = 0; i < table.p.size(); ++i) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto published = ref.value(table.p[i], table.columns[c]);
      if (!published) continue;
      DiffRow r;
      r.table = table.name;
      r.p = table.p[i];
      r.column = table.columns[c];
      r.published = *published;
      const TableCell& cell = table.cells[i][c];
      r.computed = cell.value;
      if (!cell.certified) {
        r.deviation = std::numeric_limits<double>::quiet_NaN();
        r.status = "uncertified";
      } else {
        r.deviation = cell.value - *published;
        r.status = std::abs(r.deviation) <= tol ? "ok" : "warn";
      }
      rows.push_back(r);
    }
  }
  return rows;
}

CsvTable diff_csv(const std::vector<DiffRow>& rows, int digits) {
  CsvTable t;
  t.header = {"table", "p", "column", "computed", "published", "deviation", "status"};
  for (const auto& r : rows) {
    t.rows.push_back({r.table, format_number(r.p, 12), r.column,
                      r.status == "uncertified" ? "nan" : format_number(r.computed, digits),
                      format_number(r.published, digits), format_number(r.deviation, digits), r.status});
  }
  return t;
}

}  // namespace qrcert
