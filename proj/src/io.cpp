#include "qrcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrcert {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from(const Json& j, int expected, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != expected) {
    throw Error(std::string(what) + " must be an array of " + std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (int i = 0; i < expected; ++i) v[i] = j[i].get<double>();
  return v;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string pair_text(const SettingsPair& p) { return std::to_string(p.alice) + ":" + std::to_string(p.bob); }

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\n\r") != std::string::npos; }

}  // namespace

Json to_json(const BellOperator& op) {
  Json joint = Json::array();
  for (int a = 0; a < op.joint.rows(); ++a) {
    Json row = Json::array();
    for (int b = 0; b < op.joint.cols(); ++b) row.push_back(op.joint(a, b));
    joint.push_back(row);
  }
  return {{"n_alice", op.scenario.n_alice},
          {"n_bob", op.scenario.n_bob},
          {"constant", op.constant},
          {"alice_marginal", vector_json(op.alice_marginal)},
          {"bob_marginal", vector_json(op.bob_marginal)},
          {"joint", joint}};
}

BellOperator operator_from_json(const Json& j) {
  try {
    const Scenario s(j.at("n_alice").get<int>(), j.at("n_bob").get<int>());
    BellOperator op(s);
    op.constant = j.value("constant", 0.0);
    if (j.contains("alice_marginal")) op.alice_marginal = vector_from(j["alice_marginal"], s.n_alice, "alice_marginal");
    if (j.contains("bob_marginal")) op.bob_marginal = vector_from(j["bob_marginal"], s.n_bob, "bob_marginal");
    const Json& joint = j.at("joint");
    if (!joint.is_array() || static_cast<int>(joint.size()) != s.n_alice) {
      throw Error("joint must have n_alice rows");
    }
    for (int a = 0; a < s.n_alice; ++a) {
      const Eigen::VectorXd row = vector_from(joint[a], s.n_bob, "joint row");
      op.joint.row(a) = row.transpose();
    }
    return op;
  } catch (const Json::exception& e) {
    throw Error(std::string("bad operator JSON: ") + e.what());
  }
}

BellOperator load_operator(const std::string& path) {
  try {
    return operator_from_json(Json::parse(read_file(path)));
  } catch (const Json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

Json to_json(const CertificationResult& r) {
  Json statuses = Json::array();
  for (auto s : r.statuses) statuses.push_back(to_string(s));
  Json maxima = Json::array();
  for (double m : r.outcome_maxima) maxima.push_back(number_or_null(m));
  Json out{{"certificate", r.certificate},
           {"p", r.p},
           {"level", to_string(r.level)},
           {"pair", {r.pair.alice, r.pair.bob}},
           {"local", r.local},
           {"outcome_maxima", maxima},
           {"statuses", statuses},
           {"guessing_probability", number_or_null(r.guessing_probability)},
           {"min_entropy", number_or_null(r.min_entropy)},
           {"certified", r.certified}};
  out["param"] = r.param ? Json(*r.param) : Json(nullptr);
  return out;
}

Json to_json(const SearchReport& report) {
  Json top = Json::array();
  for (const auto& t : report.top_classes) {
    top.push_back({{"operator", to_json(t.canonical)},
                   {"instances", t.instances},
                   {"min_entropy", t.min_entropy},
                   {"pair", {t.pair.alice, t.pair.bob}},
                   {"quantum_max", t.quantum_max},
                   {"classical_bound", t.classical_bound}});
  }
  Json bins = Json::array();
  for (std::size_t k = 0; k < report.histogram.size(); ++k) {
    bins.push_back({{"low", k * report.bin_width}, {"high", (k + 1) * report.bin_width}, {"count", report.histogram[k]}});
  }
  return {{"seed", report.config.seed},
          {"p", report.config.p},
          {"level", to_string(report.config.level)},
          {"sample_count", report.sample_count},
          {"evaluated", report.evaluated},
          {"degenerate", report.degenerate},
          {"skipped", report.skipped},
          {"distinct_classes", report.distinct_classes},
          {"top_threshold", report.config.top_threshold},
          {"histogram", bins},
          {"top_classes", top}};
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw Error("no column '" + name + "'");
  return parse_number(rows.at(row).at(c));
}

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", std::max(1, digits), value);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "nan" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error("not a number: '" + text + "'");
  }
  if (used != text.size()) throw Error("not a number: '" + text + "'");
  return v;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      if (needs_quotes(cells[i])) {
        out << '"';
        for (char ch : cells[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << cells[i];
      }
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        cells.push_back(std::move(cell));
        lines.push_back(std::move(cells));
      }
      cells.clear();
      cell.clear();
      any = false;
    } else {
      cell += ch;
      any = true;
    }
  }
  if (quoted) throw Error("unterminated quote in CSV");
  if (any || !cell.empty()) {
    cells.push_back(std::move(cell));
    lines.push_back(std::move(cells));
  }
  if (lines.empty()) throw Error("empty CSV");
  CsvTable t;
  t.header = std::move(lines.front());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != t.header.size()) {
      throw Error("CSV row " + std::to_string(i) + " has " + std::to_string(lines[i].size()) + " cells, expected " +
                  std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(lines[i]));
  }
  return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable results_table(const std::vector<CertificationResult>& results, int digits) {
  CsvTable t;
  const bool local = !results.empty() && results.front().local;
  t.header = {"certificate", "p", "param", "level", "pair"};
  if (local) {
    t.header.insert(t.header.end(), {"max_plus", "max_minus"});
  } else {
    t.header.insert(t.header.end(), {"max_pp", "max_pm", "max_mp", "max_mm"});
  }
  t.header.insert(t.header.end(), {"guessing_probability", "min_entropy", "certified"});
  for (const auto& r : results) {
    std::vector<std::string> row{r.certificate, format_number(r.p, digits),
                                 r.param ? format_number(*r.param, digits) : "", to_string(r.level), pair_text(r.pair)};
    for (double m : r.outcome_maxima) row.push_back(format_number(m, digits));
    row.push_back(format_number(r.guessing_probability, digits));
    row.push_back(format_number(r.min_entropy, digits));
    row.push_back(r.certified ? "1" : "0");
    if (row.size() != t.header.size()) throw Error("mixed local and pair results in one table");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable histogram_table(const SearchReport& report, int digits) {
  CsvTable t;
  t.header = {"bin_low", "bin_high", "count"};
  for (std::size_t k = 0; k < report.histogram.size(); ++k) {
    t.rows.push_back({format_number(k * report.bin_width, digits), format_number((k + 1) * report.bin_width, digits),
                      std::to_string(report.histogram[k])});
  }
  return t;
}

}  // namespace qrcert
