// qrcert: certified quantum maxima, min-entropy runs, sweeps, tuning, search and table emission.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "qrcert/certify.hpp"
#include "qrcert/io.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/search.hpp"
#include "qrcert/tables.hpp"

namespace {

using namespace qrcert;

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string level;
  std::string mode = "eq";
  std::string format = "csv";
  std::string out;
  int digits = 6;
  int threads = 0;

  unsigned thread_count() const { return threads > 0 ? static_cast<unsigned>(threads) : default_threads(); }
};

void add_common(CLI::App* cmd, Common& c, bool with_mode = true) {
  cmd->add_option("--level", c.level, "NPA level: q1, q1+ab, q2 (default: the certificate's)");
  if (with_mode) cmd->add_option("--mode", c.mode, "constraint relation: eq or geq")->check(CLI::IsMember({"eq", "geq"}));
  cmd->add_option("--format", c.format, "csv, json or pretty")->check(CLI::IsMember({"csv", "json", "pretty"}));
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_option("--digits", c.digits, "significant digits in CSV output")->check(CLI::Range(1, 17));
  cmd->add_option("--threads", c.threads, "worker threads (default: QRCERT_THREADS or hardware)");
}

/// "0.8,0.9,0.95" or "lo:hi:n" (n evenly spaced points, both ends included).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    const double lo = parse_number(text.substr(0, a));
    const double hi = parse_number(text.substr(a + 1, b - a - 1));
    const int n = std::stoi(text.substr(b + 1));
    if (n < 1) throw UsageError("grid needs at least one point");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    if (n > 1) out.back() = hi;
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const Error&) {
      throw UsageError("bad number '" + item + "' in list");
    }
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file(c.out, text);
  }
}

std::string pretty_results(const std::vector<CertificationResult>& results, int digits) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << r.certificate << "  p=" << format_number(r.p, 12);
    if (r.param) os << "  param=" << format_number(*r.param, digits);
    os << "  level=" << to_string(r.level) << "  pair=(" << r.pair.alice << "," << r.pair.bob << ")"
       << (r.local ? " local" : "") << "\n  H_min=" << format_number(r.min_entropy, digits)
       << " bits  P_guess=" << format_number(r.guessing_probability, digits) << "  ";
    os << (r.certified ? "certified" : "NOT certified") << "  [";
    for (std::size_t k = 0; k < r.statuses.size(); ++k) os << (k ? " " : "") << to_string(r.statuses[k]);
    os << "]\n";
  }
  return os.str();
}

std::string render_results(const Common& c, const std::vector<CertificationResult>& results) {
  if (c.format == "json") {
    Json j = Json::array();
    for (const auto& r : results) j.push_back(to_json(r));
    return j.dump(2) + "\n";
  }
  if (c.format == "pretty") return pretty_results(results, c.digits);
  return to_csv(results_table(results, c.digits));
}

int report_failures(const std::vector<CertificationResult>& results) {
  int status = kOk;
  for (const auto& r : results) {
    if (r.certified) continue;
    std::cerr << "qrcert: solve not Optimal for " << r.certificate << " at p=" << format_number(r.p, 12);
    if (r.param) std::cerr << " param=" << format_number(*r.param, 8);
    std::cerr << "\n";
    status = kSolverFailure;
  }
  return status;
}

EvalOptions eval_options(const Common& c) {
  EvalOptions e;
  if (!c.level.empty()) e.level = parse_level(c.level);
  e.mode = parse_mode(c.mode);
  e.threads = c.thread_count();
  return e;
}

struct ParamFlags {
  std::optional<double> param, phi, C;

  void add(CLI::App* cmd) {
    cmd->add_option("--param", param, "certificate parameter (phi or C)");
    cmd->add_option("--phi", phi, "E0E1 angle");
    cmd->add_option("--C", C, "T3C side-condition level");
  }
  std::optional<double> value(const Certificate& cert) const {
    const int given = param.has_value() + phi.has_value() + C.has_value();
    if (given > 1) throw UsageError("give at most one of --param, --phi, --C");
    if (!cert.param) {
      if (given) throw UsageError("certificate '" + cert.name + "' takes no parameter");
      return std::nullopt;
    }
    if (phi && cert.param->name != "phi") throw UsageError("--phi applies to e0e1 only");
    if (C && cert.param->name != "C") throw UsageError("--C applies to t3c only");
    if (param) return param;
    if (phi) return phi;
    return C;
  }
};

BellOperator resolve_operator(const std::string& name, const std::string& file) {
  if (!name.empty() && !file.empty()) throw UsageError("give --op or --op-file, not both");
  if (!file.empty()) return load_operator(file);
  if (name.empty()) throw UsageError("one of --op, --op-file or --cert is required");
  return catalog(name);
}

int cmd_maxval(const std::string& op_name, const std::string& op_file, const std::string& cert_name,
               const Common& c) {
  std::vector<std::pair<std::string, BellOperator>> ops;
  std::optional<Level> level;
  if (!c.level.empty()) level = parse_level(c.level);
  if (!cert_name.empty()) {
    if (!op_name.empty() || !op_file.empty()) throw UsageError("give --cert or an operator, not both");
    const Certificate cert = certificate(cert_name);
    if (!level) level = cert.level;
    const double param = cert.param ? cert.param->lo : 0.0;
    int k = 0;
    for (const auto& bc : cert.constraints(1.0, param, *level)) {
      if (bc.relation == Relation::Target) ops.emplace_back(cert.name + "#" + std::to_string(++k), bc.op);
    }
  } else {
    ops.emplace_back(op_file.empty() ? op_name : op_file, resolve_operator(op_name, op_file));
  }
  const Level lv = level.value_or(Level::Q2);

  CsvTable t;
  t.header = {"operator", "level", "quantum_max", "primal_value", "classical_bound", "status"};
  Json j = Json::array();
  int status = kOk;
  for (const auto& [label, op] : ops) {
    const SdpSolution sol = quantum_max_solution(op, lv);
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (sol.optimal()) {
      SdpProblem problem;
      problem.structure = shared_structure(op.scenario, lv);
      problem.objective = functional_from_operator(*problem.structure, op);
      bound = certify_bound(problem, sol);
    } else {
      status = kSolverFailure;
      std::cerr << "qrcert: maximum of " << label << " ended " << to_string(sol.status) << "\n";
    }
    const double classical = classical_bound(op);
    t.rows.push_back({label, to_string(lv), format_number(bound, c.digits), format_number(sol.objective_value, c.digits),
                      format_number(classical, c.digits), to_string(sol.status)});
    j.push_back({{"operator", label},
                 {"level", to_string(lv)},
                 {"quantum_max", std::isfinite(bound) ? Json(bound) : Json(nullptr)},
                 {"primal_value", sol.objective_value},
                 {"classical_bound", classical},
                 {"status", to_string(sol.status)},
                 {"iterations", sol.iterations}});
  }
  if (c.format == "json") {
    emit(c, j.dump(2) + "\n");
  } else if (c.format == "pretty") {
    std::ostringstream os;
    for (const auto& row : t.rows) os << row[0] << " at " << row[1] << ": " << row[2] << " (" << row[5] << ")\n";
    emit(c, os.str());
  } else {
    emit(c, to_csv(t));
  }
  return status;
}

int cmd_entropy(const std::string& cert_name, const std::vector<double>& ps, const ParamFlags& pf,
                const std::string& local, const Common& c) {
  const Certificate cert = certificate(cert_name);
  const auto param = pf.value(cert);
  if (cert.param && !param) throw UsageError("certificate '" + cert.name + "' needs --" + cert.param->name);
  const EvalOptions e = eval_options(c);
  std::vector<CertificationResult> results(ps.size());
  EvalOptions inner = e;
  inner.threads = 1;
  parallel_for(ps.size(), e.threads, [&](std::size_t i) {
    if (local.empty()) {
      results[i] = guessing_probability(cert, ps[i], param, inner);
    } else {
      results[i] = local_guessing_probability(cert, ps[i], param, local == "alice" ? Party::Alice : Party::Bob, inner);
    }
  });
  emit(c, render_results(c, results));
  return report_failures(results);
}

int cmd_sweep(const std::string& cert_name, const std::vector<double>& ps, const ParamFlags& pf,
              const std::string& param_grid, bool tune, int grid, int refine, const Common& c) {
  const Certificate cert = certificate(cert_name);
  const EvalOptions e = eval_options(c);
  std::vector<CertificationResult> results;
  if (!param_grid.empty()) {
    if (!cert.param) throw UsageError("certificate '" + cert.name + "' takes no parameter");
    if (tune || pf.value(cert)) throw UsageError("--param-grid excludes --tune and a fixed parameter");
    const auto xs = parse_grid(param_grid);
    results.resize(ps.size() * xs.size());
    EvalOptions inner = e;
    inner.threads = 1;
    parallel_for(results.size(), e.threads, [&](std::size_t k) {
      results[k] = guessing_probability(cert, ps[k / xs.size()], xs[k % xs.size()], inner);
    });
  } else {
    ParamPolicy policy;
    const auto fixed = pf.value(cert);
    if (tune && fixed) throw UsageError("--tune excludes a fixed parameter");
    if (tune) {
      if (!cert.param) throw UsageError("certificate '" + cert.name + "' has nothing to tune");
      policy = ParamPolicy::tuned(grid, refine);
    } else if (fixed) {
      policy = ParamPolicy::fixed(*fixed);
    } else if (cert.param) {
      throw UsageError("certificate '" + cert.name + "' needs --" + cert.param->name + ", --param-grid or --tune");
    }
    results = sweep_noise(cert, ps, policy, e);
  }
  emit(c, render_results(c, results));
  return report_failures(results);
}

int cmd_tune(const std::string& cert_name, const std::vector<double>& ps, int grid, int refine, const Common& c) {
  const Certificate cert = certificate(cert_name);
  if (!cert.param) throw UsageError("certificate '" + cert.name + "' has nothing to tune");
  const EvalOptions e = eval_options(c);
  std::vector<TuneResult> tuned;
  for (double p : ps) tuned.push_back(tune_parameter(cert, p, grid, refine, e));

  std::vector<CertificationResult> results;
  for (const auto& t : tuned) results.push_back(t.result);
  if (c.format == "csv") {
    CsvTable t;
    t.header = {"p", cert.param->name, "min_entropy", "guessing_probability", "certified"};
    for (const auto& r : tuned) {
      t.rows.push_back({format_number(r.result.p, 12), format_number(r.best_param, c.digits),
                        format_number(r.result.min_entropy, c.digits),
                        format_number(r.result.guessing_probability, c.digits), r.result.certified ? "1" : "0"});
    }
    emit(c, to_csv(t));
  } else {
    emit(c, render_results(c, results));
  }
  return report_failures(results);
}

int cmd_search(SearchConfig cfg, const std::string& json_path, const Common& c) {
  if (!c.level.empty()) cfg.level = parse_level(c.level);
  cfg.threads = c.thread_count();
  cfg.validate();
  const SearchReport report = run_search(cfg);
  if (c.format == "json") {
    emit(c, to_json(report).dump(2) + "\n");
  } else if (c.format == "pretty") {
    std::ostringstream os;
    os << "samples " << report.sample_count << ", evaluated " << report.evaluated << " (degenerate "
       << report.degenerate << "), skipped " << report.skipped << ", classes " << report.distinct_classes << "\n";
    for (std::size_t k = 0; k < report.histogram.size(); ++k) {
      if (report.histogram[k] == 0) continue;
      os << "[" << format_number(k * report.bin_width, 4) << ", " << format_number((k + 1) * report.bin_width, 4)
         << ") " << report.histogram[k] << "\n";
    }
    for (const auto& t : report.top_classes) {
      os << "top class: H_min=" << format_number(t.min_entropy, c.digits) << " instances=" << t.instances
         << " pair=(" << t.pair.alice << "," << t.pair.bob << ")\n";
    }
    emit(c, os.str());
  } else {
    emit(c, to_csv(histogram_table(report, c.digits)));
  }
  if (!json_path.empty()) write_file(json_path, to_json(report).dump(2) + "\n");
  return report.skipped > 0 ? kSolverFailure : kOk;
}

int cmd_tables(const std::vector<std::string>& only, const std::string& out_dir, int grid, int refine,
               const Common& c) {
  std::vector<std::string> names = only.empty() ? table_names() : only;
  for (const auto& n : names) published_table(n);  // validate before solving
  std::filesystem::create_directories(out_dir);
  TableOptions opts;
  opts.threads = c.thread_count();
  opts.grid_points = grid;
  opts.refine_steps = refine;
  std::vector<DiffRow> diff;
  int status = kOk;
  for (const auto& n : names) {
    const GeneratedTable t = generate_table(n, opts);
    write_file((std::filesystem::path(out_dir) / (n + ".csv")).string(), to_csv(table_csv(t, c.digits)));
    const auto rows = diff_against_published(t);
    diff.insert(diff.end(), rows.begin(), rows.end());
    int warn = 0, bad = 0;
    for (const auto& r : rows) {
      warn += r.status == "warn";
      bad += r.status == "uncertified";
    }
    std::cout << n << ": " << rows.size() << " cells, " << warn << " beyond tolerance, " << bad << " uncertified\n";
    if (bad) status = kSolverFailure;
  }
  write_file((std::filesystem::path(out_dir) / "diff.csv").string(), to_csv(diff_csv(diff, c.digits)));
  for (const auto& r : diff) {
    if (r.status == "warn") {
      std::cerr << "warning: " << r.table << " p=" << format_number(r.p, 12) << " " << r.column << " computed "
                << format_number(r.computed, 6) << " published " << format_number(r.published, 6) << "\n";
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device-independent min-entropy bounds from Bell-operator constraints"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  std::string op_name, op_file, cert_name, p_text = "0.95", local, param_grid, json_path, out_dir = "tables";
  ParamFlags pf;
  bool tune = false;
  int grid = 0, refine = 30;
  std::vector<std::string> only;
  SearchConfig search_cfg;

  auto* maxval = app.add_subcommand("maxval", "certified quantum maximum of an operator");
  maxval->add_option("--op", op_name, "catalog operator name");
  maxval->add_option("--op-file", op_file, "operator JSON file");
  maxval->add_option("--cert", cert_name, "certificate whose target operators are maximised");
  add_common(maxval, common, false);

  auto* entropy = app.add_subcommand("entropy", "certified min-entropy at one or more noise levels");
  entropy->add_option("--cert", cert_name, "certificate name")->required();
  entropy->add_option("--p", p_text, "noise level(s): list or lo:hi:n");
  entropy->add_option("--local", local, "single-party guessing for alice or bob")
      ->check(CLI::IsMember({"alice", "bob"}));
  pf.add(entropy);
  add_common(entropy, common);

  auto* sweep = app.add_subcommand("sweep", "min-entropy over noise levels and parameter grids");
  sweep->add_option("--cert", cert_name, "certificate name")->required();
  sweep->add_option("--p", p_text, "noise level(s): list or lo:hi:n");
  sweep->add_option("--param-grid", param_grid, "parameter grid: list or lo:hi:n");
  sweep->add_flag("--tune", tune, "tune the parameter at each noise level");
  sweep->add_option("--grid", grid, "tuning grid points (default: certificate's)");
  sweep->add_option("--refine", refine, "golden-section steps");
  pf.add(sweep);
  add_common(sweep, common);

  auto* tune_cmd = app.add_subcommand("tune", "entropy-maximising certificate parameter");
  tune_cmd->add_option("--cert", cert_name, "certificate name")->required();
  tune_cmd->add_option("--p", p_text, "noise level(s): list or lo:hi:n");
  tune_cmd->add_option("--grid", grid, "grid points (default: certificate's)");
  tune_cmd->add_option("--refine", refine, "golden-section steps");
  add_common(tune_cmd, common);

  auto* search = app.add_subcommand("search", "randomised search over correlator operators");
  search->add_option("--n", search_cfg.sample_count, "number of sampled operators");
  search->add_option("--seed", search_cfg.seed, "PRNG seed");
  search->add_option("--p", search_cfg.p, "noise level");
  search->add_option("--bin-width", search_cfg.bin_width, "histogram bin width in bits");
  search->add_option("--threshold", search_cfg.top_threshold, "top-class entropy threshold");
  search->add_option("--json", json_path, "also write the full report as JSON here");
  add_common(search, common, false);

  auto* tables = app.add_subcommand("tables", "regenerate the result tables and a diff against published values");
  tables->add_option("--only", only, "subset of tables")->delimiter(',');
  tables->add_option("--out-dir", out_dir, "output directory");
  tables->add_option("--grid", grid, "tuning grid points for tuned tables");
  tables->add_option("--refine", refine, "golden-section steps for tuned tables");
  add_common(tables, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*maxval) return cmd_maxval(op_name, op_file, cert_name, common);
    if (*entropy) return cmd_entropy(cert_name, parse_grid(p_text), pf, local, common);
    if (*sweep) return cmd_sweep(cert_name, parse_grid(p_text), pf, param_grid, tune, grid, refine, common);
    if (*tune_cmd) return cmd_tune(cert_name, parse_grid(p_text), grid, refine, common);
    if (*search) return cmd_search(search_cfg, json_path, common);
    if (*tables) return cmd_tables(only, out_dir, grid, refine, common);
  } catch (const SolverFailure& e) {
    std::cerr << "qrcert: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const Error& e) {
    std::cerr << "qrcert: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qrcert: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsage;
}
