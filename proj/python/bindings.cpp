#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrcert/certify.hpp"
#include "qrcert/io.hpp"
#include "qrcert/qubit.hpp"
#include "qrcert/search.hpp"
#include "qrcert/tables.hpp"

namespace py = pybind11;
using namespace qrcert;

namespace {

EvalOptions eval_options(std::optional<std::string> level, const std::string& mode, unsigned threads) {
  EvalOptions o;
  if (level) o.level = parse_level(*level);
  o.mode = parse_mode(mode);
  o.threads = threads;
  return o;
}

Party parse_party(const std::string& s) {
  if (s == "alice" || s == "a") return Party::Alice;
  if (s == "bob" || s == "b") return Party::Bob;
  throw Error("party must be 'alice' or 'bob'");
}

py::dict result_dict(const CertificationResult& r) {
  return py::module_::import("json").attr("loads")(to_json(r).dump());
}

}  // namespace

PYBIND11_MODULE(_qrcert, m) {
  m.doc() = "Min-entropy certificates from Bell-operator constraints";

  py::register_exception<Error>(m, "QrcertError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<int, int>(), py::arg("n_alice"), py::arg("n_bob"))
      .def_readonly("n_alice", &Scenario::n_alice)
      .def_readonly("n_bob", &Scenario::n_bob)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; })
      .def("__repr__", [](const Scenario& s) {
        return "Scenario(" + std::to_string(s.n_alice) + ", " + std::to_string(s.n_bob) + ")";
      });

  py::class_<BellOperator>(m, "BellOperator")
      .def(py::init<Scenario>())
      .def(py::init([](const Eigen::MatrixXd& joint) {
             BellOperator op(Scenario(static_cast<int>(joint.rows()), static_cast<int>(joint.cols())));
             op.joint = joint;
             return op;
           }),
           py::arg("joint"))
      .def_readonly("scenario", &BellOperator::scenario)
      .def_readwrite("constant", &BellOperator::constant)
      .def_property(
          "joint", [](const BellOperator& op) { return op.joint; },
          [](BellOperator& op, const Eigen::MatrixXd& j) {
            if (j.rows() != op.joint.rows() || j.cols() != op.joint.cols()) throw Error("joint shape mismatch");
            op.joint = j;
          })
      .def_property(
          "alice_marginal", [](const BellOperator& op) { return op.alice_marginal; },
          [](BellOperator& op, const Eigen::VectorXd& v) {
            if (v.size() != op.alice_marginal.size()) throw Error("marginal size mismatch");
            op.alice_marginal = v;
          })
      .def_property(
          "bob_marginal", [](const BellOperator& op) { return op.bob_marginal; },
          [](BellOperator& op, const Eigen::VectorXd& v) {
            if (v.size() != op.bob_marginal.size()) throw Error("marginal size mismatch");
            op.bob_marginal = v;
          })
      .def("embedded", &BellOperator::embedded)
      .def("to_json", [](const BellOperator& op) { return to_json(op).dump(); })
      .def_static("from_json", [](const std::string& s) { return operator_from_json(Json::parse(s)); })
      .def("__eq__", [](const BellOperator& a, const BellOperator& b) { return a == b; });

  m.def("catalog", [](const std::string& name) { return catalog(name); }, py::arg("name"));
  m.def("catalog_names", &catalog_names);
  m.def("classical_bound", &classical_bound, py::arg("op"));
  m.def("canonical_form", &canonical_form, py::arg("op"));
  m.def("isomorphic", &isomorphic, py::arg("a"), py::arg("b"));
  m.def(
      "quantum_max",
      [](const BellOperator& op, const std::string& level) { return quantum_max(op, parse_level(level)); },
      py::arg("op"), py::arg("level") = "Q2");

  m.def(
      "singlet_correlators",
      [](const std::vector<double>& alice, const std::vector<double>& bob, double p) {
        return singlet_correlations(QubitStrategy::planar(alice, bob, p)).joint;
      },
      py::arg("alice_angles"), py::arg("bob_angles"), py::arg("p") = 1.0,
      "Cor(i, j) of planar measurements on the noisy singlet.");

  m.def("certificate_names", &certificate_names);
  m.def(
      "entropy",
      [](const std::string& cert, double p, std::optional<double> param, std::optional<std::string> level,
         const std::string& mode, std::optional<std::string> local, unsigned threads) {
        const EvalOptions o = eval_options(level, mode, threads);
        const Certificate c = certificate(cert);
        py::gil_scoped_release release;
        const CertificationResult r = local ? local_guessing_probability(c, p, param, parse_party(*local), o)
                                            : guessing_probability(c, p, param, o);
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("certificate"), py::arg("p"), py::arg("param") = py::none(), py::arg("level") = py::none(),
      py::arg("mode") = "eq", py::arg("local") = py::none(), py::arg("threads") = 1,
      "Certified min-entropy of one certificate at noise level p, as a dict.");

  m.def(
      "sweep",
      [](const std::string& cert, const std::vector<double>& ps, std::optional<double> param, bool tune,
         std::optional<std::string> level, const std::string& mode, unsigned threads) {
        const EvalOptions o = eval_options(level, mode, threads);
        ParamPolicy policy = tune ? ParamPolicy::tuned() : param ? ParamPolicy::fixed(*param) : ParamPolicy::none();
        std::vector<CertificationResult> rs;
        {
          py::gil_scoped_release release;
          rs = sweep_noise(certificate(cert), ps, policy, o);
        }
        py::list out;
        for (const auto& r : rs) out.append(result_dict(r));
        return out;
      },
      py::arg("certificate"), py::arg("p"), py::arg("param") = py::none(), py::arg("tune") = false,
      py::arg("level") = py::none(), py::arg("mode") = "eq", py::arg("threads") = 1);

  m.def(
      "tune",
      [](const std::string& cert, double p, int grid, int refine, unsigned threads) {
        EvalOptions o;
        o.threads = threads;
        TuneResult t;
        {
          py::gil_scoped_release release;
          t = tune_parameter(certificate(cert), p, grid, refine, o);
        }
        py::dict d;
        d["best_param"] = t.best_param;
        d["result"] = result_dict(t.result);
        d["grid"] = t.grid;
        return d;
      },
      py::arg("certificate"), py::arg("p"), py::arg("grid") = 0, py::arg("refine") = 30, py::arg("threads") = 1);

  m.def(
      "t3max_given_C", [](double C, const std::string& level) { return t3max_given_C(C, parse_level(level)); },
      py::arg("C"), py::arg("level") = "Q2");

  m.def(
      "search",
      [](int n, std::uint64_t seed, double p, double bin_width, double threshold, unsigned threads) {
        SearchConfig c;
        c.sample_count = n;
        c.seed = seed;
        c.p = p;
        c.bin_width = bin_width;
        c.top_threshold = threshold;
        c.threads = threads;
        c.validate();
        SearchReport r;
        {
          py::gil_scoped_release release;
          r = run_search(c);
        }
        py::dict d = py::module_::import("json").attr("loads")(to_json(r).dump());
        d["entropies"] = r.entropies;
        return d;
      },
      py::arg("n") = 500, py::arg("seed") = 42, py::arg("p") = 0.95, py::arg("bin_width") = 0.05,
      py::arg("threshold") = 0.72, py::arg("threads") = 1);

  m.def(
      "evaluate_operator",
      [](const BellOperator& op, double p, const std::string& level) {
        SearchConfig c;
        c.scenario = op.scenario;
        c.p = p;
        c.level = parse_level(level);
        const OperatorEvaluation e = evaluate_operator(op, c);
        py::dict d;
        d["min_entropy"] = e.min_entropy;
        d["pair"] = py::make_tuple(e.pair.alice, e.pair.bob);
        d["quantum_max"] = e.quantum_max;
        d["classical_bound"] = e.classical_bound;
        d["degenerate"] = e.degenerate;
        d["skipped"] = e.skipped;
        return d;
      },
      py::arg("op"), py::arg("p") = 0.95, py::arg("level") = "Q2",
      "Best-pair min-entropy of a correlator operator constrained to p times its quantum maximum.");

  m.def("table_names", &table_names);
  m.def(
      "generate_table",
      [](const std::string& name, unsigned threads) {
        TableOptions o;
        o.threads = threads;
        GeneratedTable t;
        {
          py::gil_scoped_release release;
          t = generate_table(name, o);
        }
        py::dict d;
        d["name"] = t.name;
        d["columns"] = t.columns;
        d["p"] = t.p;
        py::list cells;
        for (const auto& row : t.cells) {
          py::list r;
          for (const auto& c : row) r.append(c.certified ? py::cast(c.value) : py::none());
          cells.append(r);
        }
        d["values"] = cells;
        py::list pub;
        for (const auto& row : published_table(name).values) pub.append(row);
        d["published"] = pub;
        return d;
      },
      py::arg("name"), py::arg("threads") = 1);
}
