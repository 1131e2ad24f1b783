// Python surface of the workbench.  Formulas and models cross as thin
// wrappers; everything that already has a JSON document shape (derivations,
// verdicts, bisimilarity tables, experiment reports) crosses as a JSON
// string, so Python sees exactly the documents the CLI emits.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "dtl/bisim.hpp"
#include "dtl/experiments.hpp"
#include "dtl/formula.hpp"
#include "dtl/gallery.hpp"
#include "dtl/model.hpp"
#include "dtl/proof.hpp"
#include "dtl/report.hpp"
#include "dtl/selftest.hpp"
#include "json.hpp"

namespace py = pybind11;

namespace {

dtl::SchemaName family_from_name(const std::string& name) {
  static const std::map<std::string, dtl::SchemaName> table = {
      {"cycle", dtl::SchemaName::Cycle},   {"start", dtl::SchemaName::Start},
      {"bundle", dtl::SchemaName::Bundle}, {"tangle", dtl::SchemaName::TangleFamily},
      {"trouble", dtl::SchemaName::Trouble}, {"eta", dtl::SchemaName::Eta},
      {"cont", dtl::SchemaName::Cont}};
  auto it = table.find(name);
  if (it == table.end())
    throw std::invalid_argument("unknown formula family: " + name);
  return it->second;
}

std::vector<std::string> set_names(const dtl::DynModel& m, const dtl::PointSet& s) {
  std::vector<std::string> names;
  s.for_each([&](int x) { names.push_back(m.name(x)); });
  return names;
}

}  // namespace

PYBIND11_MODULE(_dtl, m) {
  m.doc() =
      "Dynamic topological logic workbench: formulas, finite dynamic preorder "
      "models, stratified bisimilarity, the model gallery, derivation "
      "production and checking, and the experiment drivers.";

  py::class_<dtl::Formula>(m, "Formula")
      .def_static("parse", [](const std::string& text) { return dtl::Formula::parse(text); })
      .def("__str__", &dtl::Formula::str)
      .def("__repr__",
           [](const dtl::Formula& f) { return "Formula.parse(\"" + f.str() + "\")"; })
      .def("__eq__",
           [](const dtl::Formula& a, const dtl::Formula& b) { return a == b; })
      .def("__hash__", &dtl::Formula::hash)
      .def("depth", &dtl::Formula::depth)
      .def("width", &dtl::Formula::width);

  m.def("build_schema",
        [](const std::string& family, int k, int i) {
          return dtl::build_schema(family_from_name(family), k, i);
        },
        py::arg("family"), py::arg("k"), py::arg("i") = 0,
        "Named formula family: cycle, start, bundle, tangle, trouble, eta or "
        "cont, indexed by k (start also takes i).");

  py::class_<dtl::DynModel>(m, "Model")
      .def_static("from_text",
                  [](const std::string& text) { return dtl::DynModel::from_text(text); })
      .def("to_json", [](const dtl::DynModel& mm) { return mm.to_json().dump(); })
      .def("to_dot", &dtl::DynModel::to_dot)
      .def("size", &dtl::DynModel::size)
      .def("point_names", &dtl::DynModel::point_names)
      .def("has_fmap", &dtl::DynModel::has_fmap)
      .def("holds",
           [](const dtl::DynModel& mm, const std::string& point, const dtl::Formula& f) {
             return mm.holds(point, f);
           })
      .def("valid_on", &dtl::DynModel::valid_on)
      .def("extension",
           [](const dtl::DynModel& mm, const dtl::Formula& f) {
             return set_names(mm, mm.eval(f));
           },
           "Names of the points satisfying the formula.")
      .def("continuity_check",
           [](const dtl::DynModel& mm) {
             std::vector<std::pair<std::string, std::string>> pairs;
             for (auto [x, y] : mm.continuity_check())
               pairs.emplace_back(mm.name(x), mm.name(y));
             return pairs;
           },
           "Pairs x <= y whose images break monotonicity; empty iff continuous.");

  m.def("gen_A", &dtl::gen_A, py::arg("N"), py::arg("K"));
  m.def("gen_B", &dtl::gen_B, py::arg("N"), py::arg("K"));
  m.def("gen_C", &dtl::gen_C, py::arg("K"));
  m.def("gen_D", &dtl::gen_D, py::arg("N"), py::arg("K"));
  m.def("gen_random_model", &dtl::gen_random_model, py::arg("seed"),
        py::arg("points"), py::arg("clusters"), py::arg("atoms"),
        py::arg("continuous"));

  py::class_<dtl::BisimTable>(m, "BisimTable")
      .def("max_rank", &dtl::BisimTable::max_rank)
      .def("related",
           [](const dtl::BisimTable& t, int rank, const std::string& left,
              const std::string& right) {
             return t.related(rank, t.left().index_of(left),
                              t.right().index_of(right));
           },
           py::arg("rank"), py::arg("left"), py::arg("right"))
      .def("to_json", [](const dtl::BisimTable& t) { return t.to_json().dump(); });

  m.def("compute_bisim", &dtl::compute_bisim, py::arg("left"), py::arg("right"),
        py::arg("max_rank"), py::arg("width") = dtl::kUnbounded);

  m.def("derive_trouble",
        [](int k) { return dtl::derive_trouble(k).to_json().dump(); }, py::arg("k"),
        "Derivation document for the arity-k trouble formula.");
  m.def("check_derivation",
        [](const std::string& doc, int width_cap, int depth_cap, bool l1_only) {
          dtl::Derivation d = dtl::Derivation::from_json(nlohmann::json::parse(doc));
          return dtl::check_derivation(d, {width_cap, depth_cap, l1_only})
              .to_json()
              .dump();
        },
        py::arg("derivation"), py::arg("width_cap") = dtl::kNoCap,
        py::arg("depth_cap") = dtl::kNoCap, py::arg("l1_only") = false,
        "Verdict document for a derivation document under the given caps.");

  m.def("experiment_separation",
        [](int k, int n, std::uint64_t seed) {
          return dtl::cmd_experiment_separation(k, n, seed).to_json().dump();
        },
        py::arg("k"), py::arg("n"), py::arg("seed") = 0);
  m.def("experiment_expressiveness",
        [](int k, int n) {
          return dtl::cmd_experiment_expressiveness(k, n).to_json().dump();
        },
        py::arg("k"), py::arg("n"));
  m.def("run_selftest", [] {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const dtl::ExperimentReport& r : dtl::run_selftest())
      doc.push_back(r.to_json());
    return doc.dump();
  });
}
