// Command-line workbench.  Subcommands cover model export (gen), per-point
// satisfaction tables (check), bisimulation tables (bisim), derivation
// production and checking (prove, verify), the width-stratified definability
// oracle (oracle width-definable), the experiment drivers (experiment
// separation | expressiveness) and the module invariant suites (selftest).
//
// Machine documents are JSON; commands whose default output is a human
// summary switch to the JSON document with --json.  --out redirects the
// primary output to a file.  Exit codes: 0 pass/accept/valid, 1 refuted or
// rejected, 2 usage or input error.
//
// Models are named either by a gallery designator -- A(N,K), B(N,K), C(K),
// D(N,K) -- or by a path to a model JSON file.  Formulas are either ASCII
// formula text or a family designator: cycle(k), start(k,i), bundle(k),
// tangle(k), trouble(k), eta(k), cont(k).

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtl/bisim.hpp"
#include "dtl/experiments.hpp"
#include "dtl/formula.hpp"
#include "dtl/gallery.hpp"
#include "dtl/model.hpp"
#include "dtl/proof.hpp"
#include "dtl/report.hpp"
#include "dtl/selftest.hpp"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;

// Splits "name(a,b,...)" into a name and integer arguments; nullopt when the
// text does not have that shape (then it is formula text or a file path).
std::optional<std::vector<int>> parse_call(const std::string& text,
                                           std::string& name_out) {
  auto open = text.find('(');
  if (open == std::string::npos || text.empty() || text.back() != ')')
    return std::nullopt;
  std::string name = text.substr(0, open);
  if (name.empty() ||
      !std::all_of(name.begin(), name.end(),
                   [](unsigned char c) { return std::isalpha(c); }))
    return std::nullopt;
  std::vector<int> args;
  std::string body = text.substr(open + 1, text.size() - open - 2);
  std::stringstream parts(body);
  std::string piece;
  while (std::getline(parts, piece, ',')) {
    try {
      std::size_t used = 0;
      int value = std::stoi(piece, &used);
      if (used != piece.size()) return std::nullopt;
      args.push_back(value);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (args.empty()) return std::nullopt;
  name_out = name;
  return args;
}

dtl::DynModel load_model(const std::string& spec) {
  std::string name;
  if (auto args = parse_call(spec, name); args && name.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(name[0]))) {
      case 'A':
        if (args->size() == 2) return dtl::gen_A((*args)[0], (*args)[1]);
        break;
      case 'B':
        if (args->size() == 2) return dtl::gen_B((*args)[0], (*args)[1]);
        break;
      case 'C':
        if (args->size() == 1) return dtl::gen_C((*args)[0]);
        break;
      case 'D':
        if (args->size() == 2) return dtl::gen_D((*args)[0], (*args)[1]);
        break;
      default:
        break;
    }
    throw std::invalid_argument("unknown model designator: " + spec);
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open model file: " + spec);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return dtl::DynModel::from_text(buffer.str());
}

dtl::Formula load_formula(const std::string& text) {
  static const std::map<std::string, dtl::SchemaName> families = {
      {"cycle", dtl::SchemaName::Cycle},   {"start", dtl::SchemaName::Start},
      {"bundle", dtl::SchemaName::Bundle}, {"tangle", dtl::SchemaName::TangleFamily},
      {"trouble", dtl::SchemaName::Trouble}, {"eta", dtl::SchemaName::Eta},
      {"cont", dtl::SchemaName::Cont}};
  std::string name;
  if (auto args = parse_call(text, name)) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    auto it = families.find(key);
    if (it != families.end()) {
      if (args->size() == 1) return dtl::build_schema(it->second, (*args)[0]);
      if (args->size() == 2)
        return dtl::build_schema(it->second, (*args)[0], (*args)[1]);
      throw std::invalid_argument("formula designator takes one or two arguments: " +
                                  text);
    }
  }
  return dtl::Formula::parse(text);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> set_names(const dtl::DynModel& m, const dtl::PointSet& s) {
  std::vector<std::string> names;
  s.for_each([&](int x) { names.push_back(m.name(x)); });
  return names;
}

std::string render_report(const dtl::ExperimentReport& report) {
  std::ostringstream out;
  out << report.experiment << " " << report.parameters.dump() << "\n";
  for (const dtl::Assertion& a : report.assertions) {
    out << "  [" << (a.pass ? "ok" : "FAIL") << "] " << a.description << "\n";
    if (!a.pass)
      out << "        expected " << a.expected.dump() << ", observed "
          << a.observed.dump() << "\n";
  }
  out << (report.passed() ? "pass" : "fail") << "\n";
  return out.str();
}

int run_check(const std::string& model_arg, const std::string& formula_arg,
              bool json, const std::string& out_path) {
  dtl::DynModel m = load_model(model_arg);
  dtl::Formula phi = load_formula(formula_arg);
  dtl::PointSet sat = m.eval(phi);
  int witness = -1;
  for (int x = 0; x < m.size() && witness < 0; ++x)
    if (!sat.test(x)) witness = x;
  const bool valid = witness < 0;
  if (json) {
    ordered_json doc;
    doc["model"] = model_arg;
    doc["formula"] = phi.str();
    doc["table"] = ordered_json::array();
    for (int x = 0; x < m.size(); ++x)
      doc["table"].push_back({{"point", m.name(x)}, {"holds", sat.test(x)}});
    doc["valid"] = valid;
    if (!valid) doc["witness"] = m.name(witness);
    emit(out_path, dump(doc));
  } else {
    std::size_t pad = 0;
    for (const std::string& n : m.point_names()) pad = std::max(pad, n.size());
    std::ostringstream text;
    for (int x = 0; x < m.size(); ++x)
      text << m.name(x) << std::string(pad - m.name(x).size() + 2, ' ')
           << (sat.test(x) ? "true" : "false") << "\n";
    text << (valid ? "valid" : "refuted at " + m.name(witness)) << "\n";
    emit(out_path, text.str());
  }
  return valid ? 0 : 1;
}

struct GenOptions {
  std::string family;
  int N = 1;
  int K = 2;
  std::uint64_t seed = 0;
  int points = 6;
  int clusters = 3;
  int atoms = 2;
  bool continuous = false;
  bool dot = false;
};

int run_gen(const GenOptions& opt, const std::string& out_path) {
  dtl::DynModel m = [&] {
    if (opt.family == "A") return dtl::gen_A(opt.N, opt.K);
    if (opt.family == "B") return dtl::gen_B(opt.N, opt.K);
    if (opt.family == "C") return dtl::gen_C(opt.K);
    if (opt.family == "D") return dtl::gen_D(opt.N, opt.K);
    if (opt.family == "random")
      return dtl::gen_random_model(opt.seed, opt.points, opt.clusters, opt.atoms,
                                   opt.continuous);
    throw std::invalid_argument("unknown family: " + opt.family);
  }();
  emit(out_path, opt.dot ? m.to_dot() : dump(m.to_json()));
  return 0;
}

int run_bisim(const std::string& left_arg, const std::string& right_arg, int rank,
              int width, const std::string& out_path) {
  dtl::BisimTable table =
      dtl::compute_bisim(load_model(left_arg), load_model(right_arg), rank, width);
  emit(out_path, dump(table.to_json()));
  return 0;
}

int run_prove_trouble(int k, const std::string& out_path) {
  emit(out_path, dump(dtl::derive_trouble(k).to_json()));
  return 0;
}

int run_verify(const std::string& derivation_path, int width_cap, int depth_cap,
               bool l1_only, bool json, const std::string& out_path) {
  std::ifstream in(derivation_path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open derivation file: " + derivation_path);
  dtl::Derivation d = dtl::Derivation::from_json(nlohmann::json::parse(in));
  dtl::Verdict v = dtl::check_derivation(d, {width_cap, depth_cap, l1_only});
  if (json) {
    emit(out_path, dump(v.to_json()));
  } else if (v.accepted) {
    emit(out_path, "accepted\n");
  } else {
    emit(out_path, "rejected at line " + std::to_string(v.line) + ": " + v.reason +
                       " (" + v.detail + ")\n");
  }
  return v.accepted ? 0 : 1;
}

int run_oracle(const std::string& model_arg, const std::vector<int>& atoms,
               int width, int depth, const std::string& formula_arg,
               const std::string& out_path) {
  dtl::DynModel m = load_model(model_arg);
  std::vector<std::vector<dtl::PointSet>> levels =
      dtl::definable_sets(m, atoms, width, depth);
  ordered_json doc;
  doc["model"] = model_arg;
  doc["atoms"] = atoms;
  doc["width"] = width;
  doc["depth"] = depth;
  doc["levels"] = ordered_json::array();
  for (const auto& level : levels) {
    ordered_json sets = ordered_json::array();
    for (const dtl::PointSet& s : level) sets.push_back(set_names(m, s));
    doc["levels"].push_back(std::move(sets));
  }
  bool definable = true;
  if (!formula_arg.empty()) {
    dtl::Formula phi = load_formula(formula_arg);
    dtl::PointSet extension = m.eval(phi);
    const auto& last = levels.back();
    definable = std::find(last.begin(), last.end(), extension) != last.end();
    doc["formula"] = phi.str();
    doc["extension"] = set_names(m, extension);
    doc["definable"] = definable;
  }
  emit(out_path, dump(doc));
  return definable ? 0 : 1;
}

int run_report(const dtl::ExperimentReport& report, bool json,
               const std::string& out_path) {
  emit(out_path, json ? dump(report.to_json()) : render_report(report));
  return report.passed() ? 0 : 1;
}

int run_selftest(bool json, const std::string& out_path) {
  std::vector<dtl::ExperimentReport> reports = dtl::run_selftest();
  bool all = true;
  for (const dtl::ExperimentReport& r : reports) all = all && r.passed();
  if (json) {
    ordered_json doc = ordered_json::array();
    for (const dtl::ExperimentReport& r : reports) doc.push_back(r.to_json());
    emit(out_path, dump(doc));
  } else {
    std::ostringstream text;
    int passed = 0;
    for (const dtl::ExperimentReport& r : reports) {
      text << render_report(r);
      passed += r.passed() ? 1 : 0;
    }
    text << "selftest: " << passed << "/" << reports.size() << " suites pass\n";
    emit(out_path, text.str());
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic topological logic workbench"};
  app.require_subcommand(1);

  bool json = false;
  std::string out_path;
  auto add_io = [&](CLI::App* sub, bool with_json) {
    if (with_json) sub->add_flag("--json", json, "emit the JSON document");
    sub->add_option("--out", out_path, "write output to this file");
  };

  int exit_code = 0;

  // check MODEL FORMULA
  std::string check_model, check_formula;
  CLI::App* check = app.add_subcommand(
      "check", "evaluate a formula at every point and report validity");
  check->add_option("model", check_model, "gallery designator or model JSON file")
      ->required();
  check->add_option("formula", check_formula, "formula text or family designator")
      ->required();
  add_io(check, true);
  check->callback(
      [&] { exit_code = run_check(check_model, check_formula, json, out_path); });

  // gen --family ...
  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "export a gallery or random model");
  gen->add_option("--family", gen_opt.family, "A, B, C, D or random")->required();
  gen->add_option("--N", gen_opt.N, "grid depth parameter");
  gen->add_option("--K", gen_opt.K, "atom count parameter");
  gen->add_option("--seed", gen_opt.seed, "random family seed");
  gen->add_option("--points", gen_opt.points, "random family point budget");
  gen->add_option("--clusters", gen_opt.clusters, "random family cluster budget");
  gen->add_option("--atoms", gen_opt.atoms, "random family atom budget");
  gen->add_flag("--continuous", gen_opt.continuous,
                "force a monotone point map on the random family");
  gen->add_flag("--dot", gen_opt.dot, "emit DOT instead of JSON");
  add_io(gen, false);
  gen->callback([&] { exit_code = run_gen(gen_opt, out_path); });

  // bisim --left --right --rank [--width]
  std::string bisim_left, bisim_right;
  int bisim_rank = 0, bisim_width = dtl::kUnbounded;
  CLI::App* bisim =
      app.add_subcommand("bisim", "export a stratified bisimilarity table");
  bisim->add_option("--left", bisim_left, "left model")->required();
  bisim->add_option("--right", bisim_right, "right model")->required();
  bisim->add_option("--rank", bisim_rank, "maximum rank")->required();
  bisim->add_option("--width", bisim_width, "tangle width bound, -1 unbounded");
  add_io(bisim, false);
  bisim->callback([&] {
    exit_code = run_bisim(bisim_left, bisim_right, bisim_rank, bisim_width, out_path);
  });

  // prove trouble --k
  int prove_k = 1;
  CLI::App* prove = app.add_subcommand("prove", "produce a derivation");
  prove->require_subcommand(1);
  CLI::App* trouble =
      prove->add_subcommand("trouble", "stepwise derivation of the trouble formula");
  trouble->add_option("--k", prove_k, "tangle arity")->required();
  add_io(trouble, false);
  trouble->callback([&] { exit_code = run_prove_trouble(prove_k, out_path); });

  // verify --derivation --k --n [--l1-only]
  std::string verify_path;
  int verify_k = dtl::kNoCap, verify_n = dtl::kNoCap;
  bool verify_l1 = false;
  CLI::App* verify =
      app.add_subcommand("verify", "check a derivation against system caps");
  verify->add_option("--derivation", verify_path, "derivation JSON file")->required();
  verify->add_option("--k", verify_k, "continuity width cap, -1 unbounded");
  verify->add_option("--n", verify_n, "continuity depth cap, -1 unbounded");
  verify->add_flag("--l1-only", verify_l1, "confine every line to tangle width <= 1");
  add_io(verify, true);
  verify->callback([&] {
    exit_code = run_verify(verify_path, verify_k, verify_n, verify_l1, json, out_path);
  });

  // oracle width-definable --model --atoms --width --depth [--formula]
  std::string oracle_model, oracle_formula;
  std::vector<int> oracle_atoms;
  int oracle_width = 1, oracle_depth = 0;
  CLI::App* oracle = app.add_subcommand("oracle", "definability oracles");
  oracle->require_subcommand(1);
  CLI::App* definable = oracle->add_subcommand(
      "width-definable",
      "enumerate extensions definable within a width and depth budget");
  definable->add_option("--model", oracle_model, "static model")->required();
  definable->add_option("--atoms", oracle_atoms, "atom indices")->required();
  definable->add_option("--width", oracle_width, "tangle width bound")->required();
  definable->add_option("--depth", oracle_depth, "modal depth budget")->required();
  definable->add_option("--formula", oracle_formula,
                        "report whether this formula's extension is definable");
  add_io(definable, false);
  definable->callback([&] {
    exit_code = run_oracle(oracle_model, oracle_atoms, oracle_width, oracle_depth,
                           oracle_formula, out_path);
  });

  // experiment separation|expressiveness --k --n [--seed]
  int exp_k = 1, exp_n = 2;
  std::uint64_t exp_seed = 0;
  CLI::App* experiment = app.add_subcommand("experiment", "headline experiment drivers");
  experiment->require_subcommand(1);
  CLI::App* separation = experiment->add_subcommand(
      "separation", "derivability at arity k+1 against refutation at arity k+1");
  separation->add_option("--k", exp_k, "tangle arity")->required();
  separation->add_option("--n", exp_n, "modal depth")->required();
  separation->add_option("--seed", exp_seed, "sampling seed");
  add_io(separation, true);
  separation->callback([&] {
    exit_code =
        run_report(dtl::cmd_experiment_separation(exp_k, exp_n, exp_seed), json, out_path);
  });
  CLI::App* expressiveness = experiment->add_subcommand(
      "expressiveness", "width-(k+1) tangle distinguishes bisimilar points");
  expressiveness->add_option("--k", exp_k, "tangle arity")->required();
  expressiveness->add_option("--n", exp_n, "bisimulation rank")->required();
  add_io(expressiveness, true);
  expressiveness->callback([&] {
    exit_code = run_report(dtl::cmd_experiment_expressiveness(exp_k, exp_n), json, out_path);
  });

  // selftest
  CLI::App* selftest =
      app.add_subcommand("selftest", "run every module's invariant suite");
  add_io(selftest, true);
  selftest->callback([&] { exit_code = run_selftest(json, out_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
