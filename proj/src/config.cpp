#include "pbe/config.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace pbe {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

/// Reads typed fields of one JSON object, recording every problem with its field path.
class Fields {
public:
  Fields(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) error("", "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back((key.empty() ? path_ : at(key)) + ": " + msg);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      error(key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<int> integer(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) {
      error(key, "expected an integer");
      return std::nullopt;
    }
    return v.get<int>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_string()) {
      error(key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) {
      error(key, "expected a boolean");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  void reject_unknown() {
    if (!obj_.is_object()) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) error(it.key(), "unknown field");
  }

private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::string resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = std::filesystem::path(base) / path;
  return path.lexically_normal().string();
}

template <typename Table>
std::shared_ptr<const Table> load_table(Fields& f, const std::string& key, const std::string& base,
                                        std::string& resolved) {
  const auto p = f.string(key);
  if (!p) {
    f.error(key, "a table path is required");
    return nullptr;
  }
  resolved = resolve(base, *p);
  if (!std::filesystem::exists(resolved)) {
    f.error(key, "file '" + resolved + "' does not exist");
    return nullptr;
  }
  try {
    return std::make_shared<const Table>(Table::from_csv(resolved));
  } catch (const std::exception& e) {
    f.error(key, e.what());
    return nullptr;
  }
}

void add_violations(Fields& f, const std::vector<std::string>& v) {
  for (const auto& s : v) {
    // messages start with the field name; report them against it
    const auto space = s.find(' ');
    f.error(s.substr(0, space), s);
  }
}

CoagulationSpec parse_coagulation(const json& j, const std::string& base, RunConfiguration& cfg,
                                  std::vector<std::string>& errors) {
  Fields f(j, "kernels.coagulation", errors);
  CoagulationSpec spec = CoagulationSpec::constant();
  const std::string form_name = f.string("form").value_or("constant");
  const auto form = parse_coagulation_form(form_name);
  const auto a = f.number("a");
  const auto k = f.number("k");
  const auto sigma = f.number("sigma");
  const auto lambda = f.number("lambda");
  if (!form) {
    f.error("form", "unknown kernel id '" + form_name + "'");
  } else {
    switch (*form) {
    case CoagulationForm::zero: spec = CoagulationSpec::zero(); break;
    case CoagulationForm::constant: spec = CoagulationSpec::constant(); break;
    case CoagulationForm::sum: spec = CoagulationSpec::sum(); break;
    case CoagulationForm::smoluchowski: spec = CoagulationSpec::smoluchowski(a.value_or(3.0)); break;
    case CoagulationForm::eke: spec = CoagulationSpec::eke(); break;
    case CoagulationForm::granulation: spec = CoagulationSpec::granulation(); break;
    case CoagulationForm::shear_linear: spec = CoagulationSpec::shear_linear(); break;
    case CoagulationForm::shear_nonlinear: spec = CoagulationSpec::shear_nonlinear(); break;
    case CoagulationForm::custom_tabulated:
      spec.form = CoagulationForm::custom_tabulated;
      spec.table = load_table<Table2D>(f, "table", base, cfg.coagulation_table);
      if (!k) f.error("k", "missing constant (custom kernels must supply k, sigma, lambda)");
      if (!sigma) f.error("sigma", "missing constant (custom kernels must supply k, sigma, lambda)");
      if (!lambda) f.error("lambda", "missing constant (custom kernels must supply k, sigma, lambda)");
      break;
    case CoagulationForm::custom:
      f.error("form", "'custom' kernels are only available through the library API");
      break;
    }
    if (a && *form != CoagulationForm::smoluchowski) f.error("a", "only used by the smoluchowski kernel");
  }
  if (k) spec.k = *k;
  if (sigma) spec.sigma = *sigma;
  if (lambda) spec.lambda = *lambda;
  if (form && *form != CoagulationForm::custom_tabulated && f.has("table"))
    f.error("table", "only used by custom-tabulated kernels");
  f.reject_unknown();
  if (form) add_violations(f, constraint_violations(spec));
  return spec;
}

SelectionSpec parse_selection(const json& j, const std::string& base, RunConfiguration& cfg,
                              std::vector<std::string>& errors) {
  Fields f(j, "kernels.selection", errors);
  SelectionSpec spec = SelectionSpec::zero();
  const std::string form_name = f.string("form").value_or("zero");
  const auto form = parse_selection_form(form_name);
  const auto S0 = f.number("S0");
  const auto alpha = f.number("alpha");
  if (!form) {
    f.error("form", "unknown selection id '" + form_name + "'");
  } else {
    switch (*form) {
    case SelectionForm::zero: break;
    case SelectionForm::constant:
      if (!S0) f.error("S0", "missing constant rate");
      spec = SelectionSpec::constant(S0.value_or(0.0));
      if (alpha) f.error("alpha", "constant selection has alpha = 0");
      break;
    case SelectionForm::power:
      if (!S0) f.error("S0", "missing constant");
      if (!alpha) f.error("alpha", "missing constant");
      spec = SelectionSpec::power(S0.value_or(0.0), alpha.value_or(0.0));
      break;
    case SelectionForm::tabulated:
      if (!S0) f.error("S0", "missing constant (tabulated selection must supply S0, alpha)");
      if (!alpha) f.error("alpha", "missing constant (tabulated selection must supply S0, alpha)");
      spec = SelectionSpec::tabulated(load_table<Table1D>(f, "table", base, cfg.selection_table),
                                      S0.value_or(0.0), alpha.value_or(0.0));
      break;
    case SelectionForm::custom:
      f.error("form", "'custom' selection functions are only available through the library API");
      break;
    }
    if (*form == SelectionForm::zero && (S0 || alpha)) {
      if (S0) spec.S0 = *S0;
      if (alpha) spec.alpha = *alpha;
    }
  }
  if (form && *form != SelectionForm::tabulated && f.has("table")) f.error("table", "only used by tabulated selection");
  f.reject_unknown();
  if (form) add_violations(f, constraint_violations(spec));
  return spec;
}

BreakageSpec parse_breakage(const json& j, std::vector<std::string>& errors) {
  Fields f(j, "kernels.breakage", errors);
  const std::string form_name = f.string("form").value_or("binary-uniform");
  const auto form = parse_breakage_form(form_name);
  const double gamma = f.number("gamma").value_or(0.5);
  BreakageSpec spec = BreakageSpec::binary_uniform(gamma);
  if (!form) {
    f.error("form", "unknown breakage id '" + form_name + "'");
  } else if (*form == BreakageForm::ternary_uniform) {
    spec = BreakageSpec::ternary_uniform(gamma);
  } else if (*form == BreakageForm::parabolic) {
    spec = BreakageSpec::parabolic(gamma);
  } else if (*form == BreakageForm::custom) {
    f.error("form", "'custom' breakage functions are only available through the library API");
  }
  if (const auto N = f.integer("N")) spec.N = *N;
  if (const auto N0 = f.number("N0")) spec.N0 = *N0;
  if (const auto b = f.number("b_bar")) spec.b_bar = *b;
  if (const auto Y = f.number("Y")) spec.Y = *Y;
  f.reject_unknown();
  if (form) add_violations(f, constraint_violations(spec));
  return spec;
}

InitialProfile parse_initial(const json& j, const std::string& base, RunConfiguration& cfg,
                             std::vector<std::string>& errors) {
  Fields f(j, "initial", errors);
  const std::string kind = f.string("profile").value_or("exponential");
  InitialProfile p;
  if (kind == "exponential") {
    p = InitialProfile::exponential(f.number("mean").value_or(1.0), f.number("number").value_or(1.0));
    if (!(p.mean > 0.0)) f.error("mean", "mean must be positive");
    if (!(p.number >= 0.0)) f.error("number", "number must be nonnegative");
  } else if (kind == "monodisperse") {
    const auto cell = f.integer("cell");
    const auto amount = f.number("amount");
    if (!cell) f.error("cell", "missing cell index");
    if (!amount) f.error("amount", "missing amount");
    p = InitialProfile::monodisperse(cell.value_or(0), amount.value_or(0.0));
    if (p.cell < 0) f.error("cell", "cell index must be nonnegative");
    if (!(p.amount >= 0.0)) f.error("amount", "amount must be nonnegative");
  } else if (kind == "zero") {
    p = InitialProfile::zero();
  } else if (kind == "tabulated") {
    p = InitialProfile::tabulated(load_table<Table1D>(f, "table", base, cfg.initial_table));
    if (p.table && p.table->min_value() < 0.0) f.error("table", "negative tabulated density");
  } else {
    f.error("profile", "unknown profile '" + kind + "'");
  }
  f.reject_unknown();
  return p;
}

} // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
  case RunMode::single: return "single";
  case RunMode::study: return "study";
  case RunMode::verify: return "verify";
  }
  return "?";
}

ConfigErrors::ConfigErrors(std::vector<std::string> violations)
    : ConfigError(join(violations)), violations_(std::move(violations)) {}

RunConfiguration parse_config(const std::string& document, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigErrors({std::string("document: ") + e.what()});
  }
  return parse_config(j, base_dir);
}

RunConfiguration parse_config(const json& doc, const std::string& base_dir) {
  std::vector<std::string> errors;
  RunConfiguration cfg;
  Simulation& sim = cfg.simulation;
  Fields top(doc, "", errors);
  if (!doc.is_object()) throw ConfigErrors(errors);

  if (const auto mode = top.string("mode")) {
    if (*mode == "single") cfg.mode = RunMode::single;
    else if (*mode == "study") cfg.mode = RunMode::study;
    else if (*mode == "verify") cfg.mode = RunMode::verify;
    else top.error("mode", "must be one of single, study, verify");
  }
  if (const auto out = top.string("output_dir")) cfg.output_dir = *out;
  if (const auto strict = top.boolean("strict")) sim.strict = *strict;

  static const json empty = json::object();
  const json* kernels = top.child("kernels");
  Fields kf(kernels ? *kernels : empty, "kernels", errors);
  const json* coag = kf.child("coagulation");
  const json* sel = kf.child("selection");
  const json* brk = kf.child("breakage");
  kf.reject_unknown();
  sim.system.coagulation = parse_coagulation(coag ? *coag : empty, base_dir, cfg, errors);
  sim.system.selection = parse_selection(sel ? *sel : empty, base_dir, cfg, errors);
  sim.system.breakage = parse_breakage(brk ? *brk : empty, errors);
  if (!(sim.system.breakage.gamma > sim.system.coagulation.sigma))
    errors.emplace_back("kernels.breakage.gamma: gamma must exceed the coagulation sigma");

  if (const json* g = top.child("grid")) {
    Fields f(*g, "grid", errors);
    if (const auto v = f.number("x_min")) sim.grid.x_min = *v;
    if (const auto v = f.number("x_max")) sim.grid.x_max = *v;
    if (const auto v = f.integer("cells")) sim.grid.cells = *v;
    f.reject_unknown();
  }
  if (!(sim.grid.x_min > 0.0)) errors.emplace_back("grid.x_min: x_min must be positive");
  if (!(sim.grid.x_max > sim.grid.x_min)) errors.emplace_back("grid.x_max: x_max must exceed x_min");
  if (sim.grid.cells < 1) errors.emplace_back("grid.cells: cells must be at least 1");

  sim.initial = parse_initial(top.child("initial") ? *top.child("initial") : empty, base_dir, cfg, errors);
  if (sim.initial.kind == ProfileKind::monodisperse && sim.initial.cell >= sim.grid.cells)
    errors.emplace_back("initial.cell: cell index outside the grid");

  if (const json* i = top.child("integrator")) {
    Fields f(*i, "integrator", errors);
    IntegratorConfig& ic = sim.integrator;
    if (const auto v = f.number("rel_tol")) ic.rel_tol = *v;
    if (const auto v = f.number("abs_tol")) ic.abs_tol = *v;
    if (const auto v = f.number("dt_init")) ic.dt_init = *v;
    if (const auto v = f.number("dt_max")) ic.dt_max = *v;
    if (const auto v = f.number("t_end")) ic.t_end = *v;
    f.reject_unknown();
  }
  for (const auto& s : constraint_violations(sim.integrator))
    errors.push_back("integrator." + s.substr(0, s.find(' ')) + ": " + s);

  if (const json* s = top.child("snapshots")) {
    Fields f(*s, "snapshots", errors);
    if (const auto v = f.integer("count")) sim.snapshot_count = *v;
    f.reject_unknown();
  }
  if (sim.snapshot_count < 1) errors.emplace_back("snapshots.count: count must be at least 1");

  if (const json* t = top.child("truncation"); t && !t->is_null()) {
    Fields f(*t, "truncation", errors);
    TruncationParams tp;
    if (const auto v = f.integer("n")) tp.n = *v;
    else f.error("n", "missing truncation index");
    if (const auto v = f.number("ramp")) tp.ramp = *v;
    f.reject_unknown();
    for (const auto& s : constraint_violations(tp)) errors.push_back("truncation." + s.substr(0, s.find(' ')) + ": " + s);
    sim.truncation = tp;
  }

  if (const json* s = top.child("study")) {
    Fields f(*s, "study", errors);
    if (const json* n = f.child("n_list")) {
      cfg.study_n.clear();
      if (!n->is_array()) f.error("n_list", "expected an array of integers");
      else
        for (const auto& e : *n) {
          if (!e.is_number_integer() || e.get<int>() < 1) {
            f.error("n_list", "entries must be positive integers");
            break;
          }
          cfg.study_n.push_back(e.get<int>());
        }
      for (std::size_t i = 1; i < cfg.study_n.size(); ++i)
        if (cfg.study_n[i] <= cfg.study_n[i - 1]) {
          f.error("n_list", "must be strictly increasing");
          break;
        }
    }
    if (const auto v = f.number("r1")) cfg.r1 = *v;
    if (const auto v = f.number("r2")) cfg.r2 = *v;
    f.reject_unknown();
  }
  if (!(cfg.r1 >= 1.0)) errors.emplace_back("study.r1: r1 must be at least 1");
  if (!(cfg.r2 > 0.0 && cfg.r2 < 1.0)) errors.emplace_back("study.r2: r2 must lie in (0,1)");

  if (const json* a = top.child("analysis")) {
    Fields f(*a, "analysis", errors);
    if (const json* strip = f.child("strip")) {
      if (!strip->is_array() || strip->size() != 2 || !(*strip)[0].is_number() || !(*strip)[1].is_number())
        f.error("strip", "expected [X1, X2]");
      else {
        cfg.strip_lo = (*strip)[0].get<double>();
        cfg.strip_hi = (*strip)[1].get<double>();
      }
    }
    f.reject_unknown();
  }
  if (!(cfg.strip_lo > 0.0 && cfg.strip_hi > cfg.strip_lo))
    errors.emplace_back("analysis.strip: must satisfy 0 < X1 < X2");

  top.reject_unknown();
  if (!errors.empty()) throw ConfigErrors(errors);
  return cfg;
}

RunConfiguration load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read configuration '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), base.empty() ? "." : base);
}

json to_json(const RunConfiguration& c) {
  const Simulation& s = c.simulation;
  const auto& K = s.system.coagulation;
  const auto& S = s.system.selection;
  const auto& B = s.system.breakage;

  json coag = {{"form", to_string(K.form)}, {"k", K.k}, {"sigma", K.sigma}, {"lambda", K.lambda}};
  if (K.form == CoagulationForm::smoluchowski) coag["a"] = K.a;
  if (K.form == CoagulationForm::custom_tabulated) coag["table"] = c.coagulation_table;

  json sel = {{"form", to_string(S.form)}, {"S0", S.S0}};
  if (S.form != SelectionForm::constant) sel["alpha"] = S.alpha;
  if (S.form == SelectionForm::tabulated) sel["table"] = c.selection_table;

  json brk = {{"form", to_string(B.form)}, {"N", B.N},       {"gamma", B.gamma},
              {"N0", B.N0},                {"b_bar", B.b_bar}, {"Y", B.Y}};

  json init;
  switch (s.initial.kind) {
  case ProfileKind::zero: init = {{"profile", "zero"}}; break;
  case ProfileKind::exponential:
    init = {{"profile", "exponential"}, {"mean", s.initial.mean}, {"number", s.initial.number}};
    break;
  case ProfileKind::monodisperse:
    init = {{"profile", "monodisperse"}, {"cell", s.initial.cell}, {"amount", s.initial.amount}};
    break;
  case ProfileKind::tabulated: init = {{"profile", "tabulated"}, {"table", c.initial_table}}; break;
  }

  json doc = {
      {"mode", to_string(c.mode)},
      {"output_dir", c.output_dir},
      {"strict", s.strict},
      {"kernels", {{"coagulation", coag}, {"selection", sel}, {"breakage", brk}}},
      {"grid", {{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"cells", s.grid.cells}}},
      {"initial", init},
      {"integrator",
       {{"rel_tol", s.integrator.rel_tol},
        {"abs_tol", s.integrator.abs_tol},
        {"dt_init", s.integrator.dt_init},
        {"dt_max", s.integrator.dt_max},
        {"t_end", s.integrator.t_end}}},
      {"snapshots", {{"count", s.snapshot_count}}},
      {"study", {{"n_list", c.study_n}, {"r1", c.r1}, {"r2", c.r2}}},
      {"analysis", {{"strip", {c.strip_lo, c.strip_hi}}}},
  };
  if (s.truncation) doc["truncation"] = {{"n", s.truncation->n}, {"ramp", s.truncation->ramp}};
  return doc;
}

} // namespace pbe
