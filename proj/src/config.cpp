#include "tmep/config.hpp"

#include "tmep/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tmep {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field " + path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) field_error(join(path, key), "missing");
  return obj.at(key);
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(path, "must be finite");
  return x;
}

double get_positive(const json& v, const std::string& path) {
  const double x = get_number(v, path);
  if (!(x > 0.0)) field_error(path, "must be positive");
  return x;
}

long get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<long>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) field_error(join(path, it.key()), "unknown field");
  }
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) field_error(path, "expected an object");
  return v;
}

Matrix parse_matrix(const json& v, const std::string& path) {
  const json* re = &v;
  const json* im = nullptr;
  if (v.is_object()) {
    reject_unknown(v, {"re", "im"}, path);
    re = &require(v, "re", path);
    if (v.contains("im")) im = &v.at("im");
  }
  auto fill = [&](const json& rows, const std::string& p, Matrix& m, bool imag) {
    if (!rows.is_array() || rows.empty()) field_error(p, "expected a non-empty array of rows");
    const Index n = Index(rows.size());
    if (!imag) m = Matrix::Zero(n, n);
    if (m.rows() != n) field_error(p, "shape differs from the real part");
    for (Index i = 0; i < n; ++i) {
      const json& row = rows[std::size_t(i)];
      const std::string rp = p + "[" + std::to_string(i) + "]";
      if (!row.is_array() || Index(row.size()) != n) field_error(rp, "matrix must be square");
      for (Index j = 0; j < n; ++j) {
        const double x = get_number(row[std::size_t(j)], rp + "[" + std::to_string(j) + "]");
        if (imag) {
          m(i, j) += Complex(0.0, x);
        } else {
          m(i, j) = x;
        }
      }
    }
  };
  Matrix m;
  fill(*re, im ? join(path, "re") : path, m, false);
  if (im) fill(*im, join(path, "im"), m, true);
  return m;
}

json matrix_json(const Matrix& m) {
  auto part = [&](bool imag) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
      rows.push_back(row);
    }
    return rows;
  };
  if (m.imag().isZero(0.0)) return part(false);
  return json{{"re", part(false)}, {"im", part(true)}};
}

std::optional<Route> route_from_name(const std::string& s) {
  for (Route r : kAllRoutes) {
    if (route_name(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<StateKind> state_from_name(const std::string& s) {
  for (StateKind k : {StateKind::reference, StateKind::product, StateKind::pure_random,
                      StateKind::mixed_random, StateKind::perturbed_gibbs}) {
    if (state_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

ModelSpec parse_model(const json& v) {
  const std::string path = "model";
  require_object(v, path);
  ModelSpec m;
  const std::string kind = get_string(require(v, "kind", path), join(path, "kind"));
  if (kind == "explicit") {
    reject_unknown(v, {"kind", "hamiltonian", "omega"}, path);
    m.explicit_model = true;
    m.hamiltonian = parse_matrix(require(v, "hamiltonian", path), join(path, "hamiltonian"));
    m.omega = parse_matrix(require(v, "omega", path), join(path, "omega"));
    if (m.hamiltonian.rows() != m.omega.rows()) {
      field_error(join(path, "omega"), "dimension differs from the Hamiltonian");
    }
    return m;
  }
  if (kind != "open-system") field_error(join(path, "kind"), "expected \"open-system\" or \"explicit\"");
  reject_unknown(v, {"kind", "system_dim", "system_energy", "coupling_strength", "reservoirs"},
                 path);
  const long n = get_integer(require(v, "system_dim", path), join(path, "system_dim"));
  if (n < 1 || n > 64) field_error(join(path, "system_dim"), "must be between 1 and 64");
  m.open.system_dim = int(n);
  if (v.contains("system_energy")) {
    m.open.system_energy = get_number(v.at("system_energy"), join(path, "system_energy"));
  }
  if (v.contains("coupling_strength")) {
    m.open.coupling_strength = get_number(v.at("coupling_strength"), join(path, "coupling_strength"));
  }
  const json& rs = require(v, "reservoirs", path);
  if (!rs.is_array() || rs.empty()) field_error(join(path, "reservoirs"), "expected a non-empty array");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const std::string rp = join(path, "reservoirs[") + std::to_string(i) + "]";
    const json& r = require_object(rs[i], rp);
    reject_unknown(r, {"chain_length", "beta", "coupling", "field"}, rp);
    ReservoirSpec spec;
    const long len = get_integer(require(r, "chain_length", rp), join(rp, "chain_length"));
    if (len < 1 || len > 30) field_error(join(rp, "chain_length"), "must be between 1 and 30");
    spec.chain_length = int(len);
    spec.beta = get_positive(require(r, "beta", rp), join(rp, "beta"));
    if (r.contains("coupling")) spec.coupling = get_number(r.at("coupling"), join(rp, "coupling"));
    if (r.contains("field")) spec.field = get_number(r.at("field"), join(rp, "field"));
    m.open.reservoirs.push_back(spec);
  }
  return m;
}

StateSpec parse_state(const json& v) {
  const std::string path = "initial_state";
  require_object(v, path);
  reject_unknown(v, {"kind", "system_state", "reservoir", "beta_ratio", "seed"}, path);
  StateSpec s;
  const std::string kind = get_string(require(v, "kind", path), join(path, "kind"));
  const auto k = state_from_name(kind);
  if (!k) field_error(join(path, "kind"), "unknown state kind \"" + kind + "\"");
  s.kind = *k;
  if (v.contains("system_state")) {
    s.system_state = parse_matrix(v.at("system_state"), join(path, "system_state"));
  }
  if (v.contains("reservoir")) {
    const long r = get_integer(v.at("reservoir"), join(path, "reservoir"));
    if (r < 0) field_error(join(path, "reservoir"), "must be nonnegative");
    s.reservoir = std::size_t(r);
  }
  if (v.contains("beta_ratio")) s.beta_ratio = get_positive(v.at("beta_ratio"), join(path, "beta_ratio"));
  if (v.contains("seed")) {
    const long seed = get_integer(v.at("seed"), join(path, "seed"));
    if (seed < 0) field_error(join(path, "seed"), "must be nonnegative");
    s.seed = std::uint64_t(seed);
  }
  return s;
}

}  // namespace

std::string_view state_kind_name(StateKind k) {
  switch (k) {
    case StateKind::reference: return "reference";
    case StateKind::product: return "product";
    case StateKind::pure_random: return "pure-random";
    case StateKind::mixed_random: return "mixed-random";
    case StateKind::perturbed_gibbs: return "perturbed-gibbs";
  }
  return "unknown";
}

std::vector<Complex> ExperimentConfig::alphas() const {
  std::vector<Complex> out = imaginary_grid(alpha_max_imag, alpha_points);
  out.insert(out.end(), extra_alphas.begin(), extra_alphas.end());
  return out;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(j,
                 {"schema_version", "name", "model", "initial_state", "times", "alpha_grid",
                  "routes", "tolerances", "scaling", "dim_cap", "seed", "output_dir"},
                 "");
  ExperimentConfig c;
  const long version = get_integer(require(j, "schema_version", ""), "schema_version");
  if (version != kSchemaVersion) {
    field_error("schema_version", "unsupported version " + std::to_string(version));
  }
  if (j.contains("name")) c.name = get_string(j.at("name"), "name");
  c.model = parse_model(require(j, "model", ""));
  if (j.contains("initial_state")) c.state = parse_state(j.at("initial_state"));

  if (j.contains("times")) {
    const json& ts = j.at("times");
    if (!ts.is_array() || ts.empty()) field_error("times", "expected a non-empty array");
    c.times.clear();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      c.times.push_back(get_number(ts[i], "times[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("alpha_grid")) {
    const json& g = require_object(j.at("alpha_grid"), "alpha_grid");
    reject_unknown(g, {"max_imag", "points", "extra"}, "alpha_grid");
    if (g.contains("max_imag")) c.alpha_max_imag = get_number(g.at("max_imag"), "alpha_grid.max_imag");
    if (g.contains("points")) {
      const long n = get_integer(g.at("points"), "alpha_grid.points");
      if (n < 1 || n > 100000) field_error("alpha_grid.points", "must be between 1 and 100000");
      c.alpha_points = int(n);
    }
    if (g.contains("extra")) {
      const json& e = g.at("extra");
      if (!e.is_array()) field_error("alpha_grid.extra", "expected an array of [re, im] pairs");
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string p = "alpha_grid.extra[" + std::to_string(i) + "]";
        if (!e[i].is_array() || e[i].size() != 2) field_error(p, "expected [re, im]");
        c.extra_alphas.emplace_back(get_number(e[i][0], p + "[0]"), get_number(e[i][1], p + "[1]"));
      }
    }
  }
  if (j.contains("routes")) {
    const json& rs = j.at("routes");
    if (!rs.is_array() || rs.empty()) field_error("routes", "expected a non-empty array");
    c.routes.clear();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string p = "routes[" + std::to_string(i) + "]";
      const std::string name = get_string(rs[i], p);
      const auto r = route_from_name(name);
      if (!r) field_error(p, "unknown route \"" + name + "\"");
      c.routes.push_back(*r);
    }
  }
  if (j.contains("tolerances")) {
    const json& t = require_object(j.at("tolerances"), "tolerances");
    reject_unknown(t, {"cluster_tol", "atom_merge_tol", "threshold"}, "tolerances");
    if (t.contains("cluster_tol")) c.cluster_tol = get_positive(t.at("cluster_tol"), "tolerances.cluster_tol");
    if (t.contains("atom_merge_tol")) {
      c.merge_tol = get_positive(t.at("atom_merge_tol"), "tolerances.atom_merge_tol");
    }
    if (t.contains("threshold") && !t.at("threshold").is_null()) {
      c.threshold = get_positive(t.at("threshold"), "tolerances.threshold");
    }
  }
  if (j.contains("scaling")) {
    const json& s = require_object(j.at("scaling"), "scaling");
    reject_unknown(s, {"chain_lengths", "t", "reservoir", "beta_ratio"}, "scaling");
    if (s.contains("chain_lengths")) {
      const json& ls = s.at("chain_lengths");
      if (!ls.is_array() || ls.empty()) field_error("scaling.chain_lengths", "expected a non-empty array");
      c.scaling.chain_lengths.clear();
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const std::string p = "scaling.chain_lengths[" + std::to_string(i) + "]";
        const long n = get_integer(ls[i], p);
        if (n < 1 || n > 30) field_error(p, "must be between 1 and 30");
        c.scaling.chain_lengths.push_back(int(n));
      }
    }
    if (s.contains("t")) c.scaling.t = get_number(s.at("t"), "scaling.t");
    if (s.contains("reservoir")) {
      const long r = get_integer(s.at("reservoir"), "scaling.reservoir");
      if (r < 0) field_error("scaling.reservoir", "must be nonnegative");
      c.scaling.reservoir = std::size_t(r);
    }
    if (s.contains("beta_ratio")) c.scaling.beta_ratio = get_positive(s.at("beta_ratio"), "scaling.beta_ratio");
  }
  if (j.contains("dim_cap")) {
    c.dim_cap = get_integer(j.at("dim_cap"), "dim_cap");
    if (c.dim_cap < 1) field_error("dim_cap", "must be positive");
  }
  if (j.contains("seed")) {
    const long seed = get_integer(j.at("seed"), "seed");
    if (seed < 0) field_error("seed", "must be nonnegative");
    c.seed = std::uint64_t(seed);
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j.at("output_dir"), "output_dir");

  // Cross-field checks.
  if (!c.model.explicit_model) {
    const std::size_t m = c.model.open.reservoirs.size();
    if (c.state.reservoir >= m) field_error("initial_state.reservoir", "no such reservoir");
    if (c.scaling.reservoir >= m) field_error("scaling.reservoir", "no such reservoir");
  } else if (c.state.kind == StateKind::perturbed_gibbs) {
    field_error("initial_state.kind", "perturbed-gibbs needs an open-system model");
  }
  if (c.state.system_state) {
    const Index n = c.model.explicit_model ? 1 : c.model.open.system_dim;
    if (c.state.system_state->rows() != n) {
      field_error("initial_state.system_state", "dimension must equal model.system_dim");
    }
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": syntax error";
    throw ConfigError(os.str());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  json m;
  if (c.model.explicit_model) {
    m["kind"] = "explicit";
    m["hamiltonian"] = matrix_json(c.model.hamiltonian);
    m["omega"] = matrix_json(c.model.omega);
  } else {
    m["kind"] = "open-system";
    m["system_dim"] = c.model.open.system_dim;
    m["system_energy"] = c.model.open.system_energy;
    m["coupling_strength"] = c.model.open.coupling_strength;
    json rs = json::array();
    for (const auto& r : c.model.open.reservoirs) {
      rs.push_back({{"chain_length", r.chain_length},
                    {"beta", r.beta},
                    {"coupling", r.coupling},
                    {"field", r.field}});
    }
    m["reservoirs"] = rs;
  }
  j["model"] = m;
  json s;
  s["kind"] = std::string(state_kind_name(c.state.kind));
  if (c.state.system_state) s["system_state"] = matrix_json(*c.state.system_state);
  s["reservoir"] = c.state.reservoir;
  s["beta_ratio"] = c.state.beta_ratio;
  s["seed"] = c.state.seed;
  j["initial_state"] = s;
  j["times"] = c.times;
  json extra = json::array();
  for (Complex a : c.extra_alphas) extra.push_back({a.real(), a.imag()});
  j["alpha_grid"] = {{"max_imag", c.alpha_max_imag}, {"points", c.alpha_points}, {"extra", extra}};
  json routes = json::array();
  for (Route r : c.routes) routes.push_back(std::string(route_name(r)));
  j["routes"] = routes;
  j["tolerances"] = {{"cluster_tol", c.cluster_tol},
                     {"atom_merge_tol", c.merge_tol},
                     {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)}};
  j["scaling"] = {{"chain_lengths", c.scaling.chain_lengths},
                  {"t", c.scaling.t},
                  {"reservoir", c.scaling.reservoir},
                  {"beta_ratio", c.scaling.beta_ratio}};
  j["dim_cap"] = c.dim_cap;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string emit_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

long effective_dim_cap(const ExperimentConfig& c) {
  if (const char* env = std::getenv("TMEP_DIM_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw ConfigError(std::string("TMEP_DIM_CAP is not a positive integer: ") + env);
  }
  return c.dim_cap;
}

Model build_model(const ExperimentConfig& c) {
  const long cap = effective_dim_cap(c);
  if (c.model.explicit_model) {
    if (c.model.hamiltonian.rows() > cap) {
      throw ResourceError("explicit model dimension " + std::to_string(c.model.hamiltonian.rows()) +
                              " exceeds the cap of " + std::to_string(cap),
                          long(c.model.hamiltonian.rows()));
    }
    return build_explicit(c.name, c.model.hamiltonian, c.model.omega);
  }
  return build_open_system(c.model.open, cap, c.name);
}

DensityMatrix build_state(const ExperimentConfig& c, const Model& model) {
  const auto system_state = [&] {
    if (c.state.system_state) return DensityMatrix(*c.state.system_state);
    return DensityMatrix::maximally_mixed(model.system_dim());
  };
  Rng rng(c.state.seed);
  switch (c.state.kind) {
    case StateKind::reference: return model.omega;
    case StateKind::product: return model.product_state(system_state());
    case StateKind::pure_random: return random_pure_state(model.dim(), rng);
    case StateKind::mixed_random: return random_mixed_state(model.dim(), rng);
    case StateKind::perturbed_gibbs: {
      const double beta = model.spec.reservoirs.at(c.state.reservoir).beta;
      return perturbed_gibbs_state(model, system_state(), c.state.reservoir,
                                   c.state.beta_ratio * beta);
    }
  }
  return model.omega;
}

ExperimentConfig fixture_a_config() {
  ExperimentConfig c;
  c.name = "FIX-A";
  c.model.explicit_model = true;
  const Model m = fixture_a();
  c.model.hamiltonian = m.hamiltonian.matrix();
  c.model.omega = m.omega.matrix();
  c.times = {std::numbers::pi / 2};
  c.output_dir = "fix-a";
  return c;
}

ExperimentConfig fixture_d_config() {
  ExperimentConfig c;
  c.name = "FIX-D";
  c.model.open = fixture_d_spec(1);
  Matrix nu_s = Matrix::Zero(2, 2);
  nu_s(0, 0) = 0.9;
  nu_s(1, 1) = 0.1;
  c.state.kind = StateKind::product;
  c.state.system_state = nu_s;
  c.times = {0.25, 0.5, 1.0, 2.0};
  c.output_dir = "fix-d";
  return c;
}

}  // namespace tmep
