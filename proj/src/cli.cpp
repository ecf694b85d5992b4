#include "tmep/cli.hpp"

#include "tmep/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace tmep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_t%03zu", i);
  return stem + buf + ext;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Prepared {
  ExperimentConfig config;
  std::string fingerprint;
  fs::path out;
};

Prepared prepare(const CliOptions& opt) {
  Prepared p;
  p.config = load_config(opt.config_path);
  p.fingerprint = config_fingerprint(p.config);
  if (opt.seed) {
    p.config.seed = *opt.seed;
    p.config.state.seed = *opt.seed;
  }
  p.out = opt.out_dir ? fs::path(*opt.out_dir) : fs::path(p.config.output_dir);
  return p;
}

// Model construction failures other than the dimension cap mean the config
// describes an invalid model.
Model prepare_model(const ExperimentConfig& c) {
  try {
    return build_model(c);
  } catch (const ResourceError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

DensityMatrix prepare_state(const ExperimentConfig& c, const Model& model) {
  try {
    return build_state(c, model);
  } catch (const Error& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
}

CheckOptions check_options(const ExperimentConfig& c, const std::string& fp) {
  CheckOptions o;
  o.cluster_tol = c.cluster_tol;
  o.merge_tol = c.merge_tol;
  o.threshold = c.threshold;
  o.seed = c.seed;
  o.fingerprint = fp;
  return o;
}

json measure_json(const AtomicMeasure& q) {
  json atoms = json::array();
  for (const auto& a : q.atoms()) atoms.push_back({a.location, a.weight});
  return atoms;
}

}  // namespace

std::string config_fingerprint(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  return fingerprint(j.dump());
}

std::vector<CheckReport> verify_reports(const ExperimentConfig& c, const Model& model, int jobs) {
  const CheckOptions opt = check_options(c, config_fingerprint(c));
  std::vector<CheckJob> all;
  for (double t : c.times) {
    auto b = battery(model, t, opt);
    all.insert(all.end(), b.begin(), b.end());
  }
  return run_jobs(all, jobs);
}

int run_simulate(const CliOptions& opt, std::ostream& log) {
  const Prepared p = prepare(opt);
  const Model model = prepare_model(p.config);
  const DensityMatrix nu = prepare_state(p.config, model);
  const ModularContext ctx(model.omega, model.hamiltonian, 0.0, p.config.cluster_tol);
  const SpectralResolution& res = ctx.resolution();

  json manifest;
  manifest["fingerprint"] = p.fingerprint;
  manifest["name"] = p.config.name;
  manifest["dim"] = model.dim();
  manifest["alphabet_size"] = res.size();
  manifest["initial_state"] = std::string(state_kind_name(p.config.state.kind));
  json entries = json::array();
  for (std::size_t i = 0; i < p.config.times.size(); ++i) {
    const double t = p.config.times[i];
    const AtomicMeasure q =
        ep_measure(joint_distribution(nu, res, model.hamiltonian, t), p.config.merge_tol);
    std::ostringstream csv;
    write_csv(csv, q);
    const std::string file = indexed("measure", i, ".csv");
    write_file(p.out / file, csv.str());
    entries.push_back({{"t", t}, {"file", file}, {"atoms", q.size()}, {"mean", moment(q, 1)}});
    log << "t=" << format_number(t) << " atoms=" << q.size() << " -> " << (p.out / file).string()
        << "\n";
  }
  manifest["measures"] = entries;
  write_file(p.out / "manifest.json", dump(manifest));
  return kExitPass;
}

int run_verify(const CliOptions& opt, std::ostream& log) {
  const Prepared p = prepare(opt);
  const Model model = prepare_model(p.config);
  const auto reports = verify_reports(p.config, model, opt.jobs);
  const std::size_t per_time = reports.size() / p.config.times.size();

  bool all_pass = true;
  json summary = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    all_pass = all_pass && r.pass;
    const std::string file =
        "reports/" + indexed(r.check.empty() ? "check" : r.check, i / per_time, ".json");
    write_file(p.out / file, dump(r.to_json()));
    summary.push_back({{"check", r.check},
                       {"t", r.params.value("t", 0.0)},
                       {"verdict", r.pass ? "pass" : "fail"},
                       {"file", file}});
    log << (r.pass ? "PASS " : "FAIL ") << r.check << " t=" << format_number(r.params.value("t", 0.0))
        << " residual=" << format_number(r.residual_max)
        << " threshold=" << format_number(r.threshold) << "\n";
    for (const auto& n : r.notes) log << "  note: " << n << "\n";
  }
  write_file(p.out / "verify.json", dump({{"fingerprint", p.fingerprint},
                                          {"name", p.config.name},
                                          {"all_pass", all_pass},
                                          {"reports", summary}}));
  return all_pass ? kExitPass : kExitCheckFailed;
}

int run_scan(const CliOptions& opt, std::ostream& log) {
  const Prepared p = prepare(opt);
  const Model model = prepare_model(p.config);
  const DensityMatrix nu = prepare_state(p.config, model);
  const auto alphas = p.config.alphas();
  std::vector<Complex> imaginary;
  for (Complex a : alphas) {
    if (a.real() == 0.0) imaginary.push_back(a);
  }

  json files = json::array();
  for (std::size_t i = 0; i < p.config.times.size(); ++i) {
    const double t = p.config.times[i];
    const ModularContext ctx(model.omega, model.hamiltonian, t, p.config.cluster_tol);
    const TwoTimeProtocol protocol(ctx.resolution(), model.hamiltonian, t);
    std::ostringstream csv;
    csv << "re_alpha,im_alpha,re_F,im_F,route\n";
    for (Route r : p.config.routes) {
      const auto& pts = r == Route::cocycle_product ? imaginary : alphas;
      const auto grid = char_function_grid(r, protocol, ctx, nu, pts, p.config.merge_tol);
      for (std::size_t k = 0; k < grid.alphas.size(); ++k) {
        csv << format_number(grid.alphas[k].real()) << ',' << format_number(grid.alphas[k].imag())
            << ',' << format_number(grid.values[k].real()) << ','
            << format_number(grid.values[k].imag()) << ',' << route_name(r) << '\n';
      }
    }
    const std::string file = indexed("scan", i, ".csv");
    write_file(p.out / file, csv.str());
    files.push_back({{"t", t}, {"file", file}});
    log << "t=" << format_number(t) << " -> " << (p.out / file).string() << "\n";
  }
  write_file(p.out / "manifest.json",
             dump({{"fingerprint", p.fingerprint}, {"name", p.config.name}, {"scans", files}}));
  return kExitPass;
}

int run_scaling(const CliOptions& opt, std::ostream& log) {
  const Prepared p = prepare(opt);
  if (p.config.model.explicit_model) {
    throw ConfigError("model: the scaling study needs an open-system model");
  }
  ScalingOptions sopt;
  sopt.chain_lengths = p.config.scaling.chain_lengths;
  sopt.t = p.config.scaling.t;
  sopt.perturbed_reservoir = p.config.scaling.reservoir;
  sopt.beta_ratio = p.config.scaling.beta_ratio;
  sopt.dim_cap = effective_dim_cap(p.config);
  if (p.config.state.system_state) sopt.nu_s = DensityMatrix(*p.config.state.system_state);
  // Fail fast on the largest requested size.
  for (int n : sopt.chain_lengths) {
    OpenSystemSpec spec = p.config.model.open;
    for (auto& r : spec.reservoirs) r.chain_length = n;
    const long d = open_system_dimension(spec);
    if (d < 0 || d > sopt.dim_cap) {
      throw ResourceError("scaling study at n = " + std::to_string(n) + " requires dimension " +
                              (d < 0 ? std::string("> 2^40") : std::to_string(d)) +
                              ", above the cap of " + std::to_string(sopt.dim_cap),
                          d);
    }
  }

  const auto rows = scaling_study(
      p.config.model.open, sopt, check_options(p.config, p.fingerprint), [&](const ScalingRow& r) {
        log << "n=" << r.n << " dim=" << r.dim << " W1=" << format_number(r.w1)
            << " checks=" << (r.pass() ? "pass" : "fail") << "\n";
        log.flush();
      });

  std::ostringstream csv;
  csv << "n,w1\n";
  json checks = json::array();
  bool all_pass = true;
  for (const auto& r : rows) {
    csv << r.n << ',' << format_number(r.w1) << '\n';
    json reports = json::array();
    for (const auto& c : r.checks) reports.push_back(c.to_json());
    checks.push_back({{"n", r.n}, {"dim", r.dim}, {"w1", r.w1}, {"tv", r.tv}, {"reports", reports}});
    all_pass = all_pass && r.pass();
  }
  write_file(p.out / "scaling.csv", csv.str());
  write_file(p.out / "scaling_checks.json", dump({{"fingerprint", p.fingerprint},
                                                   {"all_pass", all_pass},
                                                   {"rows", checks}}));
  return all_pass ? kExitPass : kExitCheckFailed;
}

int emit_fixtures(const std::string& out_dir, int jobs, std::ostream& log) {
  const fs::path out(out_dir);
  for (const auto& [stem, config] :
       {std::pair{std::string("fix-a"), fixture_a_config()},
        std::pair{std::string("fix-d"), fixture_d_config()}}) {
    write_file(out / (stem + ".json"), emit_config(config));
    const Model model = build_model(config);
    const DensityMatrix nu = build_state(config, model);
    const ModularContext ctx(model.omega, model.hamiltonian, 0.0, config.cluster_tol);
    json measures = json::array();
    for (double t : config.times) {
      const TwoTimeProtocol protocol(ctx.resolution(), model.hamiltonian, t);
      measures.push_back(
          {{"t", t},
           {"reference", measure_json(ep_measure(protocol.joint_distribution(model.omega),
                                                 config.merge_tol))},
           {"initial_state",
            measure_json(ep_measure(protocol.joint_distribution(nu), config.merge_tol))}});
    }
    json checks = json::array();
    for (const auto& r : verify_reports(config, model, jobs)) {
      checks.push_back({{"check", r.check}, {"t", r.params.value("t", 0.0)},
                        {"verdict", r.pass ? "pass" : "fail"}});
    }
    write_file(out / (stem + ".expected.json"), dump({{"fixture", config.name},
                                                      {"config", stem + ".json"},
                                                      {"fingerprint", config_fingerprint(config)},
                                                      {"measures", measures},
                                                      {"checks", checks}}));
    log << "wrote " << (out / (stem + ".json")).string() << " and "
        << (out / (stem + ".expected.json")).string() << "\n";
  }
  return kExitPass;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-time measurement entropy production statistics"};
  app.require_subcommand(1);
  CliOptions opt;
  std::string fixtures_out = "fixtures";

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "Experiment config (JSON)");
    if (needs_config) c->required();
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Override the config seeds");
  };
  std::map<std::string, CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Write the entropy production measure at each configured time"},
      {"verify", "Run the identity check battery and write JSON reports"},
      {"scan", "Tabulate the characteristic function along each route"},
      {"scaling", "Distance between measures as the reservoirs grow"}};
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    add_common(sub, true);
    sub->add_option("--out", opt.out_dir, "Output directory");
    subs[name] = sub;
  }
  auto* fixtures = app.add_subcommand("emit-fixtures", "Write the canonical fixture configs");
  add_common(fixtures, false);
  fixtures->add_option("--out", fixtures_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (fixtures->parsed()) return emit_fixtures(fixtures_out, opt.jobs, out);
    if (subs["simulate"]->parsed()) return run_simulate(opt, out);
    if (subs["verify"]->parsed()) return run_verify(opt, out);
    if (subs["scan"]->parsed()) return run_scan(opt, out);
    if (subs["scaling"]->parsed()) return run_scaling(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  }
  return kExitConfig;
}

}  // namespace tmep
