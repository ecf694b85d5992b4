#include <doctest.h>

#include "tmep/config.hpp"
#include "tmep/errors.hpp"

#include <cstdlib>

using namespace tmep;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({
  "schema_version": 1,
  "model": {
    "kind": "open-system",
    "system_dim": 2,
    "reservoirs": [{"chain_length": 1, "beta": 1.0}, {"chain_length": 1, "beta": 2.0}]
  }
})";

}  // namespace

TEST_CASE("minimal config uses defaults") {
  const auto c = parse_config_text(kMinimal);
  CHECK(c.model.open.coupling_strength == 0.5);
  CHECK(c.model.open.reservoirs[0].coupling == 0.5);
  CHECK(c.model.open.reservoirs[0].field == 0.4);
  CHECK(c.times == std::vector<double>{1.0});
  CHECK(c.alphas().size() == 41);
  CHECK(c.routes.size() == 4);
  CHECK(c.dim_cap == 4096);
}

TEST_CASE("emit and parse round trip") {
  for (const auto& c : {fixture_a_config(), fixture_d_config(), parse_config_text(kMinimal)}) {
    const std::string once = emit_config(c);
    const std::string twice = emit_config(parse_config_text(once));
    CHECK(once == twice);
  }
  auto c = fixture_d_config();
  c.extra_alphas = {Complex(0.5, 0.25)};
  c.threshold = 1e-8;
  const auto back = parse_config_text(emit_config(c));
  CHECK(back.extra_alphas.size() == 1);
  CHECK(back.threshold.value() == 1e-8);
  CHECK(back.state.system_state->isApprox(*c.state.system_state));
}

TEST_CASE("explicit complex matrices") {
  const std::string text = R"({
    "schema_version": 1,
    "model": {"kind": "explicit",
              "hamiltonian": {"re": [[0, 1], [1, 0]], "im": [[0, -0.5], [0.5, 0]]},
              "omega": [[0.75, 0], [0, 0.25]]}
  })";
  const auto c = parse_config_text(text);
  CHECK(c.model.hamiltonian(0, 1) == Complex(1, -0.5));
  const auto again = parse_config_text(emit_config(c));
  CHECK(again.model.hamiltonian == c.model.hamiltonian);
  const Model m = build_model(c);
  CHECK(m.dim() == 2);
}

TEST_CASE("syntax errors name the line") {
  const std::string broken = "{\n  \"schema_version\": 1,\n  \"model\": {\n    \"kind\": ,\n  }\n}";
  const std::string msg = error_of(broken);
  CHECK(msg.find("line 4") != std::string::npos);
}

TEST_CASE("field errors name the field") {
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kMinimal;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  CHECK(error_of(with("\"beta\": 2.0", "\"beta\": -2.0")).find("model.reservoirs[1].beta") !=
        std::string::npos);
  CHECK(error_of(with("\"schema_version\": 1", "\"schema_version\": 7")).find("schema_version") !=
        std::string::npos);
  CHECK(error_of(with("\"system_dim\": 2", "\"system_dim\": \"two\"")).find("model.system_dim") !=
        std::string::npos);
  CHECK(error_of(with("\"kind\": \"open-system\"", "\"kind\": \"closed\"")).find("model.kind") !=
        std::string::npos);
  CHECK(error_of(with("\"system_dim\": 2", "\"system_dim\": 2, \"colour\": 1")).find("model.colour") !=
        std::string::npos);
  CHECK(error_of("[1, 2]").find("root") != std::string::npos);
  CHECK(error_of(R"({"model": {}})").find("schema_version") != std::string::npos);
}

TEST_CASE("tolerances must be positive") {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), R"(, "tolerances": {"cluster_tol": 0})");
  CHECK(error_of(s).find("tolerances.cluster_tol") != std::string::npos);
}

TEST_CASE("dimension cap from config and environment") {
  auto c = fixture_d_config();
  c.model.open = fixture_d_spec(3);
  c.dim_cap = 64;
  CHECK_THROWS_AS(build_model(c), ResourceError);
  ::setenv("TMEP_DIM_CAP", "1024", 1);
  CHECK(effective_dim_cap(c) == 1024);
  CHECK(build_model(c).dim() == 128);
  ::setenv("TMEP_DIM_CAP", "lots", 1);
  CHECK_THROWS_AS(effective_dim_cap(c), ConfigError);
  ::unsetenv("TMEP_DIM_CAP");
}

TEST_CASE("initial states") {
  const auto c = fixture_d_config();
  const Model m = build_model(c);
  const DensityMatrix prod = build_state(c, m);
  CHECK(std::abs(prod.matrix().trace() - 1.0) <= 1e-12);
  auto pure = c;
  pure.state.kind = StateKind::pure_random;
  const auto p1 = build_state(pure, m), p2 = build_state(pure, m);
  CHECK(p1.matrix() == p2.matrix());
  auto pert = c;
  pert.state.kind = StateKind::perturbed_gibbs;
  CHECK(build_state(pert, m).dim() == 8);
  CHECK(state_kind_name(StateKind::mixed_random) == "mixed-random");
}
