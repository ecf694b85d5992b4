#include <doctest.h>

#include "tmep/errors.hpp"
#include "tmep/verify.hpp"

#include <numbers>
#include <stdexcept>

using namespace tmep;

namespace {

const double kHalfPi = std::numbers::pi / 2;

void require_pass(const CheckReport& r) {
  INFO(r.to_json().dump());
  CHECK(r.pass);
  CHECK(r.residual_max <= r.threshold);
}

Model uncoupled() {
  OpenSystemSpec spec = fixture_d_spec(1);
  spec.coupling_strength = 0.0;
  return build_open_system(spec);
}

}  // namespace

TEST_CASE("report schema") {
  const auto r = check_mean_entropy(fixture_a(), kHalfPi, CheckOptions{.fingerprint = "abc"});
  const auto j = r.to_json();
  for (const char* key : {"check", "fingerprint", "params", "residual_max", "threshold", "verdict",
                          "seconds"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["verdict"] == "pass");
  CHECK(j["fingerprint"] == "abc");
  CHECK_FALSE(r.to_json(false).contains("seconds"));
  CHECK(std::abs(r.params["mean"].get<double>() - 0.5 * std::log(3.0)) <= 1e-12);
}

TEST_CASE("thresholds and fingerprints") {
  CHECK(default_threshold(512) == 1e-9);
  CHECK(default_threshold(2048) == 1e-7);
  CHECK(fingerprint("") == "cbf29ce484222325");
  CHECK(fingerprint("a") == "af63dc4c8601ec8c");
  CHECK(fingerprint("abc") != fingerprint("abd"));
}

TEST_CASE("two-level fixture battery passes") {
  const Model m = fixture_a();
  const auto reports = run_jobs(battery(m, kHalfPi), 2);
  CHECK(reports.size() == 7);
  for (const auto& r : reports) require_pass(r);
}

TEST_CASE("two-reservoir fixture battery passes") {
  const Model m = fixture_d();
  for (double t : {0.25, 1.0}) {
    const auto reports = run_jobs(battery(m, t), 1);
    CHECK(reports.size() == 8);
    for (const auto& r : reports) require_pass(r);
  }
}

TEST_CASE("uncoupled model") {
  const Model m = uncoupled();
  const auto mean = check_mean_entropy(m, 1.0);
  require_pass(mean);
  CHECK(std::abs(mean.params["mean"].get<double>()) <= 1e-15);
  require_pass(check_transpose_relation(m, 1.0));
}

TEST_CASE("trivial time") {
  const Model m = fixture_d();
  require_pass(check_strip_symmetry(m, 0.0));
  require_pass(check_modular_identities(m, 0.0));
}

TEST_CASE("product-state bounds") {
  const Model m = fixture_d();
  const auto fair = check_product_state_theorem(m, 1.0, DensityMatrix::maximally_mixed(2));
  require_pass(fair);
  const auto range = fair.params["ratio_range"];
  CHECK(std::abs(range[0].get<double>() - 1.0) <= 1e-9);
  CHECK(std::abs(range[1].get<double>() - 1.0) <= 1e-9);

  const auto skewed = check_product_state_theorem(m, 1.0);
  require_pass(skewed);
  CHECK(skewed.params["ratio_range"][0].get<double>() >= 0.2 - 1e-9);
  CHECK(skewed.params["ratio_range"][1].get<double>() <= 2.0 + 1e-9);

  const auto pure = check_product_state_theorem(
      m, 1.0, DensityMatrix::pure(Eigen::Vector2cd(1, 0)));
  require_pass(pure);
  CHECK(pure.notes.size() == 1);
}

TEST_CASE("a failing identity is reported as failure") {
  // A zero threshold turns roundoff into a failure.
  const Model m = fixture_d();
  CheckOptions strict;
  strict.threshold = 0.0;
  const auto r = check_route_equivalence(m, 1.0, {}, strict);
  CHECK_FALSE(r.pass);
  CHECK(r.to_json()["verdict"] == "fail");
}

TEST_CASE("job queue keeps order and captures exceptions") {
  std::vector<CheckJob> jobs;
  for (int k = 0; k < 6; ++k) {
    jobs.push_back({"job" + std::to_string(k), [k] {
                      if (k == 3) throw std::runtime_error("boom");
                      CheckReport r;
                      r.check = "job" + std::to_string(k);
                      r.pass = true;
                      return r;
                    }});
  }
  const auto out = run_jobs(jobs, 3);
  REQUIRE(out.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(out[std::size_t(k)].check == "job" + std::to_string(k));
  CHECK_FALSE(out[3].pass);
  CHECK(out[3].notes.front().find("boom") != std::string::npos);
}

TEST_CASE("determinism of reports") {
  const Model m = fixture_d();
  const auto a = check_dephasing_invariance(m, 1.0);
  const auto b = check_dephasing_invariance(m, 1.0);
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
}

TEST_CASE("small scaling study") {
  ScalingOptions sopt;
  sopt.chain_lengths = {1, 2};
  const auto rows = scaling_study(fixture_d_spec(1), sopt);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].dim == 8);
  CHECK(rows[1].dim == 32);
  for (const auto& r : rows) {
    CHECK(r.pass());
    CHECK(r.w1 >= 0.0);
  }

  ScalingOptions same = sopt;
  same.beta_ratio = 1.0;
  for (const auto& r : scaling_study(fixture_d_spec(1), same)) CHECK(r.w1 <= 1e-12);

  OpenSystemSpec flat = fixture_d_spec(1);
  flat.coupling_strength = 0.0;
  for (const auto& r : scaling_study(flat, sopt)) CHECK(r.w1 == 0.0);

  ScalingOptions capped = sopt;
  capped.dim_cap = 16;
  CHECK_THROWS_AS(scaling_study(fixture_d_spec(1), capped), ResourceError);
}
