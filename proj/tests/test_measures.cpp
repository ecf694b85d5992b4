#include <doctest.h>

#include "tmep/errors.hpp"
#include "tmep/measures.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

using namespace tmep;

namespace {

const double kLog3 = std::log(3.0);

AtomicMeasure fix_a() { return AtomicMeasure::from_atoms({{kLog3, 0.75}, {-kLog3, 0.25}}); }

AtomicMeasure random_measure(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> loc(-3, 3), w(0.1, 1);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({loc(rng), w(rng)});
  return AtomicMeasure::normalized(atoms);
}

}  // namespace

TEST_CASE("construction merges, sorts and validates") {
  const auto q = AtomicMeasure::from_atoms({{1.0, 0.25}, {-1.0, 0.5}, {1.0 + 1e-10, 0.25}});
  REQUIRE(q.size() == 2);
  CHECK(q.atoms()[0].location == -1.0);
  CHECK(q.atoms()[1].weight == doctest::Approx(0.5));
  CHECK(q.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(AtomicMeasure::from_atoms({{0.0, 0.5}}), NumericalIntegrityError);
  const auto n = AtomicMeasure::normalized({{0.0, 2.0}, {1.0, 2.0}});
  CHECK(n.weight_at(1.0) == doctest::Approx(0.5));
  const auto dropped = AtomicMeasure::from_atoms({{0.0, 1.0}, {2.0, 0.0}});
  CHECK(dropped.size() == 1);
  for (std::size_t i = 1; i < q.size(); ++i) {
    CHECK(q.atoms()[i].location - q.atoms()[i - 1].location > kDefaultMergeTol);
  }
}

TEST_CASE("reflection") {
  const auto d = AtomicMeasure::dirac(0.0);
  CHECK(reflect(d).atoms()[0].location == 0.0);
  const auto r = reflect(fix_a());
  CHECK(r.weight_at(-kLog3) == doctest::Approx(0.75));
  CHECK(r.weight_at(kLog3) == doctest::Approx(0.25));
  const auto sym = AtomicMeasure::from_atoms({{-1.0, 0.3}, {0.0, 0.4}, {1.0, 0.3}});
  CHECK(max_atom_discrepancy(reflect(sym), sym) == 0.0);
  std::mt19937_64 rng(1);
  const auto q = random_measure(rng, 7);
  CHECK(max_atom_discrepancy(reflect(reflect(q)), q) == 0.0);
}

TEST_CASE("Radon-Nikodym derivatives") {
  const auto q = fix_a();
  for (const auto& r : rn_derivative(q, q)) CHECK(r.ratio == doctest::Approx(1.0));
  const auto ratios = rn_derivative(reflect(q), q);
  REQUIRE(ratios.size() == 2);
  for (const auto& r : ratios) {
    CHECK(r.ratio == doctest::Approx(std::exp(-r.location)).epsilon(1e-14));
  }
  CHECK(ratios[1].ratio == doctest::Approx(1.0 / 3.0));
  const auto outside = AtomicMeasure::from_atoms({{0.0, 0.5}, {kLog3, 0.5}});
  CHECK_THROWS_AS(rn_derivative(outside, q), AbsoluteContinuityError);
  try {
    rn_derivative(outside, q);
  } catch (const AbsoluteContinuityError& e) {
    CHECK(e.location() == 0.0);
  }
}

TEST_CASE("Radon-Nikodym chain rule") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  const std::vector<double> support{-2.0, -0.5, 0.0, 1.0, 2.5};
  auto make = [&] {
    std::vector<Atom> atoms;
    for (double s : support) atoms.push_back({s, w(rng)});
    return AtomicMeasure::normalized(atoms);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = make(), q = make(), r = make();
    const auto pq = rn_derivative(p, q), qr = rn_derivative(q, r), pr = rn_derivative(p, r);
    for (std::size_t i = 0; i < support.size(); ++i) {
      CHECK(std::abs(pq[i].ratio * qr[i].ratio - pr[i].ratio) <= 1e-10 * pr[i].ratio);
    }
  }
}

TEST_CASE("moments and characteristic function") {
  CHECK(moment(AtomicMeasure::dirac(0.0), 1) == 0.0);
  CHECK(moment(fix_a(), 1) == doctest::Approx(0.5 * kLog3).epsilon(1e-15));
  CHECK(moment(fix_a(), 0) == doctest::Approx(1.0));
  CHECK(std::abs(cf_eval(fix_a(), 1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(cf_eval(fix_a(), 0.5) - std::sqrt(3.0) / 2) <= 1e-15);
  std::mt19937_64 rng(3);
  CHECK(std::abs(cf_eval(random_measure(rng, 6), 0.0) - 1.0) <= 1e-15);
}

TEST_CASE("characteristic function is positive definite on the imaginary axis") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = random_measure(rng, 9);
    std::vector<double> xs;
    for (int k = 0; k < 12; ++k) xs.push_back(-6.0 + k);
    Eigen::MatrixXcd gram(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) gram(i, j) = cf_eval(q, {0.0, xs[i] - xs[j]});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("distances") {
  std::mt19937_64 rng(5);
  const auto p = random_measure(rng, 5);
  CHECK(distance_w1(p, p) == 0.0);
  CHECK(distance_tv(p, p) == 0.0);
  CHECK(distance_w1(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(kLog3)) ==
        doctest::Approx(kLog3));
  CHECK(distance_tv(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(kLog3)) == doctest::Approx(1.0));
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_measure(rng, 4), b = random_measure(rng, 5), c = random_measure(rng, 3);
    CHECK(distance_w1(a, b) >= 0.0);
    CHECK(distance_w1(a, b) == doctest::Approx(distance_w1(b, a)));
    CHECK(distance_w1(a, c) <= distance_w1(a, b) + distance_w1(b, c) + 1e-12);
    CHECK(distance_tv(a, c) <= distance_tv(a, b) + distance_tv(b, c) + 1e-12);
    CHECK(distance_tv(a, b) <= 1.0 + 1e-15);
  }
  // W1 equals the integral of |F_P - F_Q|, computed here on a fine grid.
  const auto a = AtomicMeasure::from_atoms({{-1.0, 0.5}, {2.0, 0.5}});
  const auto b = AtomicMeasure::from_atoms({{0.0, 0.25}, {1.0, 0.75}});
  CHECK(distance_w1(a, b) == doctest::Approx(0.5 * 1 + 0.25 * 1 + 0.5 * 1));
}

TEST_CASE("weights recovered from characteristic function samples") {
  const std::vector<double> support{-1.2, 0.0, 0.4, 2.0};
  const std::vector<double> weights{0.1, 0.4, 0.3, 0.2};
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < support.size(); ++i) atoms.push_back({support[i], weights[i]});
  const auto q = AtomicMeasure::from_atoms(atoms);
  std::vector<std::complex<double>> alphas, values;
  for (int k = -10; k <= 10; ++k) {
    alphas.emplace_back(0.0, 0.5 * k);
    values.push_back(cf_eval(q, alphas.back()));
  }
  const auto w = recover_weights(support, alphas, values);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] - weights[i]) <= 1e-8);
}

TEST_CASE("CSV round trip with 17 significant digits") {
  std::mt19937_64 rng(6);
  const auto q = random_measure(rng, 6);
  std::stringstream ss;
  write_csv(ss, q);
  const std::string text = ss.str();
  CHECK(text.rfind("s,weight\n", 0) == 0);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(back.atoms()[i].location == q.atoms()[i].location);
    CHECK(back.atoms()[i].weight == q.atoms()[i].weight);
  }
  CHECK(format_number(0.1) == "0.10000000000000001");
  std::stringstream dirac;
  write_csv(dirac, AtomicMeasure::dirac(0.0));
  CHECK(dirac.str() == "s,weight\n0,1\n");
}
