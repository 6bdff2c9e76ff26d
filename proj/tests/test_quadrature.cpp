#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rsmm/quadrature.hpp"

using namespace rsmm;

namespace {

ValueVector random_vector(std::mt19937_64& g, int q_max, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ValueVector y(q_max);
  for (int q = -q_max; q <= q_max; ++q) y[q] = u(g);
  return y;
}

// direct 2D max-shifted log-sum-exp over the tensor grid
double soft_dense(int q, const ValueVector& y, double lambda, const ActionGrid& g, const Model& m) {
  double mx = -INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) mx = std::max(mx, hamiltonian(q, y, {g.node(i), g.node(j)}, m));
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      s += g.weight(i, j) * std::exp((hamiltonian(q, y, {g.node(i), g.node(j)}, m) - mx) / lambda);
  return mx + lambda * std::log(s);
}

}  // namespace

TEST_CASE("gauss legendre small rules") {
  auto r1 = gauss_legendre(1);
  CHECK(r1.nodes[0] == doctest::Approx(0.0));
  CHECK(r1.weights[0] == doctest::Approx(2.0));
  auto r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0));
  CHECK(r2.weights[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(gauss_legendre(0), std::domain_error);
}

TEST_CASE("gauss legendre exactness and invariants") {
  for (std::size_t n : {3u, 17u, 61u, 321u}) {
    auto r = gauss_legendre(n, 0.01, 0.70);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w += r.weights[i];
      CHECK(r.weights[i] > 0.0);
      CHECK(r.nodes[i] > 0.01);
      CHECK(r.nodes[i] < 0.70);
      if (i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    }
    CHECK(w == doctest::Approx(0.69).epsilon(1e-14));
  }
  // degree 2n-1 exactness: int_{-1}^1 x^10 = 2/11 with 6 nodes
  auto r = gauss_legendre(6);
  double s = 0.0;
  for (std::size_t i = 0; i < 6; ++i) s += r.weights[i] * std::pow(r.nodes[i], 10);
  CHECK(s == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("uniform law moments") {
  ActionGrid g(61, 0.01, 0.70);
  double mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mean += g.prob(i) * g.node(i);
  CHECK(std::abs(mean - 0.355) <= 1e-14);
  CHECK(expectation_under_nu([](const Quote&) { return 2.5; }, g) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(expectation_under_nu([](const Quote& d) { return d.ask; }, g) == doctest::Approx(0.355).epsilon(1e-14));
  CHECK(expectation_under_nu([](const Quote& d) { return d.ask * d.bid; }, g) ==
        doctest::Approx(0.355 * 0.355).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(expectation_under_nu([](const Quote& d) { return d.ask > 0.6 ? NAN : 0.0; }, g),
                       doctest::Contains("node"), std::runtime_error);
}

TEST_CASE("soft hamiltonian") {
  Model m{ModelParams{}};
  ActionGrid g(61, m.params());
  auto zero = Intensity::generic([](double) { return 0.0; });
  Model z(ModelParams{}, zero, zero);
  ValueVector y0(5);
  for (double lam : {1.0, 0.05, 1e-4}) CHECK(soft_hamiltonian(0, y0, lam, g, z) == doctest::Approx(0.0));
  CHECK(soft_hamiltonian(3, y0, 1e-3, g, z) == doctest::Approx(z.running_penalty(3)).epsilon(1e-13));
  CHECK_THROWS_AS(soft_hamiltonian(0, y0, 0.0, g, m), std::domain_error);

  ValueVector term = m.terminal();
  for (double lam : {0.05, 0.005}) CHECK(soft_hamiltonian(0, term, lam, g, m) <= hard_hamiltonian(0, term, g, m).value);
  CHECK(std::isfinite(soft_hamiltonian(5, term, 1e-4, g, m)));

  // separable evaluation equals the dense 2D formula
  std::mt19937_64 gen(11);
  ActionGrid g17(17, m.params());
  for (int it = 0; it < 20; ++it) {
    ValueVector y = random_vector(gen, 5, 1.0);
    for (int q : {-5, -1, 0, 4, 5})
      for (double lam : {0.5, 0.02, 0.001})
        CHECK(soft_hamiltonian(q, y, lam, g17, m) == doctest::Approx(soft_dense(q, y, lam, g17, m)).epsilon(1e-12));
  }
}

TEST_CASE("soft hamiltonian shift exactness and entropy bias") {
  Model m{ModelParams{}};
  ActionGrid g(61, m.params());
  std::mt19937_64 gen(5);
  std::vector<double> s(g.size());
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& x : s) x = u(gen);
  double base = weighted_lse(s, g.probs(), 0.01);
  for (auto& x : s) x += 123.25;
  CHECK(weighted_lse(s, g.probs(), 0.01) - base == doctest::Approx(123.25).epsilon(1e-15));

  for (int it = 0; it < 50; ++it) {
    ValueVector y = random_vector(gen, 5, 0.5);
    for (int q = -5; q <= 5; ++q) {
      auto hm = hard_hamiltonian(q, y, g, m);
      for (double lam : {0.05, 0.005, 0.0005}) {
        double sv = soft_hamiltonian(q, y, lam, g, m);
        CHECK(sv <= hm.value + 1e-14);
        CHECK(hm.value - sv <= 2.0 * lam * (1.0 + std::abs(std::log(lam))));
      }
      for (std::size_t i = 0; i < g.size(); i += 7)
        for (std::size_t j = 0; j < g.size(); j += 5)
          CHECK(hamiltonian(q, y, {g.node(i), g.node(j)}, m) <= hm.value + 1e-14);
    }
  }
}

TEST_CASE("hard hamiltonian") {
  Model m{ModelParams{}};
  ActionGrid g(61, m.params());
  auto r = hard_hamiltonian(0, ValueVector(5), g, m);
  double star = 10.0 * std::log(1.0 + 0.1 / 1.5);
  CHECK(r.argmax.ask == doctest::Approx(star).epsilon(1e-14));
  CHECK(r.argmax.bid == doctest::Approx(star).epsilon(1e-14));
  CHECK(star == doctest::Approx(0.64539).epsilon(1e-5));

  auto lo = hard_hamiltonian(-5, m.terminal(), g, m);
  CHECK(lo.argmax.ask == 0.01);
  auto hi = hard_hamiltonian(5, m.terminal(), g, m);
  CHECK(hi.argmax.bid == 0.01);

  // closed form vs 321-node grid search + golden section through the generic path
  auto ea = Intensity::generic([](double d) { return 1.5 * std::exp(-1.5 * d); });
  Model gm(ModelParams{}, ea, ea);
  ActionGrid g321(321, m.params());
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> qi(-5, 5);
  for (int it = 0; it < 100; ++it) {
    ValueVector y = random_vector(gen, 5, 0.6);
    int q = qi(gen);
    auto a = hard_hamiltonian(q, y, g321, m);
    auto b = hard_hamiltonian(q, y, g321, gm);
    CHECK(std::abs(a.argmax.ask - b.argmax.ask) <= 1e-8);
    CHECK(std::abs(a.argmax.bid - b.argmax.bid) <= 1e-8);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }
}

TEST_CASE("quadrature self-consistency on baseline states") {
  Model m{ModelParams{}};
  ActionGrid g61(61, m.params()), g321(321, m.params());
  ValueVector y = m.terminal();
  for (int q = -5; q <= 5; ++q)
    for (double lam : {0.05, 0.02, 0.005})
      CHECK(std::abs(soft_hamiltonian(q, y, lam, g61, m) - soft_hamiltonian(q, y, lam, g321, m)) <= 1e-10);
}
