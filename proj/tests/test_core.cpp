#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "robustsense/core.hpp"
#include "robustsense/instances.hpp"
#include "robustsense/rng.hpp"
#include "robustsense/search.hpp"
#include "oracles.hpp"

using namespace robustsense;

namespace {

// one-block instance holding the five-piece gap penalty: gap = 100 - u*z
ProblemInstance penalty_instance(double alpha1 = -2.0) {
  ProblemInstance inst;
  inst.feasible.n_cont = 1;
  inst.feasible.bounds = {VarBounds{0.0, 100.0}};
  inst.f0 = {0.0};
  MaxBlock blk;
  blk.norm = NormKind::Abs;
  blk.nominal = {9.0};  // u*z = 90 at z = 10 -> gap 10
  blk.perturbable = true;
  const double alphas[5] = {alpha1, 4.0, 40.0, 400.0, 0.0};
  const double betas[5] = {0.0, -20.0, -380.0, -7580.0, 0.0};
  for (int i = 0; i < 5; ++i) {
    BilinearAffinePiece p;
    p.slope = alphas[i];
    p.intercept = betas[i];
    p.base = 100.0;
    p.loadings = {Loading{0, 0, 1.0}};
    blk.terms.emplace_back(std::move(p));
  }
  inst.blocks.push_back(std::move(blk));
  return inst;
}

}  // namespace

TEST_CASE("dual norms in closed form") {
  CHECK(dual_norm({3.0, 4.0}, NormKind::L2) == doctest::Approx(5.0));
  CHECK(dual_norm({1.0, -2.0}, NormKind::Linf) == doctest::Approx(3.0));  // dual is l1
  CHECK(dual_norm({1.0, -2.0}, NormKind::L1) == doctest::Approx(2.0));    // dual is linf
  CHECK(dual_norm({-2.0}, NormKind::Abs) == doctest::Approx(2.0));
  CHECK_THROWS_AS(dual_norm({1.0, 2.0}, NormKind::Abs), std::invalid_argument);
}

TEST_CASE("dual norm matches a sampling oracle") {
  const std::vector<double> g = {1.0, -2.0};
  Rng rng(7);
  double best = -1e300;
  for (int i = 0; i < 100000; ++i) {
    double a = rng.gaussian(), b = rng.gaussian();
    double n = std::sqrt(a * a + b * b);
    if (n < 1e-12) continue;
    best = std::max(best, (g[0] * a + g[1] * b) / n);
  }
  CHECK(std::fabs(best - dual_norm(g, NormKind::L2)) < 1e-3);
}

TEST_CASE("dual norm homogeneity and symmetry") {
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    int dim = rng.uniform_int(1, 5);
    NormKind norm = dim == 1 ? NormKind::Abs
                             : std::vector{NormKind::L2, NormKind::L1,
                                           NormKind::Linf}[rng.uniform_int(0, 2)];
    std::vector<double> g(dim);
    for (double& v : g) v = rng.uniform(-3.0, 3.0);
    double c = rng.uniform(-2.0, 2.0);
    std::vector<double> neg(g), scaled(g);
    for (double& v : neg) v = -v;
    for (double& v : scaled) v *= c;
    double d = dual_norm(g, norm);
    CHECK(d >= 0.0);
    CHECK(dual_norm(neg, norm) == doctest::Approx(d).epsilon(1e-12));
    CHECK(dual_norm(scaled, norm) == doctest::Approx(std::fabs(c) * d).epsilon(1e-12));
    // argmax really attains the dual norm within the unit ball
    std::vector<double> w = dual_norm_argmax(g, norm);
    CHECK(norm_value(w, norm) <= 1.0 + 1e-12);
    double ip = 0.0;
    for (int t = 0; t < dim; ++t) ip += g[t] * w[t];
    CHECK(ip == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("objective of the search study at zero allocation is the prior mass") {
  SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
  ProblemInstance inst = to_problem_instance(si);
  std::vector<double> x(40, 0.0);
  CHECK(evaluate_objective(inst, nominal_parameters(inst), x) == doctest::Approx(1.0));
}

TEST_CASE("objective at the cap-8 optimal allocation") {
  SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
  ProblemInstance inst = to_problem_instance(si);
  SolveReport rep = solve_search(si, si.sweep);
  // frozen from an independent water-filling oracle; the published study
  // prints 0.448 here, which is below the attainable optimum of this model
  CHECK(rep.value == doctest::Approx(0.455723531646601).epsilon(1e-10));
  CHECK(evaluate_objective(inst, nominal_parameters(inst), rep.x) ==
        doctest::Approx(rep.value).epsilon(1e-12));
}

TEST_CASE("five-piece penalty at gap 10") {
  ProblemInstance inst = penalty_instance();
  // u*z = 90 -> gap 10 -> pieces {-20, 20, 20, -3580, 0}
  CHECK(evaluate_objective(inst, nominal_parameters(inst), {10.0}) == doctest::Approx(20.0));
}

TEST_CASE("objective errors name the offending block") {
  ProblemInstance inst = penalty_instance();
  CHECK_THROWS_WITH_AS(evaluate_objective(inst, {{1.0, 2.0}}, {10.0}),
                       doctest::Contains("block 0"), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_objective(inst, nominal_parameters(inst), {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("detection gradient structure") {
  NegExpDetection ne{0.08, 200.0 / 3600.0, 0};
  SUBCASE("zero effort kills the gradient") {
    auto g = term_grad_u(Term{ne}, {20.0}, {0.0});
    CHECK(g[0] == doctest::Approx(0.0));
  }
  SUBCASE("matches central differences") {
    std::vector<double> x = {3.0};
    auto f = [&](const std::vector<double>& u) { return term_value(Term{ne}, u, x); };
    auto g = term_grad_u(Term{ne}, {20.0}, x);
    auto fd = oracle::central_diff(f, {20.0});
    CHECK(std::fabs(g[0] - fd[0]) <= 1e-6 * (1.0 + std::fabs(g[0])));
  }
}

TEST_CASE("affine piece gradient is -slope times the loading") {
  BilinearAffinePiece p;
  p.slope = -2.0;
  p.base = 0.0;
  p.loadings = {Loading{0, 0, 1.0}, Loading{1, 1, 1.0}};
  auto g = term_grad_u(Term{p}, {0.0, 0.0}, {1.0, 0.5});
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("analytic gradients match finite differences on random terms") {
  Rng rng(2024);
  for (int it = 0; it < 100; ++it) {
    const int dim = rng.uniform_int(1, 4);
    BilinearAffinePiece p;
    p.slope = rng.uniform(-5.0, 5.0);
    p.intercept = rng.uniform(-10.0, 10.0);
    p.base = rng.uniform(-20.0, 20.0);
    std::vector<double> x(3);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    for (int t = 0; t < dim; ++t)
      p.loadings.push_back(Loading{t, rng.uniform_int(0, 2), rng.uniform(-2.0, 2.0)});
    std::vector<double> u(dim);
    for (double& v : u) v = rng.uniform(-3.0, 3.0);
    Term term{p};
    auto f = [&](const std::vector<double>& uu) { return term_value(term, uu, x); };
    auto g = term_grad_u(term, u, x);
    auto fd = oracle::central_diff(f, u);
    double gnorm = norm_value(g, NormKind::L2);
    for (int t = 0; t < dim; ++t) CHECK(std::fabs(g[t] - fd[t]) <= 1e-6 * (1.0 + gnorm));
  }
  for (int it = 0; it < 100; ++it) {
    NegExpDetection ne{rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0), 0};
    std::vector<double> x = {rng.uniform(0.0, 5.0)};
    std::vector<double> u = {rng.uniform(0.1, 30.0)};
    Term term{ne};
    auto f = [&](const std::vector<double>& uu) { return term_value(term, uu, x); };
    auto g = term_grad_u(term, u, x);
    auto fd = oracle::central_diff(f, u);
    CHECK(std::fabs(g[0] - fd[0]) <= 1e-6 * (1.0 + std::fabs(g[0])));
  }
}

TEST_CASE("objective is monotone in detection parameters and term-order invariant") {
  SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
  ProblemInstance inst = to_problem_instance(si);
  SolveReport rep = solve_search(si, si.sweep);
  auto u = nominal_parameters(inst);
  double base = evaluate_objective(inst, u, rep.x);
  for (auto& uk : u) uk[0] += 1.0;
  CHECK(evaluate_objective(inst, u, rep.x) <= base + 1e-15);

  // permuting terms within a block never changes the value
  ProblemInstance pen = penalty_instance();
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    ProblemInstance shuffled = pen;
    auto& terms = shuffled.blocks[0].terms;
    for (int i = static_cast<int>(terms.size()) - 1; i > 0; --i)
      std::swap(terms[i], terms[rng.uniform_int(0, i)]);
    double z = rng.uniform(0.0, 30.0);
    CHECK(evaluate_objective(shuffled, nominal_parameters(shuffled), {z}) ==
          doctest::Approx(evaluate_objective(pen, nominal_parameters(pen), {z})).epsilon(1e-15));
  }
}

TEST_CASE("instance validation catches bad wiring") {
  ProblemInstance inst = penalty_instance();
  SUBCASE("variable out of range") {
    std::get<BilinearAffinePiece>(inst.blocks[0].terms[0]).loadings[0].var = 7;
    CHECK_THROWS_AS(validate(inst), std::invalid_argument);
  }
  SUBCASE("abs norm needs scalar blocks") {
    inst.blocks[0].nominal = {1.0, 2.0};
    CHECK_THROWS_AS(validate(inst), std::invalid_argument);
  }
  SUBCASE("non-finite bounds rejected") {
    inst.feasible.bounds[0].upper = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate(inst), std::invalid_argument);
  }
}
