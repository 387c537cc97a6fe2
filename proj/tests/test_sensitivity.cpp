#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "robustsense/core.hpp"
#include "robustsense/instances.hpp"
#include "robustsense/rng.hpp"
#include "robustsense/search.hpp"
#include "robustsense/sensitivity.hpp"

using namespace robustsense;

namespace {

ProblemInstance penalty_instance(double unom) {
  ProblemInstance inst;
  inst.feasible.n_cont = 1;
  inst.feasible.bounds = {VarBounds{0.0, 100.0}};
  inst.f0 = {0.0};
  MaxBlock blk;
  blk.norm = NormKind::Abs;
  blk.nominal = {unom};
  const double alphas[5] = {-2.0, 4.0, 40.0, 400.0, 0.0};
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

// random all-L2 instance over a small box plus a random interior point; the
// estimates are defined at any point, no optimization involved
ProblemInstance random_l2_instance(Rng& rng, std::vector<double>& x_out) {
  ProblemInstance inst;
  const int n = rng.uniform_int(1, 4);
  inst.feasible.n_cont = n;
  inst.feasible.bounds.assign(n, VarBounds{-2.0, 2.0});
  inst.f0.assign(n, 0.0);
  const int nb = rng.uniform_int(1, 3);
  for (int k = 0; k < nb; ++k) {
    MaxBlock blk;
    blk.norm = NormKind::L2;
    const int dim = rng.uniform_int(1, 4);
    blk.nominal.resize(dim);
    for (double& v : blk.nominal) v = rng.uniform(-2.0, 2.0);
    blk.perturbable = rng.uniform01() < 0.8;
    const int terms = rng.uniform_int(1, 4);
    for (int i = 0; i < terms; ++i) {
      BilinearAffinePiece p;
      p.slope = rng.uniform(-3.0, 3.0);
      p.intercept = rng.uniform(-5.0, 5.0);
      p.base = rng.uniform(-5.0, 5.0);
      for (int t = 0; t < dim; ++t)
        p.loadings.push_back(Loading{t, rng.uniform_int(0, n - 1), rng.uniform(-2.0, 2.0)});
      blk.terms.emplace_back(std::move(p));
    }
    inst.blocks.push_back(std::move(blk));
  }
  x_out.resize(n);
  for (double& v : x_out) v = rng.uniform(-2.0, 2.0);
  return inst;
}

}  // namespace

TEST_CASE("active sets detect the documented penalty ties") {
  // gap 5: piece values (-10, 0, -180, -5580, 0) -> pieces 2 and 5
  ProblemInstance at5 = penalty_instance(9.5);  // 100 - 9.5*10 = 5 at z = 10
  ActiveSets a5 = active_sets(at5, {10.0}, kDefaultTieTol);
  CHECK(a5.active[0] == std::vector<int>{1, 4});
  // gap 10: (-20, 20, 20, -3580, 0) -> pieces 2 and 3
  ProblemInstance at10 = penalty_instance(9.0);
  ActiveSets a10 = active_sets(at10, {10.0}, kDefaultTieTol);
  CHECK(a10.active[0] == std::vector<int>{1, 2});

  SUBCASE("exact ties survive tol = 0") {
    CHECK(active_sets(at5, {10.0}, 0.0).active[0] == std::vector<int>{1, 4});
    CHECK(active_sets(at10, {10.0}, 0.0).active[0] == std::vector<int>{1, 2});
  }
  SUBCASE("single-term blocks are always active") {
    SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
    ProblemInstance inst = to_problem_instance(si);
    ActiveSets act = active_sets(inst, std::vector<double>(40, 0.0), 0.0);
    for (const auto& a : act.active) CHECK(a == std::vector<int>{0});
  }
  SUBCASE("shrinking tol never enlarges an active set") {
    Rng rng(31);
    std::vector<double> x;
    for (int it = 0; it < 50; ++it) {
      ProblemInstance inst = random_l2_instance(rng, x);
      ActiveSets coarse = active_sets(inst, x, 1e-3);
      ActiveSets fine = active_sets(inst, x, 1e-9);
      for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
        CHECK(fine.active[k].size() <= coarse.active[k].size());
        CHECK(!fine.active[k].empty());
      }
    }
  }
}

TEST_CASE("modulus estimates on the bundled search study") {
  // frozen from an independent water-filling oracle at the cap-8 nominal
  // minimizer; the published study prints 0.00389/0.00052/0.00336 here, from
  // data inconsistent with its stated uniform 20-mile sweep width
  auto lips = [](SearchCase c) {
    SearchInstance si = build_search_instance(c, 8, 5.0);
    ProblemInstance inst = to_problem_instance(si);
    SolveReport rep = solve_search(si, si.sweep);
    return lip_radius_estimate(inst, {rep.x});
  };
  CHECK(lips(SearchCase::A) == doctest::Approx(0.004961601617583).epsilon(1e-8));
  CHECK(lips(SearchCase::B) == doctest::Approx(0.001740166782929).epsilon(1e-8));
  CHECK(lips(SearchCase::C) == doctest::Approx(0.003221434834654).epsilon(1e-8));

  SUBCASE("zero allocation kills the estimate") {
    SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
    ProblemInstance inst = to_problem_instance(si);
    CHECK(lip_radius_estimate(inst, {std::vector<double>(40, 0.0)}) == doctest::Approx(0.0));
  }
  SUBCASE("empty minimizer list is an error") {
    SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
    CHECK_THROWS_AS(lip_radius_estimate(to_problem_instance(si), {}), std::invalid_argument);
  }
}

TEST_CASE("joint modulus simplifications") {
  // single active term with gradient (3,4) on an L2 block: sqrt(2) * 5
  ProblemInstance inst;
  inst.feasible.n_cont = 2;
  inst.feasible.bounds = {VarBounds{-5.0, 5.0}, VarBounds{-5.0, 5.0}};
  inst.f0 = {0.0, 0.0};
  MaxBlock blk;
  blk.norm = NormKind::L2;
  blk.nominal = {0.0, 0.0};
  BilinearAffinePiece p;
  p.slope = -1.0;
  p.loadings = {Loading{0, 0, 1.0}, Loading{1, 1, 1.0}};
  blk.terms.emplace_back(p);
  inst.blocks.push_back(blk);
  std::vector<double> x = {3.0, 4.0};
  CHECK(lip_full_estimate(inst, {x}) == doctest::Approx(std::sqrt(2.0) * 5.0).epsilon(1e-12));
  CHECK(lip_full_estimate(inst, {std::vector<double>{0.0, 0.0}}) == doctest::Approx(0.0));

  SUBCASE("scalar block against a grid oracle") {
    ProblemInstance pen;
    pen.feasible.n_cont = 1;
    pen.feasible.bounds = {VarBounds{-5.0, 5.0}};
    pen.f0 = {0.0};
    MaxBlock b;
    b.norm = NormKind::Abs;
    b.nominal = {1.0};
    BilinearAffinePiece q;
    q.slope = 2.0;  // gradient -2 at z = 1
    q.loadings = {Loading{0, 0, 1.0}};
    b.terms.emplace_back(q);
    pen.blocks.push_back(b);
    std::vector<double> x1 = {1.0};
    double grid = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      double w = -1.0 + 2.0 * i / 20000.0;
      double g = -2.0;
      grid = std::max(grid, std::sqrt(g * g + (g * w) * (g * w)));
    }
    CHECK(lip_full_estimate(pen, {x1}) == doctest::Approx(grid).epsilon(1e-6));
    CHECK(lip_full_estimate(pen, {x1}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  }
}

TEST_CASE("all-L2 identity and permutation invariance") {
  Rng rng(97);
  std::vector<double> x;
  for (int it = 0; it < 100; ++it) {
    ProblemInstance inst = random_l2_instance(rng, x);
    double radius = lip_radius_estimate(inst, {x});
    double full = lip_full_estimate(inst, {x});
    CHECK(full >= radius - 1e-15);
    CHECK(full == doctest::Approx(std::sqrt(2.0) * radius).epsilon(1e-12));

    ProblemInstance perm = inst;
    std::reverse(perm.blocks.begin(), perm.blocks.end());
    for (auto& b : perm.blocks) std::reverse(b.terms.begin(), b.terms.end());
    CHECK(lip_radius_estimate(perm, {x}) == doctest::Approx(radius).epsilon(1e-12));
  }
}

TEST_CASE("robust-value prediction is affine in the radius") {
  CHECK(predict_robust_value(0.448, 0.00389, 5.0) == doctest::Approx(0.46745).epsilon(1e-12));
  CHECK(predict_robust_value(0.282, 0.01386, 10.0) == doctest::Approx(0.4206).epsilon(1e-12));
  CHECK(predict_robust_value(0.7, 123.0, 0.0) == doctest::Approx(0.7));
  CHECK_THROWS_AS(predict_robust_value(0.5, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("subgradient certificates") {
  ProblemInstance inst = penalty_instance(9.0);
  std::vector<double> x = {10.0};

  SUBCASE("single-term certificate with w = 0") {
    SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
    ProblemInstance search = to_problem_instance(si);
    SubgradientCertificate cert;
    cert.xbar.assign(40, 0.0);
    cert.g.assign(20, 0.0);
    cert.gamma = 0.0;
    for (int k = 0; k < 20; ++k) cert.entries.push_back({k, 0, 1.0, {0.0}});
    auto res = check_subgradient_certificate(cert, search);
    CHECK(res.valid);
    CHECK(res.violations.empty());
  }
  SUBCASE("multipliers summing to 0.9 are flagged") {
    SubgradientCertificate cert;
    cert.xbar = x;
    cert.entries.push_back({0, 1, 0.5, {0.0}});
    cert.entries.push_back({0, 2, 0.4, {0.0}});
    std::vector<double> g1 = term_grad_u(inst.blocks[0].terms[1], inst.blocks[0].nominal, x);
    std::vector<double> g2 = term_grad_u(inst.blocks[0].terms[2], inst.blocks[0].nominal, x);
    cert.g = {0.5 * g1[0] + 0.4 * g2[0]};
    cert.gamma = 0.0;
    auto res = check_subgradient_certificate(cert, inst);
    CHECK(!res.valid);
    bool simplex = false;
    for (const auto& v : res.violations)
      simplex = simplex || v.find("simplex") != std::string::npos;
    CHECK(simplex);
  }
  SUBCASE("random valid pair matches an independent assembly") {
    Rng rng(12345);
    for (int it = 0; it < 50; ++it) {
      double y1 = rng.uniform01();
      SubgradientCertificate cert;
      cert.xbar = x;
      double w1 = rng.uniform(-1.0, 1.0), w2 = rng.uniform(-1.0, 1.0);
      cert.entries.push_back({0, 1, y1, {w1}});
      cert.entries.push_back({0, 2, 1.0 - y1, {w2}});
      std::vector<double> g1 = term_grad_u(inst.blocks[0].terms[1], inst.blocks[0].nominal, x);
      std::vector<double> g2 = term_grad_u(inst.blocks[0].terms[2], inst.blocks[0].nominal, x);
      cert.g = {y1 * g1[0] + (1.0 - y1) * g2[0]};
      cert.gamma = y1 * g1[0] * w1 + (1.0 - y1) * g2[0] * w2;
      auto res = check_subgradient_certificate(cert, inst, 1e-12);
      CHECK(res.valid);
    }
  }
  SUBCASE("norm violations are reported") {
    SubgradientCertificate cert;
    cert.xbar = x;
    cert.entries.push_back({0, 1, 1.0, {1.5}});
    cert.g = term_grad_u(inst.blocks[0].terms[1], inst.blocks[0].nominal, x);
    cert.gamma = 1.5 * cert.g[0];
    auto res = check_subgradient_certificate(cert, inst);
    CHECK(!res.valid);
  }
}

TEST_CASE("sensitivity report carries display rounding") {
  SearchInstance si = build_search_instance(SearchCase::A, 8, 5.0);
  ProblemInstance inst = to_problem_instance(si);
  SolveReport rep = solve_search(si, si.sweep);
  SensitivityReport sens = sensitivity_report(inst, {rep.x}, rep.value);
  nlohmann::json j = to_json(sens);
  CHECK(j["display"]["q0"] == "0.456");
  CHECK(j["display"]["lip_radius"] == "0.00496");
  CHECK(j["q0"].get<double>() == doctest::Approx(0.455723531646601).epsilon(1e-10));
}
