#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qmet/dc.hpp"

using namespace qmet;

TEST_CASE("vrep gauge is the l1 coefficient norm (cross polytope)") {
  RMat G(2, 2);
  G << 1, 0, 0, 1;
  VRepBall b(G, RVec::Zero(2));
  RVec x(2);
  x << 1, 1;
  const SupportCut sc = b.support_cut(x);
  REQUIRE(sc.g.v == Catch::Approx(2.0));
  REQUIRE(sc.y.dot(x) == Catch::Approx(2.0));
  for (int k = 0; k < 2; ++k) REQUIRE(std::abs(sc.y.dot(G.col(k))) <= 1.0 + 1e-9);
  x << 0.25, -0.5;
  REQUIRE(b.gauge(x).v == Catch::Approx(0.75));
}

TEST_CASE("vrep gauge off the span is infinite, with a separating cut") {
  RMat G(2, 1);
  G << 1, 0;
  VRepBall b(G, RVec::Zero(2));
  RVec x(2);
  x << 0, 1;
  const SupportCut sc = b.support_cut(x);
  REQUIRE_FALSE(sc.g.finite);
  REQUIRE(sc.y.dot(x) > 1.0);                       // cuts x off
  REQUIRE(std::abs(sc.y.dot(G.col(0))) < 1e-9);     // sup over ball is 0
}

TEST_CASE("vrep with a unit line kills the unit direction") {
  const Algebra a = Algebra::commutative(2);
  RMat G(2, 1);
  G << 0.5, -0.5;
  VRepBall b(G, unit_coords(a));
  REQUIRE(b.gauge(unit_coords(a)).v == Catch::Approx(0.0).margin(1e-12));
  RVec x(2);
  x << 1, -1;
  REQUIRE(b.gauge(x).v == Catch::Approx(2.0));
  x << 2, 0;  // = (1,-1) + (1,1)
  REQUIRE(b.gauge(x).v == Catch::Approx(2.0));
}

TEST_CASE("opnorm ball gauge and eigenstate cut") {
  const Algebra m2 = Algebra::full(2);
  OpNormBall b(m2, 2.0);
  Element sx(m2);
  sx.m[0] << 0, 1, 1, 0;
  const RVec x = to_coords(sx);
  const SupportCut sc = b.support_cut(x);
  REQUIRE(sc.g.v == Catch::Approx(0.5));
  REQUIRE(sc.y.dot(x) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("gen norm ball matches singular values") {
  GenNormBall b(2, 2, 1.0);
  Mat m(2, 2);
  m << cxd(1, 1), 0, 0, 0;
  const RVec x = gen_to_coords(m);
  REQUIRE(b.gauge(x).v == Catch::Approx(std::sqrt(2.0)));
  const SupportCut sc = b.support_cut(x);
  REQUIRE(sc.y.dot(x) == Catch::Approx(std::sqrt(2.0)).margin(1e-9));
  REQUIRE((gen_from_coords(2, 2, x) - m).norm() < 1e-12);
}

TEST_CASE("max ball takes the largest term") {
  const Algebra m2 = Algebra::full(2);
  std::vector<MaxBall::Term> terms;
  terms.push_back({RMat::Identity(4, 4), std::make_shared<OpNormBall>(m2, 1.0)});
  terms.push_back({RMat::Identity(4, 4), std::make_shared<OpNormBall>(m2, 2.0)});
  MaxBall b(4, std::move(terms));
  Element sz(m2);
  sz.m[0] << 1, 0, 0, -1;
  REQUIRE(b.gauge(to_coords(sz)).v == Catch::Approx(1.0));
}

TEST_CASE("cutting-plane linear maximization over a section") {
  // two-point space at distance 3: ball {|f1 - f2| <= 3} + unit line,
  // tracial section f1 + f2 = 0; max f1 = 1.5
  const Algebra a = Algebra::commutative(2);
  RMat G(2, 1);
  G << 1.5, -1.5;
  VRepBall ball(G, unit_coords(a));
  RVec c(2);
  c << 1, 0;
  const LinMaxResult r = linear_max_section(
      ball, c, {{State::tracial(a).coords(), 0.0}});
  REQUIRE(r.ok);
  REQUIRE(r.ub == Catch::Approx(1.5).margin(1e-7));
  REQUIRE(r.lb == Catch::Approx(1.5).margin(1e-7));
}

TEST_CASE("distance to hull in operator norm") {
  const Algebra a = Algebra::commutative(2);
  RMat Q(2, 2);
  Q << 0, 1, 0, 0;  // hull of (0,0) and (1,0)
  RVec v(2);
  v << 2, 0;
  const DistResult d = dist_opnorm_to_hull(a, v, Q);
  REQUIRE(d.ub == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(d.lb == Catch::Approx(1.0).margin(1e-7));
  const auto [hlb, hub] = hausdorff_polytopes(a, RMat(v), Q);
  REQUIRE(hub == Catch::Approx(2.0).margin(1e-6));  // (0,0) is 2 away from {v}
}

TEST_CASE("vertex enumeration of a box") {
  std::vector<std::pair<RVec, double>> rows;
  for (int i = 0; i < 2; ++i)
    for (double s : {1.0, -1.0}) {
      RVec r = RVec::Zero(2);
      r(i) = s;
      rows.push_back({r, 1.0});
    }
  const Polytope p = enumerate_vertices(rows);
  REQUIRE(p.nv() == 4);
  for (int k = 0; k < 4; ++k) REQUIRE(p.V.col(k).lpNorm<Eigen::Infinity>() == Catch::Approx(1.0));
}

TEST_CASE("fibonacci mesh covering bound is conservative") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int n : {320, 2048, 16384}) {
    const auto pts = qmet::dcdetail::fibonacci_sphere(n);
    const double bound = qmet::dcdetail::fib_cover(n);
    double worst = 0.0;
    for (int t = 0; t < 20000; ++t) {
      Eigen::Vector3d u(g(rng), g(rng), g(rng));
      u.normalize();
      double best = 1e9;
      for (const auto& p : pts) best = std::min(best, (u - p).norm());
      worst = std::max(worst, best);
    }
    REQUIRE(worst < 0.85 * bound);
  }
}

TEST_CASE("dc bracket: identical convex and concave parts give zero") {
  const Algebra m2 = Algebra::full(2);
  OpNormBall ball(m2, 1.0);
  BallSectionRegion region(ball, {{State::tracial(m2).coords(), 0.0}});
  const SpecFun f = SpecFun::linear(m2, RMat::Identity(4, 4));
  const DCResult r = dc_bracket(region, f, {f});
  REQUIRE(r.lb == Catch::Approx(0.0).margin(1e-9));
  // ub carries the fine-mesh covering inflation but nothing more
  REQUIRE(r.ub >= 0.0);
  REQUIRE(r.ub < 0.05);
  REQUIRE(r.certified);
}

TEST_CASE("dc bracket: norm maximization over the traceless M2 section") {
  const Algebra m2 = Algebra::full(2);
  OpNormBall ball(m2, 1.0);
  BallSectionRegion region(ball, {{State::tracial(m2).coords(), 0.0}});
  const SpecFun f = SpecFun::linear(m2, RMat::Identity(4, 4));
  const DCResult r = dc_bracket(region, f, {});
  REQUIRE(r.lb == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(r.ub >= r.lb - 1e-12);
  REQUIRE(r.ub < 1.06);  // mesh inflation stays small
  REQUIRE(r.certified);
}

TEST_CASE("dc bracket over a polytope matches a grid oracle") {
  // f(x) = |x1| - max(|x2|, 0.3) on the box [-1,1]^2, encoded spectrally on
  // commutative targets; true maximum is 1 - 0.3 = 0.7 at |x1|=1, x2=0.
  const Algebra c2 = Algebra::commutative(2);
  RMat V(2, 4);
  V << 1, 1, -1, -1, 1, -1, 1, -1;
  PolytopeRegion region(V);
  SpecFun cvx;  // lmax of (x1, -x1) = |x1|
  cvx.T = c2;
  cvx.P = RMat::Zero(2, 2);
  cvx.P(0, 0) = 1;
  cvx.P(1, 0) = -1;
  cvx.c0 = RVec::Zero(2);
  SpecFun ccv;  // lmax of (x2, -x2, 0.3)
  ccv.T = Algebra::commutative(3);
  ccv.P = RMat::Zero(3, 2);
  ccv.P(0, 1) = 1;
  ccv.P(1, 1) = -1;
  ccv.c0 = RVec::Zero(3);
  ccv.c0(2) = 0.3;
  const DCResult r = dc_bracket(region, cvx, {ccv});
  REQUIRE(r.lb == Catch::Approx(0.7).margin(1e-6));
  REQUIRE(r.ub == Catch::Approx(0.7).margin(1e-6));
  REQUIRE(r.certified);
}
