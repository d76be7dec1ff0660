#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qmet/tunnel.hpp"

using namespace qmet;

namespace {

MetricSpace two_point(double r) {
  MetricSpace X;
  X.labels = {"a", "b"};
  X.d = RMat::Zero(2, 2);
  X.d(0, 1) = X.d(1, 0) = r;
  return X;
}

MetricSpace random_metric(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RMat pts(2, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < 2; ++i) pts(i, j) = uni(rng);
  MetricSpace X;
  X.d = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    X.labels.push_back("p" + std::to_string(i));
    for (int j = 0; j < n; ++j) X.d(i, j) = (pts.col(i) - pts.col(j)).norm();
  }
  return X;
}

LipNorm pauli_lipnorm() {
  const Algebra m2 = Algebra::full(2);
  const int d = coord_dim(m2);
  RMat G(d, 3);
  Element a = from_coords(m2, RVec::Zero(d));
  Mat s(2, 2);
  s << 0, 1, 1, 0;
  a.m[0] = s;
  G.col(0) = to_coords(a);
  s << 0, cxd(0, -1), cxd(0, 1), 0;
  a.m[0] = s;
  G.col(1) = to_coords(a);
  s << 1, 0, 0, -1;
  a.m[0] = s;
  G.col(2) = to_coords(a);
  return LipNorm(m2, std::make_shared<VRepBall>(G, unit_coords(m2)));
}

}  // namespace

TEST_CASE("standard tunnel between equal two-point spaces has extent lam") {
  // the unit shift d = (s/2, s/2, -s/2, -s/2) with s = lam sits in the section
  // with L_D(d) = 1 and lmax gap s, and the mismatch term caps the gap at lam
  const double r = 1.5, eps = 0.25;
  const LipNorm L = lip_from_metric(two_point(r));
  const Tunnel t = standard_tunnel(L, L, eps);
  const double lam = r + eps;
  const TunnelInvariants inv = tunnel_invariants(t);
  REQUIRE(inv.depth.lb == 0.0);
  REQUIRE(inv.depth.ub == 0.0);
  REQUIRE(inv.extent.lb == inv.reach.lb);
  REQUIRE(inv.extent.ub == inv.reach.ub);
  REQUIRE(inv.extent.lb == Catch::Approx(lam).margin(1e-6));
  REQUIRE(inv.extent.ub == Catch::Approx(lam).margin(1e-6));
  REQUIRE(inv.length.ub == inv.reach.ub);
}

TEST_CASE("standard tunnel extent is bounded by max diameter plus eps") {
  for (unsigned seed : {3u, 4u}) {
    const MetricSpace XA = random_metric(3, seed), XB = random_metric(4, seed + 10);
    const LipNorm LA = lip_from_metric(XA), LB = lip_from_metric(XB);
    const double eps = 0.3;
    const double lam = std::max(XA.diam(), XB.diam()) + eps;
    const Tunnel t = standard_tunnel(LA, LB, eps);
    const TunnelInvariants inv = tunnel_invariants(t);
    REQUIRE(inv.extent.ub <= lam + 1e-9);
    REQUIRE(inv.extent.lb <= inv.extent.ub + 1e-12);
    REQUIRE(inv.extent.lb >= 0.0);
    // sandwich: reach <= length <= extent <= 2 length
    REQUIRE(inv.reach.ub <= inv.length.ub + 1e-12);
    REQUIRE(inv.length.ub <= inv.extent.ub + 1e-12);
    REQUIRE(inv.extent.lb <= 2.0 * inv.length.ub + 1e-9);
  }
}

TEST_CASE("standard tunnel satisfies the quotient condition on generators") {
  const LipNorm LA = lip_from_metric(random_metric(3, 8));
  const LipNorm LB = lip_from_metric(random_metric(3, 9));
  const Tunnel t = standard_tunnel(LA, LB, 0.2);
  REQUIRE(verify_quotient(t) < 1e-5);
}

TEST_CASE("quotient gauge finds exact lifts on the factor generators") {
  const LipNorm LA = lip_from_metric(two_point(2.0));
  const LipNorm LB = lip_from_metric(two_point(1.0));
  const Tunnel t = standard_tunnel(LA, LB, 0.5);
  const VRepBall* v = LA.vrep();
  REQUIRE(v != nullptr);
  for (int k = 0; k < v->G.cols(); ++k) {
    const double la = LA.ball->gauge(v->G.col(k)).v;
    const QuotientResult q = quotient_gauge(t.LD, t.piA, v->G.col(k));
    REQUIRE(q.value.converged);
    REQUIRE(q.value.ub == Catch::Approx(la).margin(1e-5));
    REQUIRE(q.value.lb <= q.value.ub + 1e-12);
    // the lift really projects back onto the generator
    REQUIRE((t.piA.M * q.lift - v->G.col(k)).norm() < 1e-7);
  }
}

TEST_CASE("target set probe returns admissible lifts with the norm bound") {
  const LipNorm LA = lip_from_metric(two_point(2.0));
  const LipNorm LB = lip_from_metric(two_point(1.0));
  const Tunnel t = standard_tunnel(LA, LB, 0.5);
  const Bracket ext = tunnel_extent(t);
  const Element a = from_coords(LA.alg, LA.vrep()->G.col(0));
  const TargetProbe p = target_set_probe(t, a, 1.0, ext.ub);
  REQUIRE(p.feasible);
  REQUIRE(p.lip <= 1.0 + 1e-6);
  REQUIRE(p.norm_bound == Catch::Approx(operator_norm(a) + 2.0 * ext.ub).margin(1e-9));
  REQUIRE((t.piA.M * p.d - to_coords(a)).norm() < 1e-6);
}

TEST_CASE("composed tunnels respect the subadditive extent bound") {
  const LipNorm LA = lip_from_metric(two_point(1.0));
  const LipNorm LB = lip_from_metric(two_point(1.2));
  const LipNorm LC = lip_from_metric(two_point(0.8));
  const double eps = 0.25;
  const Tunnel t1 = standard_tunnel(LA, LB, eps);
  const Tunnel t2 = standard_tunnel(LB, LC, eps);
  const Bracket e1 = tunnel_extent(t1), e2 = tunnel_extent(t2);
  const Tunnel tc = compose_tunnels(t1, t2, eps, e1.ub, e2.ub);
  REQUIRE_FALSE(tc.direct_sum);
  const TunnelInvariants inv = tunnel_invariants(tc);
  REQUIRE(inv.extent.ub <= e1.ub + e2.ub + eps + 1e-9);
  REQUIRE(inv.extent.lb <= inv.extent.ub + 1e-12);
  REQUIRE(inv.depth.ub <= inv.extent.ub + 1e-12);
  REQUIRE(inv.reach.ub <= inv.extent.ub + 1e-12);
  // composed projections still hit the right factors
  REQUIRE(tc.piA.M.rows() == coord_dim(LA.alg));
  REQUIRE(tc.piB.M.rows() == coord_dim(LC.alg));
}

TEST_CASE("bridge tunnel with the identity pivot behaves like a mismatch bridge") {
  const LipNorm LA = lip_from_metric(two_point(1.0));
  const LipNorm LB = lip_from_metric(two_point(1.5));
  const double lam = 2.0;
  const Tunnel t = bridge_tunnel(LA, LB, Mat::Identity(2, 2), lam);
  const TunnelInvariants inv = tunnel_invariants(t);
  REQUIRE(inv.extent.ub <= lam + 1e-9);
  REQUIRE(inv.depth.ub == 0.0);
  REQUIRE(verify_quotient(t) < 1e-5);
}

TEST_CASE("bridge tunnel rejects pivots that no state annihilates") {
  const LipNorm LA = lip_from_metric(two_point(1.0));
  const LipNorm LB = lip_from_metric(two_point(1.5));
  REQUIRE_THROWS_AS(bridge_tunnel(LA, LB, Mat::Zero(2, 2), 1.0),
                    std::invalid_argument);
}

TEST_CASE("bridge tunnel accepts a rank-deficient admissible pivot") {
  const LipNorm LA = lip_from_metric(two_point(1.0));
  const LipNorm LB = lip_from_metric(two_point(1.5));
  Mat omega = Mat::Zero(2, 2);
  omega(0, 0) = 1.0;  // 1 - omega annihilated by the first basis state
  const Tunnel t = bridge_tunnel(LA, LB, omega, 2.0);
  const TunnelInvariants inv = tunnel_invariants(t);
  REQUIRE(inv.extent.lb >= 0.0);
  REQUIRE(inv.extent.ub < kInf);
  REQUIRE(inv.extent.lb <= inv.extent.ub + 1e-12);
}

TEST_CASE("noncommutative standard tunnel invariants stay consistent") {
  const LipNorm LA = pauli_lipnorm();
  const LipNorm LB = lip_from_metric(two_point(1.0));
  const double eps = 0.5;
  const Tunnel t = standard_tunnel(LA, LB, eps);
  const double lam = std::max(diameter(LA).ub, 1.0) + eps;
  DCOptions opt;
  opt.coarse_n = 80;
  opt.fine_cap = 2048;
  const TunnelInvariants inv = tunnel_invariants(t, opt);
  REQUIRE(inv.extent.ub <= lam + 1e-9);
  REQUIRE(inv.extent.lb >= 0.0);
  REQUIRE(inv.extent.lb <= inv.extent.ub + 1e-12);
  REQUIRE(inv.depth.ub == 0.0);
  REQUIRE(inv.extent.ub == inv.reach.ub);
}
