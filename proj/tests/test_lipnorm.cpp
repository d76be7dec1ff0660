#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qmet/lipnorm.hpp"

using namespace qmet;

namespace {

// points in the plane => guaranteed metric
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

// independent Kantorovich LP: max (p-q).f over |f_i - f_j| <= d(i,j)
double mk_oracle(const MetricSpace& X, const RVec& p, const RVec& q) {
  const int n = X.n();
  LP lp(n);
  lp.c = p - q;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      RVec r = RVec::Zero(n);
      r(i) = 1.0;
      r(j) = -1.0;
      lp.add_le(r, X.d(i, j));
      lp.add_le(-r, X.d(i, j));
    }
  RVec e0 = RVec::Zero(n);
  e0(0) = 1.0;
  lp.add_eq(e0, 0.0);  // pin the constant direction
  const LPResult r = lp.solve();
  REQUIRE(r.status == LPStatus::Optimal);
  return r.objective;
}

State mixed_state(const Algebra& A, const RVec& p) {
  State s(A);
  for (int j = 0; j < A.num_blocks(); ++j) s.rho[j](0, 0) = p(j);
  return s;
}

RVec random_prob(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.01, 1.0);
  RVec p(n);
  for (int i = 0; i < n; ++i) p(i) = uni(rng);
  return p / p.sum();
}

// the composite-ball route lip_from_metric takes for large n, at any size
LipNorm metric_lipnorm_generic(const MetricSpace& X) {
  const int n = X.n();
  const Algebra A = Algebra::commutative(n);
  std::vector<MaxBall::Term> terms;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      RMat P(1, n);
      P.setZero();
      P(0, i) = 1.0 / X.d(i, j);
      P(0, j) = -1.0 / X.d(i, j);
      terms.push_back({P, std::make_shared<OpNormBall>(Algebra::commutative(1), 1.0)});
    }
  return LipNorm(A, std::make_shared<MaxBall>(n, std::move(terms)),
                 Permissible{1.0, 0.0});
}

Element pauli(const Algebra& m2, int which) {
  Element a = from_coords(m2, RVec::Zero(coord_dim(m2)));
  Mat s(2, 2);
  if (which == 0) s << 0, 1, 1, 0;
  if (which == 1) s << 0, cxd(0, -1), cxd(0, 1), 0;
  if (which == 2) s << 1, 0, 0, -1;
  a.m[0] = s;
  return a;
}

}  // namespace

TEST_CASE("MK distance recovers the metric and matches the Kantorovich LP") {
  std::mt19937_64 rng(17);
  for (int n : {3, 4, 5}) {
    const MetricSpace X = random_metric(n, 100 + n);
    const LipNorm L = lip_from_metric(X);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Bracket b = mk_distance(L, State::point(L.alg, i), State::point(L.alg, j));
        REQUIRE(b.ub == Catch::Approx(X.d(i, j)).margin(1e-8));
        REQUIRE(b.lb == Catch::Approx(X.d(i, j)).margin(1e-8));
      }
    for (int t = 0; t < 5; ++t) {
      const RVec p = random_prob(n, rng), q = random_prob(n, rng);
      const double ref = mk_oracle(X, p, q);
      const Bracket b = mk_distance(L, mixed_state(L.alg, p), mixed_state(L.alg, q));
      REQUIRE(b.lb == Catch::Approx(ref).margin(1e-8));
      REQUIRE(b.ub == Catch::Approx(ref).margin(1e-8));
    }
  }
}

TEST_CASE("MK distance through the cutting-plane path agrees with the LP") {
  const MetricSpace X = random_metric(5, 23);
  const LipNorm L = metric_lipnorm_generic(X);
  std::mt19937_64 rng(29);
  for (int t = 0; t < 4; ++t) {
    const RVec p = random_prob(5, rng), q = random_prob(5, rng);
    const double ref = mk_oracle(X, p, q);
    const Bracket b = mk_distance(L, mixed_state(L.alg, p), mixed_state(L.alg, q));
    REQUIRE(b.lb <= ref + 1e-7);
    REQUIRE(b.ub >= ref - 1e-7);
    REQUIRE(b.ub - b.lb < 1e-6);
  }
}

TEST_CASE("diameter of a metric-space Lip-norm is the metric diameter") {
  for (unsigned seed : {41u, 42u}) {
    const MetricSpace X = random_metric(4, seed);
    const LipNorm L = lip_from_metric(X);
    const Bracket b = diameter(L);
    REQUIRE(b.lb == Catch::Approx(X.diam()).margin(1e-9));
    REQUIRE(b.ub == Catch::Approx(X.diam()).margin(1e-9));
  }
}

TEST_CASE("generic diameter bracket contains the true diameter") {
  const MetricSpace X = random_metric(3, 57);
  const LipNorm L = metric_lipnorm_generic(X);
  DCOptions opt;
  const Bracket b = diameter(L, opt);
  REQUIRE(b.lb <= X.diam() + 1e-7);
  REQUIRE(b.ub >= X.diam() - 1e-7);
  // ascent should locate the extremal Dirac pair exactly
  REQUIRE(b.lb == Catch::Approx(X.diam()).margin(1e-6));
}

TEST_CASE("permissibility checker accepts the two-parameter family") {
  REQUIRE(check_permissible(Permissible{1.0, 0.0}).ok);
  REQUIRE(check_permissible(Permissible{2.0, 1.0}).ok);
}

TEST_CASE("permissibility checker rejects bad candidates") {
  // falls below x*ly + y*lx
  auto bad = [](double x, double y, double lx, double ly) {
    return 0.5 * (x * ly + y * lx);
  };
  REQUIRE_FALSE(check_permissible(bad).ok);
  // additive constant: permissible but not strongly so
  auto shifted = [](double x, double y, double lx, double ly) {
    return x * ly + y * lx + 1.0;
  };
  REQUIRE(check_permissible(shifted, false).ok);
  REQUIRE_FALSE(check_permissible(shifted, true).ok);
}

TEST_CASE("quasi-Leibniz check passes on a metric-space Lip-norm") {
  const MetricSpace X = random_metric(4, 71);
  const LipNorm L = lip_from_metric(X);
  const QLReport rep = quasi_leibniz_check(L, Permissible{1.0, 0.0}, 64);
  REQUIRE(rep.pass);
  REQUIRE(rep.worst_margin > -1e-9);
}

TEST_CASE("quasi-Leibniz check on Pauli generator balls") {
  const Algebra m2 = Algebra::full(2);
  const int d = coord_dim(m2);
  RMat G(d, 3);
  for (int k = 0; k < 3; ++k) G.col(k) = to_coords(pauli(m2, k));

  SECTION("unscaled generators pass at C=1, D=0") {
    const LipNorm L(m2, std::make_shared<VRepBall>(G, unit_coords(m2)));
    const QLReport rep = quasi_leibniz_check(L, Permissible{1.0, 0.0}, 64);
    REQUIRE(rep.pass);
  }

  SECTION("a shrunken sigma_z direction breaks the bracket bound") {
    RMat Gs = G;
    Gs.col(2) *= 0.1;  // gauge(sigma_z) becomes 10
    const LipNorm L(m2, std::make_shared<VRepBall>(Gs, unit_coords(m2)));
    const QLReport rep = quasi_leibniz_check(L, Permissible{1.0, 0.0}, 64);
    REQUIRE_FALSE(rep.pass);
    // lie(sigma_x, sigma_y) = sigma_z: allowance 2, gauge 10
    REQUIRE(rep.worst_margin == Catch::Approx(-8.0).margin(1e-6));
    REQUIRE(rep.worst_kind == "generators/lie");
  }
}

TEST_CASE("max of two Lip-norms is the pointwise max of the gauges") {
  const MetricSpace X1 = random_metric(3, 5), X2 = random_metric(3, 6);
  const LipNorm L1 = lip_from_metric(X1), L2 = lip_from_metric(X2);
  const LipNorm Lm = max_lipnorms(L1, L2);
  REQUIRE(Lm.F.C == 1.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    RVec x(3);
    for (int i = 0; i < 3; ++i) x(i) = g(rng);
    const double ref = std::max(L1.ball->gauge(x).v, L2.ball->gauge(x).v);
    REQUIRE(Lm.ball->gauge(x).v == Catch::Approx(ref).margin(1e-9));
  }
}

TEST_CASE("Lip-norm construction rejects balls that charge the unit") {
  const Algebra m2 = Algebra::full(2);
  REQUIRE_THROWS_AS(LipNorm(m2, std::make_shared<OpNormBall>(m2, 1.0)),
                    std::invalid_argument);
}
