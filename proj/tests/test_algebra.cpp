#include <catch2/catch_amalgamated.hpp>

#include "qmet/algebra.hpp"

using namespace qmet;

namespace {
Element pauli(const Algebra& a, int which) {  // a = M_2
  Element e(a);
  Mat s(2, 2);
  switch (which) {
    case 0: s << 0, 1, 1, 0; break;                          // x
    case 1: s << 0, cxd(0, -1), cxd(0, 1), 0; break;         // y
    default: s << 1, 0, 0, -1; break;                        // z
  }
  e.m[0] = s;
  return e;
}
}  // namespace

TEST_CASE("pauli jordan/lie identities") {
  const Algebra m2 = Algebra::full(2);
  const Element sx = pauli(m2, 0), sy = pauli(m2, 1), sz = pauli(m2, 2);
  REQUIRE(operator_norm(jordan(sx, sy)) < 1e-14);
  REQUIRE(operator_norm(lie(sx, sy) - sz) < 1e-14);
  REQUIRE(operator_norm(lie(sy, sz) - sx) < 1e-14);
  REQUIRE(operator_norm(jordan(sx, sx) - Element::unit(m2)) < 1e-14);
  REQUIRE(operator_norm(sx) == Catch::Approx(1.0));
}

TEST_CASE("hermitian coordinates are an isometry") {
  const Algebra a({2, 1, 3});
  REQUIRE(a.dim_sa() == 4 + 1 + 9);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    RVec x(coord_dim(a)), y(coord_dim(a));
    for (int i = 0; i < x.size(); ++i) {
      x(i) = g(rng);
      y(i) = g(rng);
    }
    const Element ax = from_coords(a, x), ay = from_coords(a, y);
    REQUIRE(ax.is_hermitian());
    REQUIRE((to_coords(ax) - x).norm() < 1e-12);
    // tr(ax * ay) = <x, y>
    REQUIRE(trace(ax.mul(ay)).real() == Catch::Approx(x.dot(y)).margin(1e-10));
  }
}

TEST_CASE("lambda extremes on block diagonals") {
  const Algebra a({1, 1, 2});
  Element e(a);
  e.m[0](0, 0) = 3.0;
  e.m[1](0, 0) = -1.0;
  e.m[2] << 0, 1, 1, 0;
  const auto [lo, hi] = lambda_extremes(e);
  REQUIRE(lo == Catch::Approx(-1.0));
  REQUIRE(hi == Catch::Approx(3.0));
  REQUIRE(spread(e) == Catch::Approx(4.0));
}

TEST_CASE("state evaluation agrees with the coordinate pairing") {
  const Algebra a({2, 2});
  const State tau = State::tracial(a);
  REQUIRE(tau(Element::unit(a)) == Catch::Approx(1.0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  RVec x(coord_dim(a));
  for (int i = 0; i < x.size(); ++i) x(i) = g(rng);
  const Element e = from_coords(a, x);
  REQUIRE(tau(e) == Catch::Approx(tau.coords().dot(x)).margin(1e-12));
  Vec v(2);
  v << 1.0, cxd(0, 1);
  const State p = State::pure(a, 1, v);
  REQUIRE(p(Element::unit(a)) == Catch::Approx(1.0));
  REQUIRE(p(e) == Catch::Approx(p.coords().dot(x)).margin(1e-12));
}

TEST_CASE("common unital embedding") {
  const Algebra A = Algebra::commutative(2);   // C^2
  const Algebra B = Algebra::full(2);          // M_2
  const auto [ea, eb] = common_unital_embedding(A, B);
  REQUIRE(ea.N == 2);
  REQUIRE(eb.N == 2);
  const Element u = Element::unit(A);
  REQUIRE((ea.apply(u) - Mat::Identity(2, 2)).norm() < 1e-14);
  // multiplicativity of the embedding
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  RVec x(coord_dim(A)), y(coord_dim(A));
  for (int i = 0; i < 2; ++i) {
    x(i) = g(rng);
    y(i) = g(rng);
  }
  const Element p = from_coords(A, x), q = from_coords(A, y);
  REQUIRE((ea.apply(p.mul(q)) - ea.apply(p) * ea.apply(q)).norm() < 1e-12);
  // mismatched sums need a bigger N: C^3 and M_2 meet in M_4
  const auto [e3, e2] = common_unital_embedding(Algebra::commutative(3), B);
  REQUIRE(e3.N == 4);
}

TEST_CASE("compression to a corner") {
  const Algebra a({3});
  const std::vector<int> keep{2};
  const LinMap c = compress_map(a, keep);
  REQUIRE(corner_algebra(a, keep).blocks == std::vector<int>{2});
  Element e(a);
  e.m[0] << 1, 2, 3, 2, 5, 6, 3, 6, 9;
  const Element r = c.apply(e);
  Mat want(2, 2);
  want << 1, 2, 2, 5;
  REQUIRE((r.m[0] - want).norm() < 1e-12);
  REQUIRE(c.looks_positive());
}

TEST_CASE("direct sum projections and inclusions") {
  const Algebra A = Algebra::full(2), B = Algebra::commutative(2);
  const DirectSum ds = direct_sum(A, B);
  REQUIRE(ds.sum.blocks == std::vector<int>({2, 1, 1}));
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  RVec xa(coord_dim(A)), xb(coord_dim(B));
  for (int i = 0; i < xa.size(); ++i) xa(i) = g(rng);
  for (int i = 0; i < xb.size(); ++i) xb(i) = g(rng);
  const Element pa = from_coords(A, xa), pb = from_coords(B, xb);
  const Element s = pair_element(ds, pa, pb);
  REQUIRE((ds.p1.M * to_coords(s) - xa).norm() < 1e-12);
  REQUIRE((ds.p2.M * to_coords(s) - xb).norm() < 1e-12);
  REQUIRE(ds.p1.is_unital());
  REQUIRE(ds.p2.is_unital());
}
