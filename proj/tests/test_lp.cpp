#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qmet/lp.hpp"

using namespace qmet;

TEST_CASE("simple bounded LP") {
  LP lp(2);
  lp.c << 1, 1;
  lp.add_le((Eigen::VectorXd(2) << 1, 0).finished(), 1.0);
  lp.add_le((Eigen::VectorXd(2) << 0, 1).finished(), 2.0);
  lp.add_le((Eigen::VectorXd(2) << -1, 0).finished(), 10.0);
  lp.add_le((Eigen::VectorXd(2) << 0, -1).finished(), 10.0);
  const LPResult r = lp.solve();
  REQUIRE(r.status == LPStatus::Optimal);
  REQUIRE(r.objective == Catch::Approx(3.0));
  REQUIRE(r.x(0) == Catch::Approx(1.0));
  REQUIRE(r.x(1) == Catch::Approx(2.0));
}

TEST_CASE("equality constraints with free variables") {
  LP lp(2);
  lp.c << 1, 0;
  lp.add_eq((Eigen::VectorXd(2) << 1, 1).finished(), 1.0);
  lp.add_le((Eigen::VectorXd(2) << 0, 1).finished(), 0.5);
  lp.add_le((Eigen::VectorXd(2) << 0, -1).finished(), 0.5);
  const LPResult r = lp.solve();
  REQUIRE(r.status == LPStatus::Optimal);
  REQUIRE(r.objective == Catch::Approx(1.5));
}

TEST_CASE("infeasible LP") {
  LP lp(1);
  lp.c << 1;
  lp.add_le((Eigen::VectorXd(1) << 1).finished(), -1.0);
  lp.add_le((Eigen::VectorXd(1) << -1).finished(), -2.0);  // x >= 2 and x <= -1
  REQUIRE(lp.solve().status == LPStatus::Infeasible);
}

TEST_CASE("unbounded LP yields an improving ray") {
  LP lp(2);
  lp.c << 1, 0;
  lp.add_le((Eigen::VectorXd(2) << -1, 0).finished(), 0.0);  // x >= 0
  lp.add_le((Eigen::VectorXd(2) << 0, 1).finished(), 1.0);
  lp.add_le((Eigen::VectorXd(2) << 0, -1).finished(), 1.0);
  const LPResult r = lp.solve();
  REQUIRE(r.status == LPStatus::Unbounded);
  REQUIRE(r.ray.size() == 2);
  REQUIRE(r.ray(0) > 1e-9);  // objective improves along the ray
}

TEST_CASE("random LPs agree with vertex enumeration") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 3, m = 7;
    LP lp(n);
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    for (int i = 0; i < n; ++i) lp.c(i) = u(rng);
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd a(n);
      for (int j = 0; j < n; ++j) a(j) = u(rng);
      lp.add_le(a, 1.0);  // 0 always feasible
      rows.push_back(a);
      rhs.push_back(1.0);
    }
    for (int i = 0; i < n; ++i) {  // box to keep it bounded
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = 1.0;
      lp.add_le(e, 2.0);
      rows.push_back(e);
      rhs.push_back(2.0);
      lp.add_le(-e, 2.0);
      rows.push_back(-e);
      rhs.push_back(2.0);
    }
    const LPResult r = lp.solve();
    REQUIRE(r.status == LPStatus::Optimal);
    // brute-force vertex enumeration oracle
    double best = -1e100;
    const int mm = static_cast<int>(rows.size());
    for (int a = 0; a < mm; ++a)
      for (int b = a + 1; b < mm; ++b)
        for (int cdx = b + 1; cdx < mm; ++cdx) {
          Eigen::Matrix3d A;
          A.row(0) = rows[a];
          A.row(1) = rows[b];
          A.row(2) = rows[cdx];
          if (std::abs(A.determinant()) < 1e-9) continue;
          Eigen::Vector3d bb(rhs[a], rhs[b], rhs[cdx]);
          Eigen::Vector3d x = A.fullPivLu().solve(bb);
          bool feas = true;
          for (int i = 0; i < mm && feas; ++i)
            if (rows[i].dot(x) > rhs[i] + 1e-8) feas = false;
          if (feas) best = std::max(best, lp.c.dot(x));
        }
    REQUIRE(r.objective == Catch::Approx(best).margin(1e-7));
  }
}
