#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qmet/linalg.hpp"

using namespace qmet;

namespace {
Mat random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cxd(g(rng), g(rng));
  return 0.5 * (z + z.adjoint());
}
}  // namespace

TEST_CASE("jacobi matches the independent eigensolver on random hermitians") {
  std::mt19937_64 rng(2024);
  for (int n : {1, 2, 3, 4, 6, 8}) {
    for (int rep = 0; rep < 8; ++rep) {
      const Mat H = random_hermitian(n, rng);
      const EigH e = eigh(H);
      Eigen::SelfAdjointEigenSolver<Mat> ref(H);
      REQUIRE((e.values - ref.eigenvalues()).norm() < 1e-9 * std::max(1.0, H.norm()));
      // eigen-equations and orthonormality
      for (int k = 0; k < n; ++k)
        REQUIRE((H * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm() <
                1e-8 * std::max(1.0, H.norm()));
      REQUIRE((e.vectors.adjoint() * e.vectors - Mat::Identity(n, n)).norm() < 1e-9);
    }
  }
}

TEST_CASE("jacobi handles degenerate spectra") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 6; ++rep) {
    // spectrum {1, 1, 1, -2, -2} under a random unitary conjugation
    const int n = 5;
    Mat z = random_hermitian(n, rng);
    Eigen::SelfAdjointEigenSolver<Mat> qr(z);
    const Mat U = qr.eigenvectors();
    RVec d(n);
    d << 1, 1, 1, -2, -2;
    const Mat H = U * d.asDiagonal() * U.adjoint();
    const EigH e = eigh(H);
    RVec want(n);
    want << -2, -2, 1, 1, 1;
    REQUIRE((e.values - want).norm() < 1e-8);
    for (int k = 0; k < n; ++k)
      REQUIRE((H * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm() < 1e-8);
    REQUIRE((e.vectors.adjoint() * e.vectors - Mat::Identity(n, n)).norm() < 1e-8);
  }
}

TEST_CASE("diagonal spectra are reproduced exactly") {
  Mat H = Mat::Zero(3, 3);
  H(0, 0) = 2.0;
  H(1, 1) = -1.0;
  H(2, 2) = 0.5;
  REQUIRE(lambda_max(H) == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(lambda_min(H) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("op_norm matches singular values") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 8; ++rep) {
    Mat m(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = cxd(g(rng), g(rng));
    Eigen::JacobiSVD<Mat> svd(m);
    REQUIRE(op_norm(m) == Catch::Approx(svd.singularValues()(0)).epsilon(1e-9));
    const Svd1 s = top_singular(m);
    REQUIRE(s.sigma == Catch::Approx(svd.singularValues()(0)).epsilon(1e-9));
    REQUIRE((m * s.v - s.sigma * s.u).norm() < 1e-8 * s.sigma);
  }
}

TEST_CASE("herm_function computes square roots") {
  std::mt19937_64 rng(13);
  Mat h = random_hermitian(4, rng);
  const Mat p = h * h.adjoint() + Mat::Identity(4, 4);  // positive definite
  const Mat r = herm_function(p, [](double x) { return std::sqrt(x); });
  REQUIRE((r * r - p).norm() < 1e-8 * p.norm());
}
