#pragma once
// Dense hermitian eigensolver: cyclic Jacobi on the 2n x 2n real symmetric
// embedding [[A,-B],[B,A]] of H = A + iB.  Self-contained so the numerical
// core does not depend on Eigen's decompositions (Eigen is used for storage
// and arithmetic only).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qmet {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct EigH {
  RVec values;  // ascending
  Mat vectors;  // columns, orthonormal
};

namespace detail {

// One cyclic Jacobi pass family on a real symmetric matrix, accumulating
// rotations into V.  Stops when the off-diagonal Frobenius norm drops below
// tol, or after max_sweeps sweeps.
inline void jacobi_real_sym(RMat& S, RMat& V, double tol = 1e-12,
                            int max_sweeps = 100) {
  const int n = static_cast<int>(S.rows());
  V = RMat::Identity(n, n);
  if (n <= 1) return;
  auto off2 = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += S(i, j) * S(i, j);
    return 2.0 * s;
  };
  const double scale = std::max(1.0, S.norm());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (std::sqrt(off2()) <= tol * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = S(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = S(p, p), aqq = S(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        double t;
        if (tau >= 0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = S(k, p), skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(k, q) = s * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = S(p, k), sqk = S(q, k);
          S(p, k) = c * spk - s * sqk;
          S(q, k) = s * spk + c * sqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace detail

// Eigen-decomposition of a hermitian matrix.  Throws if H is not square or
// measurably non-hermitian.
inline EigH eigh(const Mat& H, double herm_tol = 1e-9) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw std::invalid_argument("eigh: matrix not square");
  const double scale = std::max(1.0, H.norm());
  if ((H - H.adjoint()).norm() > herm_tol * scale)
    throw std::invalid_argument("eigh: matrix not hermitian");
  EigH out;
  if (n == 0) {
    out.values = RVec(0);
    out.vectors = Mat(0, 0);
    return out;
  }
  RMat A = H.real();
  RMat B = H.imag();
  A = 0.5 * (A + A.transpose());
  B = 0.5 * (B - B.transpose());
  RMat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = A;
  S.topRightCorner(n, n) = -B;
  S.bottomLeftCorner(n, n) = B;
  S.bottomRightCorner(n, n) = A;
  RMat V;
  detail::jacobi_real_sym(S, V);
  std::vector<int> idx(2 * n);
  for (int i = 0; i < 2 * n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return S(a, a) < S(b, b); });
  // Each complex eigenpair appears twice in the real embedding; peel a
  // complex-orthonormal set of n vectors out of the 2n real columns.
  out.values = RVec(n);
  out.vectors = Mat(n, n);
  int taken = 0;
  std::vector<double> taken_vals;
  for (int r = 0; r < 2 * n && taken < n; ++r) {
    const int j = idx[r];
    Vec z(n);
    for (int k = 0; k < n; ++k) z(k) = cxd(V(k, j), V(n + k, j));
    // Orthogonalize against already-accepted vectors of ~equal eigenvalue.
    for (int t = 0; t < taken; ++t) {
      if (std::abs(taken_vals[t] - S(j, j)) > 1e-7 * scale + 1e-10) continue;
      z -= out.vectors.col(t) * (out.vectors.col(t).adjoint() * z)(0);
    }
    const double nz = z.norm();
    if (nz < 0.3) continue;  // duplicate copy of an already-taken eigenvector
    out.vectors.col(taken) = z / nz;
    out.values(taken) = S(j, j);
    taken_vals.push_back(S(j, j));
    ++taken;
  }
  if (taken < n) throw std::runtime_error("eigh: eigenvector extraction failed");
  return out;
}

inline double lambda_max(const Mat& H) {
  const EigH e = eigh(H);
  return e.values(e.values.size() - 1);
}

inline double lambda_min(const Mat& H) { return eigh(H).values(0); }

// Operator norm of a general (possibly non-hermitian) matrix via the
// hermitian dilation [[0, M],[M*, 0]].
inline double op_norm(const Mat& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  const int r = static_cast<int>(M.rows()), c = static_cast<int>(M.cols());
  Mat D = Mat::Zero(r + c, r + c);
  D.topRightCorner(r, c) = M;
  D.bottomLeftCorner(c, r) = M.adjoint();
  return lambda_max(D);
}

// Largest singular triplet (sigma, u, v) with M v = sigma u.
struct Svd1 {
  double sigma;
  Vec u, v;
};

inline Svd1 top_singular(const Mat& M) {
  const int r = static_cast<int>(M.rows()), c = static_cast<int>(M.cols());
  Mat D = Mat::Zero(r + c, r + c);
  D.topRightCorner(r, c) = M;
  D.bottomLeftCorner(c, r) = M.adjoint();
  const EigH e = eigh(D);
  const Vec w = e.vectors.col(r + c - 1);
  Svd1 out;
  out.sigma = e.values(r + c - 1);
  out.u = w.head(r);
  out.v = w.tail(c);
  const double nu = out.u.norm(), nv = out.v.norm();
  if (nu > 1e-12) out.u /= nu;
  if (nv > 1e-12) out.v /= nv;
  return out;
}

// f(H) for hermitian H through the spectral theorem.
template <typename F>
inline Mat herm_function(const Mat& H, F&& f) {
  const EigH e = eigh(H);
  Mat out = Mat::Zero(H.rows(), H.cols());
  for (int i = 0; i < e.values.size(); ++i)
    out += f(e.values(i)) * (e.vectors.col(i) * e.vectors.col(i).adjoint());
  return out;
}

}  // namespace qmet
