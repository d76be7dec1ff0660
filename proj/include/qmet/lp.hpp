#pragma once
// Dense two-phase simplex with Bland's rule.  Small dense problems only;
// that is all this library ever generates.

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace qmet {

enum class LPStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Eigen::VectorXd x;    // primal solution (original variables)
  Eigen::VectorXd ray;  // improving ray when Unbounded
  double objective = 0.0;
};

namespace lpdetail {

// min c.z  s.t.  M z = d (d >= 0), z >= 0.  Tableau simplex, Bland's rule.
struct Standard {
  Eigen::MatrixXd M;
  Eigen::VectorXd d, c;
  // per-row column usable as initial basic (unit column, e.g. a slack with
  // nonnegative rhs), or -1; hinted rows skip phase-1 artificials
  std::vector<int> hint;

  LPStatus solve(Eigen::VectorXd& z, Eigen::VectorXd& ray, double& obj,
                 int iter_cap = 20000) {
    const int m = static_cast<int>(M.rows());
    const int n = static_cast<int>(M.cols());
    // phase 1 tableau with artificials
    Eigen::MatrixXd T(m + 1, n + m + 1);
    T.setZero();
    T.block(0, 0, m, n) = M;
    T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    T.block(0, n + m, m, 1) = d;
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    // phase-1 objective row: minimize sum of artificials
    for (int j = 0; j <= n + m; ++j) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += T(i, j);
      T(m, j) = -s;
    }
    for (int i = 0; i < m; ++i) T(m, n + i) = 0.0;
    auto pivot = [&](int pr, int pc) {
      T.row(pr) /= T(pr, pc);
      for (int i = 0; i <= m; ++i) {
        if (i == pr) continue;
        const double f = T(i, pc);
        if (f != 0.0) T.row(i) -= f * T.row(pr);
      }
      basis[pr] = pc;
    };
    // hinted rows enter the basis immediately; phase 1 then only has to
    // clear the remaining artificials
    if (static_cast<int>(hint.size()) == m)
      for (int i = 0; i < m; ++i)
        if (hint[i] >= 0 && hint[i] < n && T(i, hint[i]) > 0.5)
          pivot(i, hint[i]);
    auto run = [&](int ncols, bool phase2) -> LPStatus {
      int stall = 0;  // consecutive degenerate pivots; after a burst switch
                      // to Bland's rule, which cannot cycle
      for (int it = 0; it < iter_cap; ++it) {
        int pc = -1;
        if (stall < 40) {  // Dantzig: most negative reduced cost
          double most = -1e-10;
          for (int j = 0; j < ncols; ++j)
            if (T(m, j) < most) {
              most = T(m, j);
              pc = j;
            }
        } else {  // Bland: first negative reduced cost
          for (int j = 0; j < ncols; ++j)
            if (T(m, j) < -1e-10) {
              pc = j;
              break;
            }
        }
        if (pc < 0) return LPStatus::Optimal;
        int pr = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
          if (T(i, pc) > 1e-11) {
            const double r = T(i, n + m) / T(i, pc);
            if (r < best - 1e-12 || (std::abs(r - best) <= 1e-12 &&
                                     (pr < 0 || basis[i] < basis[pr]))) {
              best = r;
              pr = i;
            }
          }
        stall = (pr >= 0 && best <= 1e-12) ? stall + 1 : 0;
        if (pr < 0) {
          if (!phase2) return LPStatus::Infeasible;  // cannot happen
          // unbounded: build ray
          ray = Eigen::VectorXd::Zero(n);
          if (pc < n) ray(pc) = 1.0;
          for (int i = 0; i < m; ++i)
            if (basis[i] < n) ray(basis[i]) = -T(i, pc);
          return LPStatus::Unbounded;
        }
        pivot(pr, pc);
      }
      return LPStatus::IterLimit;
    };
    LPStatus s1 = run(n + m, false);
    if (s1 != LPStatus::Optimal) return s1;
    if (T(m, n + m) < -1e-7) return LPStatus::Infeasible;
    // drive artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      int pc = -1;
      for (int j = 0; j < n; ++j)
        if (std::abs(T(i, j)) > 1e-9) {
          pc = j;
          break;
        }
      if (pc >= 0) pivot(i, pc);
      // else: redundant row, keep the artificial at value 0
    }
    // phase-2 objective
    for (int j = 0; j <= n + m; ++j) T(m, j) = 0.0;
    T.block(m, 0, 1, n) = c.transpose();
    for (int i = 0; i < m; ++i)
      if (basis[i] < n && std::abs(c(basis[i])) > 0)
        T.row(m) -= c(basis[i]) * T.row(i);
    // forbid re-entry of artificials: give them huge reduced cost
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n) {
        // artificial stuck at zero in a redundant row; acceptable
      }
    for (int j = n; j < n + m; ++j) T(m, j) = 1e30;
    LPStatus s2 = run(n, true);
    if (s2 == LPStatus::Unbounded || s2 == LPStatus::IterLimit) return s2;
    z = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n) z(basis[i]) = T(i, n + m);
    obj = c.dot(z);
    return LPStatus::Optimal;
  }
};

}  // namespace lpdetail

// General form:  maximize c.x  over free x,
//   A x <= b,   E x = f.
// Variables are split internally (x = u - v, u,v >= 0) and inequalities get
// slacks.
struct LP {
  int nvars = 0;
  Eigen::VectorXd c;
  std::vector<Eigen::VectorXd> arow;
  std::vector<double> brhs;
  std::vector<Eigen::VectorXd> erow;
  std::vector<double> frhs;

  explicit LP(int n) : nvars(n), c(Eigen::VectorXd::Zero(n)) {}
  void add_le(const Eigen::VectorXd& a, double b) {
    arow.push_back(a);
    brhs.push_back(b);
  }
  void add_eq(const Eigen::VectorXd& e, double f) {
    erow.push_back(e);
    frhs.push_back(f);
  }

  LPResult solve() const {
    const int n = nvars;
    const int mi = static_cast<int>(arow.size());
    const int me = static_cast<int>(erow.size());
    const int m = mi + me;
    const int nz = 2 * n + mi;  // u, v, slacks
    lpdetail::Standard sp;
    sp.M.setZero(m, nz);
    sp.d.setZero(m);
    sp.c.setZero(nz);
    for (int i = 0; i < mi; ++i) {
      sp.M.block(i, 0, 1, n) = arow[i].transpose();
      sp.M.block(i, n, 1, n) = -arow[i].transpose();
      sp.M(i, 2 * n + i) = 1.0;
      sp.d(i) = brhs[i];
    }
    for (int i = 0; i < me; ++i) {
      sp.M.block(mi + i, 0, 1, n) = erow[i].transpose();
      sp.M.block(mi + i, n, 1, n) = -erow[i].transpose();
      sp.d(mi + i) = frhs[i];
    }
    sp.hint.assign(m, -1);
    for (int i = 0; i < mi; ++i)
      if (sp.d(i) >= 0) sp.hint[i] = 2 * n + i;
    for (int r = 0; r < m; ++r)
      if (sp.d(r) < 0) {
        sp.M.row(r) *= -1.0;
        sp.d(r) *= -1.0;
      }
    sp.c.head(n) = -c;  // standard form minimizes
    sp.c.segment(n, n) = c;
    Eigen::VectorXd z, zray;
    double obj = 0.0;
    LPResult out;
    out.status = sp.solve(z, zray, obj);
    if (out.status == LPStatus::Optimal) {
      out.x = z.head(n) - z.segment(n, n);
      out.objective = c.dot(out.x);
    } else if (out.status == LPStatus::Unbounded) {
      out.ray = zray.head(n) - zray.segment(n, n);
    }
    return out;
  }
};

}  // namespace qmet
