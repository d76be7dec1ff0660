#pragma once
// Gauge balls (Minkowski functionals of balanced convex sets), cutting-plane
// linear maximization over ball sections, polytope helpers, and the
// difference-of-convex bracket engine used for tunnel extents.

#include <functional>
#include <memory>

#include "qmet/algebra.hpp"
#include "qmet/lp.hpp"

namespace qmet {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GaugeVal {
  double v = 0.0;
  bool finite = true;
};

// Supporting cut at x: a linear functional y with y.x = gauge(x) (or y.x > 0
// with sup_ball y = 0 when gauge(x) = inf) and sup over the ball of y <= 1.
struct SupportCut {
  RVec y;
  GaugeVal g;
};

class Ball {
 public:
  virtual ~Ball() = default;
  virtual int dim() const = 0;
  virtual GaugeVal gauge(const RVec& x) const = 0;
  virtual SupportCut support_cut(const RVec& x) const = 0;
};

using BallPtr = std::shared_ptr<const Ball>;

// ---------------------------------------------------------------------------
// V-representation: balanced convex hull of generator columns plus the real
// line through `unit` (pass a zero vector for no line).
class VRepBall : public Ball {
 public:
  RMat G;     // dim x m
  RVec unit;  // coords of the algebra unit (may be zero)

  VRepBall(RMat g, RVec u) : G(std::move(g)), unit(std::move(u)) {}
  int dim() const override { return static_cast<int>(G.rows()); }

  GaugeVal gauge(const RVec& x) const override { return polar(x).g; }
  SupportCut support_cut(const RVec& x) const override { return polar(x); }

  // gauge via the polar:  max y.x  s.t. |y.g_k| <= 1, y.unit = 0
  SupportCut polar(const RVec& x) const {
    LP lp(dim());
    lp.c = x;
    for (int k = 0; k < G.cols(); ++k) {
      lp.add_le(G.col(k), 1.0);
      lp.add_le(-G.col(k), 1.0);
    }
    if (unit.size() && unit.norm() > 0) lp.add_eq(unit, 0.0);
    const LPResult r = lp.solve();
    SupportCut out;
    if (r.status == LPStatus::Optimal) {
      out.g = {std::max(0.0, r.objective), true};
      out.y = r.x;
    } else if (r.status == LPStatus::Unbounded) {
      out.g = {kInf, false};
      out.y = r.ray;  // sup over ball of ray functional is 0
      const double d = out.y.dot(x);
      if (d > 1e-12) out.y *= 2.0 / d;  // normalized so y.x = 2 > 1
    } else {
      throw std::runtime_error("VRepBall: polar LP failed");
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Operator-norm ball of radius r in the self-adjoint part of an algebra.
class OpNormBall : public Ball {
 public:
  Algebra alg;
  double r;
  OpNormBall(Algebra a, double radius) : alg(std::move(a)), r(radius) {}
  int dim() const override { return coord_dim(alg); }

  GaugeVal gauge(const RVec& x) const override {
    const auto [lo, hi] = lambda_extremes(from_coords(alg, x));
    return {std::max(hi, -lo) / r, true};
  }
  SupportCut support_cut(const RVec& x) const override {
    const Element a = from_coords(alg, x);
    SupportCut out;
    double best = -kInf;
    State st;
    double sign = 1.0;
    for (int j = 0; j < alg.num_blocks(); ++j) {
      const EigH e = eigh(a.m[j]);
      const double hi = e.values(e.values.size() - 1), lo = e.values(0);
      if (hi > best) {
        best = hi;
        st = State::pure(alg, j, e.vectors.col(e.values.size() - 1));
        sign = 1.0;
      }
      if (-lo > best) {
        best = -lo;
        st = State::pure(alg, j, e.vectors.col(0));
        sign = -1.0;
      }
    }
    out.g = {best / r, true};
    out.y = sign * st.coords() / r;  // |phi(z)| <= ||z|| so sup_ball y <= 1
    return out;
  }
};

// ---------------------------------------------------------------------------
// Norm ball for general (non-hermitian) matrices, used by bridge seminorms.
// Coordinates: Re entries row-major, then Im entries row-major.
inline RVec gen_to_coords(const Mat& m) {
  const int n = static_cast<int>(m.rows()), c = static_cast<int>(m.cols());
  RVec x(2 * n * c);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j) x(k++) = m(i, j).real();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j) x(k++) = m(i, j).imag();
  return x;
}
inline Mat gen_from_coords(int rows, int cols, const RVec& x) {
  Mat m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = x(k++);
  k = rows * cols;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) += cxd(0.0, x(k++));
  return m;
}

class GenNormBall : public Ball {
 public:
  int rows, cols;
  double r;
  GenNormBall(int rr, int cc, double radius) : rows(rr), cols(cc), r(radius) {}
  int dim() const override { return 2 * rows * cols; }
  GaugeVal gauge(const RVec& x) const override {
    return {op_norm(gen_from_coords(rows, cols, x)) / r, true};
  }
  SupportCut support_cut(const RVec& x) const override {
    const Mat m = gen_from_coords(rows, cols, x);
    const Svd1 s = top_singular(m);
    // ell(z) = Re(u* z v)/r;  |Re(u* z v)| <= ||z|| so sup_ball <= 1
    RVec y(dim());
    int k = 0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        y(k++) = (std::conj(s.u(i)) * s.v(j)).real() / r;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        y(k++) = -(std::conj(s.u(i)) * s.v(j)).imag() / r;
    SupportCut out;
    out.g = {s.sigma / r, true};
    out.y = y;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Intersection of pullbacks: gauge(x) = max_t gauge_t(P_t x).
class MaxBall : public Ball {
 public:
  struct Term {
    RMat P;  // sub->dim() x dim
    BallPtr sub;
  };
  std::vector<Term> terms;
  int ambient = 0;

  MaxBall(int ambient_dim, std::vector<Term> t)
      : terms(std::move(t)), ambient(ambient_dim) {}
  int dim() const override { return ambient; }

  GaugeVal gauge(const RVec& x) const override {
    GaugeVal g{0.0, true};
    for (const auto& t : terms) {
      const GaugeVal s = t.sub->gauge(t.P * x);
      if (!s.finite) return {kInf, false};
      g.v = std::max(g.v, s.v);
    }
    return g;
  }
  SupportCut support_cut(const RVec& x) const override {
    SupportCut best;
    best.g = {-1.0, true};
    for (const auto& t : terms) {
      const SupportCut s = t.sub->support_cut(t.P * x);
      if (!s.g.finite) {
        SupportCut out;
        out.g = s.g;
        out.y = t.P.transpose() * s.y;
        return out;
      }
      if (s.g.v > best.g.v) {
        best.g = s.g;
        best.y = t.P.transpose() * s.y;
      }
    }
    return best;
  }
};

// ---------------------------------------------------------------------------
// Cutting-plane linear maximization over {x : gauge(x) <= 1, E x = f}.
// Homogeneous equalities (f = 0) allow exact feasibility by rescaling.

struct CutPool {
  std::vector<RVec> rows;  // each: y.x <= 1 valid on the ball
};

struct LinMaxResult {
  bool ok = false;
  bool converged = false;
  double ub = 0.0, lb = 0.0;
  RVec x_feas;  // feasible for the ball & equalities (homogeneous case)
  int iters = 0;
};

struct SectionOpts {
  double tol = 1e-7;
  int max_iters = 400;
  double box = 1e6;
  double gap = 0.0;  // if > 0, also stop once ub - lb <= gap
};

inline LinMaxResult linear_max_section(const Ball& ball, const RVec& c,
                                       const std::vector<std::pair<RVec, double>>& eqs,
                                       CutPool* pool = nullptr,
                                       const SectionOpts& opts = {}) {
  const int d = ball.dim();
  CutPool local;
  CutPool& cp = pool ? *pool : local;
  LinMaxResult out;
  bool homogeneous = true;
  for (const auto& e : eqs)
    if (std::abs(e.second) > 0) homogeneous = false;
  for (int it = 0; it < opts.max_iters; ++it) {
    LP lp(d);
    lp.c = c;
    for (const RVec& y : cp.rows) lp.add_le(y, 1.0);
    for (const auto& e : eqs) lp.add_eq(e.first, e.second);
    for (int i = 0; i < d; ++i) {
      RVec e = RVec::Zero(d);
      e(i) = 1.0;
      lp.add_le(e, opts.box);
      lp.add_le(-e, opts.box);
    }
    const LPResult r = lp.solve();
    out.iters = it + 1;
    if (r.status == LPStatus::Infeasible) return out;  // ok=false
    if (r.status != LPStatus::Optimal)
      throw std::runtime_error("linear_max_section: LP failed");
    const SupportCut sc = ball.support_cut(r.x);
    out.ok = true;
    out.ub = r.objective;  // sound at every stage: all cuts are valid
    if (homogeneous && sc.g.finite) {
      const RVec xf = r.x / std::max(1.0, sc.g.v);
      if (!out.x_feas.size() || c.dot(xf) > out.lb) {
        out.x_feas = xf;
        out.lb = c.dot(xf);
      }
    } else {
      out.x_feas = r.x;
      out.lb = r.objective;
    }
    if (sc.g.finite && sc.g.v <= 1.0 + opts.tol) {
      out.converged = true;
      return out;
    }
    if (opts.gap > 0 && out.ub - out.lb <= opts.gap) {
      out.converged = true;
      return out;
    }
    cp.rows.push_back(sc.y);
  }
  return out;  // budget exhausted; [lb, ub] still brackets the optimum
}

// ---------------------------------------------------------------------------
// Polytopes (V-representation, columns = vertices).

struct Polytope {
  RMat V;  // dim x nv
  int dim() const { return static_cast<int>(V.rows()); }
  int nv() const { return static_cast<int>(V.cols()); }
};

// Euclidean-ish distance in operator norm from point v (coords of alg) to
// conv(columns of Q), via cutting planes on the epigraph.
struct DistResult {
  double lb = 0.0, ub = 0.0;
  RVec theta;
};

inline DistResult dist_opnorm_to_hull(const Algebra& alg, const RVec& v,
                                      const RMat& Q, double tol = 1e-8,
                                      int max_iters = 200) {
  const int nv = static_cast<int>(Q.cols());
  DistResult out;
  std::vector<RVec> cuts;  // states phi (signed): s >= y.(v - Q theta)
  RVec theta = RVec::Constant(nv, 1.0 / nv);
  for (int it = 0; it < max_iters; ++it) {
    const RVec m = v - Q * theta;
    const OpNormBall nb(alg, 1.0);
    const SupportCut sc = nb.support_cut(m);
    out.ub = sc.g.v;  // true norm at current theta
    cuts.push_back(sc.y);
    // LP over (theta, s): min s  s.t.  s >= y.(v - Q theta), simplex(theta)
    LP lp(nv + 1);
    lp.c = RVec::Zero(nv + 1);
    lp.c(nv) = -1.0;  // maximize -s
    for (const RVec& y : cuts) {
      RVec row = RVec::Zero(nv + 1);
      row.head(nv) = -(Q.transpose() * y);
      row(nv) = -1.0;
      lp.add_le(row, -y.dot(v));
    }
    for (int i = 0; i < nv; ++i) {
      RVec e = RVec::Zero(nv + 1);
      e(i) = -1.0;
      lp.add_le(e, 0.0);
    }
    RVec one = RVec::Zero(nv + 1);
    one.head(nv).setOnes();
    lp.add_eq(one, 1.0);
    const LPResult r = lp.solve();
    if (r.status != LPStatus::Optimal)
      throw std::runtime_error("dist_opnorm_to_hull: LP failed");
    theta = r.x.head(nv);
    out.lb = r.x(nv);
    const RVec m2 = v - Q * theta;
    out.ub = std::min(out.ub, operator_norm(from_coords(alg, m2)));
    out.theta = theta;
    if (out.ub - out.lb <= tol * std::max(1.0, out.ub)) break;
  }
  return out;
}

// Hausdorff distance (operator norm) between conv(P) and conv(Q); both given
// by generator columns in the coordinates of alg.  Returns [lb, ub].
inline std::pair<double, double> hausdorff_polytopes(const Algebra& alg,
                                                     const RMat& P, const RMat& Q,
                                                     double tol = 1e-8) {
  double lb = 0.0, ub = 0.0;
  for (int k = 0; k < P.cols(); ++k) {
    const DistResult d = dist_opnorm_to_hull(alg, P.col(k), Q, tol);
    lb = std::max(lb, d.lb);
    ub = std::max(ub, d.ub);
  }
  for (int k = 0; k < Q.cols(); ++k) {
    const DistResult d = dist_opnorm_to_hull(alg, Q.col(k), P, tol);
    lb = std::max(lb, d.lb);
    ub = std::max(ub, d.ub);
  }
  return {lb, ub};
}

// ---------------------------------------------------------------------------
// H-to-V vertex enumeration for small dimensions (<= 6): brute force over row
// subsets.

inline Polytope enumerate_vertices(const std::vector<std::pair<RVec, double>>& rows,
                                   double tol = 1e-9) {
  if (rows.empty()) return {};
  const int d = static_cast<int>(rows[0].first.size());
  if (d > 6) throw std::invalid_argument("enumerate_vertices: dim > 6");
  const int m = static_cast<int>(rows.size());
  std::vector<RVec> verts;
  std::vector<int> comb(d);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == d) {
      RMat A(d, d);
      RVec b(d);
      for (int i = 0; i < d; ++i) {
        A.row(i) = rows[comb[i]].first.transpose();
        b(i) = rows[comb[i]].second;
      }
      Eigen::FullPivLU<RMat> lu(A);
      if (!lu.isInvertible()) return;
      const RVec x = lu.solve(b);
      for (const auto& r : rows)
        if (r.first.dot(x) > r.second + tol * std::max(1.0, std::abs(r.second)) + tol)
          return;
      for (const RVec& v : verts)
        if ((v - x).norm() <= 1e-7 * std::max(1.0, x.norm())) return;
      verts.push_back(x);
      return;
    }
    for (int i = start; i <= m - (d - k); ++i) {
      comb[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  Polytope out;
  out.V.resize(d, static_cast<int>(verts.size()));
  for (size_t i = 0; i < verts.size(); ++i) out.V.col(static_cast<int>(i)) = verts[i];
  return out;
}

}  // namespace qmet
