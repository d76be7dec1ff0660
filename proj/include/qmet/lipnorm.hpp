#pragma once
// Lip-norms on finite-dimensional C*-algebras: Minkowski gauges of balanced
// convex ball sections, Monge-Kantorovich distances, diameters, and the
// quasi-Leibniz generator criterion.

#include "qmet/dc.hpp"

namespace qmet {

// F_{C,D}(x, y, lx, ly) = C (x ly + y lx) + D lx ly.  Permissible needs
// C >= 1, D >= 0; this family is strongly permissible.
struct Permissible {
  double C = 1.0, D = 0.0;
  double operator()(double x, double y, double lx, double ly) const {
    return C * (x * ly + y * lx) + D * lx * ly;
  }
  bool valid() const { return C >= 1.0 && D >= 0.0; }
};

struct PermissibleReport {
  bool ok = true;
  std::string reason;
};

// Validates the defining inequalities of (strong) permissibility on a grid.
inline PermissibleReport check_permissible(
    const std::function<double(double, double, double, double)>& F,
    bool strong = true) {
  PermissibleReport rep;
  const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  for (double x : grid)
    for (double y : grid)
      for (double lx : grid)
        for (double ly : grid) {
          const double f = F(x, y, lx, ly);
          if (f < x * ly + y * lx - 1e-12) {
            rep.ok = false;
            rep.reason = "below x*ly + y*lx";
            return rep;
          }
          // monotonicity probes
          for (int arg = 0; arg < 4; ++arg) {
            double a[4] = {x, y, lx, ly};
            a[arg] += 0.5;
            if (F(a[0], a[1], a[2], a[3]) < f - 1e-12) {
              rep.ok = false;
              rep.reason = "not monotone";
              return rep;
            }
          }
          if (strong)
            for (double lam : {0.25, 0.5, 2.0})
              for (double mu : {0.5, 2.0})
                if (lam * mu * f >
                    F(lam * x, mu * y, lam * lx, mu * ly) + 1e-9) {
                  rep.ok = false;
                  rep.reason = "not strongly permissible";
                  return rep;
                }
        }
  return rep;
}

// ---------------------------------------------------------------------------

struct LipNorm {
  Algebra alg;
  BallPtr ball;     // unit ball {L <= 1} in hermitian coordinates; must
                    // contain the unit line
  Permissible F;    // advertised quasi-Leibniz class
  State base;       // base state defining sections (default: tracial)

  LipNorm() = default;
  LipNorm(Algebra a, BallPtr b, Permissible f = {})
      : alg(std::move(a)), ball(std::move(b)), F(f), base(State::tracial(alg)) {
    const GaugeVal g = ball->gauge(unit_coords(alg));
    if (!g.finite || g.v > 1e-7)
      throw std::invalid_argument("LipNorm: gauge(1) != 0");
  }

  GaugeVal operator()(const Element& a) const { return ball->gauge(to_coords(a)); }
  std::vector<std::pair<RVec, double>> section_eqs() const {
    return {{base.coords(), 0.0}};
  }
  // V-representation generators if the ball is a plain VRepBall
  const VRepBall* vrep() const { return dynamic_cast<const VRepBall*>(ball.get()); }
};

struct Bracket {
  double lb = 0.0, ub = 0.0;
  bool converged = true;
};

// Monge-Kantorovich distance between two states.
inline Bracket mk_distance(const LipNorm& L, const State& phi, const State& psi,
                           double tol = 1e-8) {
  const RVec c = phi.coords() - psi.coords();
  if (const VRepBall* v = L.vrep()) {
    double m = 0.0;
    for (int k = 0; k < v->G.cols(); ++k) m = std::max(m, std::abs(c.dot(v->G.col(k))));
    return {m, m, true};
  }
  SectionOpts o;
  o.tol = tol;
  const LinMaxResult r = linear_max_section(*L.ball, c, L.section_eqs(), nullptr, o);
  if (!r.ok) throw std::runtime_error("mk_distance: section infeasible");
  return {std::max(0.0, r.lb), r.ub, true};
}

// Diameter of the state space in the MK metric.
inline Bracket diameter(const LipNorm& L, const DCOptions& opt = {}) {
  if (const VRepBall* v = L.vrep()) {
    // section = balanced hull of the generators; spread is shift-invariant
    double m = 0.0;
    for (int k = 0; k < v->G.cols(); ++k)
      m = std::max(m, spread(from_coords(L.alg, v->G.col(k))));
    return {m, m, true};
  }
  // sup over the section of spread(x) = lmax(x) + lmax(-x); run the DC engine
  // on the doubled target with empty concave part after splitting:
  //   spread(x) = lmax over A(+)A of (x, -x) ... is a sum, not a max, so use
  // the pair formulation sup_{phi,psi} (phi - psi)(x) via alternating ascent
  // for the lower bound and the mesh bound applied to  lmax(x (+) -x) twice.
  BallSectionRegion region(*L.ball, L.section_eqs());
  const int d = coord_dim(L.alg);
  const DirectSum ds = direct_sum(L.alg, L.alg);
  SpecFun f;  // lmax((x, -x)) = max(lmax x, lmax(-x)) = opnorm on the section
  f.T = ds.sum;
  f.P = RMat::Zero(coord_dim(ds.sum), d);
  f.P.topRows(d) = RMat::Identity(d, d);
  f.P.bottomRows(d) = -RMat::Identity(d, d);
  f.c0 = RVec::Zero(coord_dim(ds.sum));
  DCResult r = dc_bracket(region, f, {}, opt);
  // diameter = sup spread <= 2 sup opnorm; and >= sup opnorm.  Tighten the
  // lower bound by alternating ascent on (phi - psi).
  double lb = r.lb;
  if (r.arg.size()) {
    RVec x = r.arg;
    for (int it = 0; it < 16; ++it) {
      const Element a = from_coords(L.alg, x);
      double hi = -kInf, lo = kInf;
      State sp, sm;
      for (int j = 0; j < L.alg.num_blocks(); ++j) {
        const EigH e = eigh(a.m[j]);
        if (e.values(e.values.size() - 1) > hi) {
          hi = e.values(e.values.size() - 1);
          sp = State::pure(L.alg, j, e.vectors.col(e.values.size() - 1));
        }
        if (e.values(0) < lo) {
          lo = e.values(0);
          sm = State::pure(L.alg, j, e.vectors.col(0));
        }
      }
      lb = std::max(lb, hi - lo);
      const RVec c = sp.coords() - sm.coords();
      const LinMaxResult lm = linear_max_section(*L.ball, c, L.section_eqs());
      if (!lm.ok || (lm.x_feas - x).norm() < 1e-10) break;
      x = lm.x_feas;
    }
  }
  return {lb, 2.0 * r.ub, r.gap_closed};
}

// ---------------------------------------------------------------------------
// Quasi-Leibniz generator criterion: the gauge of the balanced hull S is
// F-quasi-Leibniz iff jordan(a,b) and lie(a,b) lie in F(|a|,|b|,1,1) S for
// all a, b in S.  Exact on generator pairs; randomized convex-combination
// probes guard against cancellation effects away from the generators.

struct QLReport {
  bool pass = true;
  double worst_margin = kInf;  // min over checks of allowance - gauge
  Element witness_a, witness_b;
  std::string worst_kind;
};

inline QLReport quasi_leibniz_check(const LipNorm& L, const Permissible& F,
                                    int probes = 128, unsigned seed = 99,
                                    double tol = 1e-9) {
  const VRepBall* v = L.vrep();
  if (!v) throw std::invalid_argument("quasi_leibniz_check: needs a VRep ball");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  QLReport rep;
  const int m = static_cast<int>(v->G.cols());
  auto check_pair = [&](const Element& a, const Element& b, const char* kind) {
    const double na = operator_norm(a), nb = operator_norm(b);
    const double allow = F(na, nb, 1.0, 1.0);
    for (int which = 0; which < 2; ++which) {
      const Element p = which == 0 ? jordan(a, b) : lie(a, b);
      const GaugeVal g = L.ball->gauge(to_coords(p));
      const double margin = g.finite ? allow - g.v : -kInf;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.witness_a = a;
        rep.witness_b = b;
        rep.worst_kind = std::string(kind) + (which == 0 ? "/jordan" : "/lie");
      }
      if (margin < -tol) rep.pass = false;
    }
  };
  std::vector<Element> gens;
  for (int k = 0; k < m; ++k) gens.push_back(from_coords(L.alg, v->G.col(k)));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) check_pair(gens[i], gens[j], "generators");
  for (int t = 0; t < probes; ++t) {
    // random balanced convex combinations (plus a unit-line shift), gauge <= 1
    auto rnd = [&]() {
      RVec w(m);
      double s = 0.0;
      for (int k = 0; k < m; ++k) {
        w(k) = uni(rng);
        s += std::abs(w(k));
      }
      if (s > 1.0) w /= s;
      RVec x = v->G * w;
      return from_coords(L.alg, x + uni(rng) * unit_coords(L.alg));
    };
    check_pair(rnd(), rnd(), "probe");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Lip-norm from a finite metric space on C(X): L(f) = max |f_x - f_y|/d(x,y).

struct MetricSpace {
  std::vector<std::string> labels;
  RMat d;

  int n() const { return static_cast<int>(d.rows()); }
  void validate(double tol = 1e-12) const {
    const int k = n();
    if (d.cols() != k) throw std::invalid_argument("metric: not square");
    for (int i = 0; i < k; ++i) {
      if (std::abs(d(i, i)) > tol) throw std::invalid_argument("metric: d(i,i) != 0");
      for (int j = 0; j < k; ++j) {
        if (i != j && d(i, j) <= tol)
          throw std::invalid_argument("metric: zero off-diagonal");
        if (std::abs(d(i, j) - d(j, i)) > tol)
          throw std::invalid_argument("metric: not symmetric");
        for (int l = 0; l < k; ++l)
          if (d(i, j) > d(i, l) + d(l, j) + tol)
            throw std::invalid_argument("metric: triangle inequality fails");
      }
    }
  }
  double diam() const { return d.maxCoeff(); }
};

// V-representation preferred (vertex enumeration) for n <= 6, H-style
// composite otherwise.
inline LipNorm lip_from_metric(const MetricSpace& X) {
  X.validate();
  const int n = X.n();
  const Algebra A = Algebra::commutative(n);
  std::vector<std::pair<RVec, double>> rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      RVec r = RVec::Zero(n);
      r(i) = 1.0 / X.d(i, j);
      r(j) = -1.0 / X.d(i, j);
      rows.push_back({r, 1.0});
    }
  if (n <= 6) {
    // vertices of the section {L(f) <= 1, sum f = 0}: enumerate in the
    // hyperplane via the last coordinate elimination
    std::vector<std::pair<RVec, double>> red;
    for (const auto& r : rows) {
      // substitute f_n = -(f_1 + ... + f_{n-1})
      RVec q = r.first.head(n - 1) - RVec::Constant(n - 1, r.first(n - 1));
      red.push_back({q, r.second});
    }
    const Polytope P = enumerate_vertices(red);
    RMat G(n, P.nv());
    for (int k = 0; k < P.nv(); ++k) {
      G.col(k).head(n - 1) = P.V.col(k);
      G(n - 1, k) = -P.V.col(k).sum();
    }
    return LipNorm(A, std::make_shared<VRepBall>(G, unit_coords(A)),
                   Permissible{1.0, 0.0});
  }
  std::vector<MaxBall::Term> terms;
  for (const auto& r : rows) {
    RMat P(1, n);
    P.row(0) = r.first.transpose();
    terms.push_back({P, std::make_shared<OpNormBall>(Algebra::commutative(1), 1.0)});
  }
  return LipNorm(A, std::make_shared<MaxBall>(n, std::move(terms)),
                 Permissible{1.0, 0.0});
}

// max of two Lip-norms on the same algebra; quasi-Leibniz for the pointwise
// larger constants.
inline LipNorm max_lipnorms(const LipNorm& L1, const LipNorm& L2) {
  if (!(L1.alg == L2.alg))
    throw std::invalid_argument("max_lipnorms: different algebras");
  const int d = coord_dim(L1.alg);
  std::vector<MaxBall::Term> terms;
  terms.push_back({RMat::Identity(d, d), L1.ball});
  terms.push_back({RMat::Identity(d, d), L2.ball});
  return LipNorm(L1.alg, std::make_shared<MaxBall>(d, std::move(terms)),
                 Permissible{std::max(L1.F.C, L2.F.C), std::max(L1.F.D, L2.F.D)});
}

}  // namespace qmet
