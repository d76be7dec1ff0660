#pragma once
// Tunnels between quasi-Leibniz quantum compact metric spaces and their
// numerical invariants (extent, reach, depth, length).

#include "qmet/lipnorm.hpp"

namespace qmet {

struct Tunnel {
  LipNorm LD;       // Lip-norm on the carrier D
  LipNorm LA, LB;   // factor Lip-norms
  LinMap piA, piB;  // unital *-epimorphisms D -> A, D -> B (coordinate form)
  bool direct_sum = true;  // carrier is A (+) B with the two coordinate maps
  double analytic_reach_ub = kInf;   // construction-specific certified bound
  double analytic_extent_ub = kInf;
  std::string kind;
};

struct TunnelInvariants {
  Bracket reach, depth, extent, length;
};

namespace tundetail {

inline SpecFun lmax_of(const Algebra& T, const RMat& P) {
  return SpecFun::linear(T, P);
}

// one-sided sup over the L_D section of lmax(P x) - lmax(Q x)
inline DCResult one_sided(const LipNorm& LD, const SpecFun& p, const SpecFun& q,
                          const DCOptions& opt) {
  BallSectionRegion region(*LD.ball, LD.section_eqs());
  return dc_bracket(region, p, {q}, opt);
}

}  // namespace tundetail

// All four invariants from the support-function reduction
//   Haus(S(D), pi_j^* S(A_j))        -> extent
//   Haus(pi_A^* S(A), pi_B^* S(B))   -> reach
//   Haus(S(D), conv of the union)    -> depth,
// each one-sided value being  sup_{L_D(d) <= 1} [lmax(M d) - lmax(N d)].
inline TunnelInvariants tunnel_invariants(const Tunnel& t, const DCOptions& opt = {}) {
  using tundetail::lmax_of;
  using tundetail::one_sided;
  TunnelInvariants out;
  const SpecFun fA = lmax_of(t.LA.alg, t.piA.M);
  const SpecFun fB = lmax_of(t.LB.alg, t.piB.M);
  const SpecFun fD =
      lmax_of(t.LD.alg, RMat::Identity(coord_dim(t.LD.alg), coord_dim(t.LD.alg)));
  const DCResult rAB = one_sided(t.LD, fA, fB, opt);
  const DCResult rBA = one_sided(t.LD, fB, fA, opt);
  out.reach.lb = std::max({0.0, rAB.lb, rBA.lb});
  out.reach.ub = std::max({0.0, rAB.ub, rBA.ub});
  out.reach.converged = rAB.gap_closed && rBA.gap_closed;
  out.reach.ub = std::min(out.reach.ub, t.analytic_reach_ub);
  if (t.direct_sum) {
    // lmax_D = max(lmax o piA, lmax o piB): the depth integrand vanishes
    // identically and the one-sided extent values equal the reach values.
    out.depth = {0.0, 0.0, true};
    out.extent = out.reach;
  } else {
    const DCResult eA = one_sided(t.LD, fD, fA, opt);
    const DCResult eB = one_sided(t.LD, fD, fB, opt);
    out.extent.lb = std::max({0.0, eA.lb, eB.lb});
    out.extent.ub = std::max({0.0, eA.ub, eB.ub});
    out.extent.converged = eA.gap_closed && eB.gap_closed;
    BallSectionRegion region(*t.LD.ball, t.LD.section_eqs());
    const DCResult dp = dc_bracket(region, fD, {fA, fB}, opt);
    out.depth.lb = std::max(0.0, dp.lb);
    out.depth.ub = std::max(0.0, dp.ub);
    out.depth.converged = dp.gap_closed;
  }
  out.extent.ub = std::min(out.extent.ub, t.analytic_extent_ub);
  // extent dominates both reach and depth; use it to clip
  out.reach.ub = std::min(out.reach.ub, out.extent.ub);
  out.depth.ub = std::min(out.depth.ub, out.extent.ub);
  out.length.lb = std::max(out.reach.lb, out.depth.lb);
  out.length.ub = std::max(out.reach.ub, out.depth.ub);
  out.length.converged = out.reach.converged && out.depth.converged;
  return out;
}

inline Bracket tunnel_extent(const Tunnel& t, const DCOptions& opt = {}) {
  return tunnel_invariants(t, opt).extent;
}

// ---------------------------------------------------------------------------
// Quotient condition: inf { L_D(d) : pi(d) = a } via Kelley cuts on the
// gauge epigraph.  Returns [lb, ub] and a witness lift.

struct QuotientResult {
  Bracket value;
  RVec lift;
};

inline QuotientResult quotient_gauge(const LipNorm& LD, const LinMap& pi,
                                     const RVec& a, double tol = 1e-7,
                                     int max_iters = 300) {
  const int d = coord_dim(LD.alg);
  std::vector<RVec> cuts;
  QuotientResult out;
  out.value = {0.0, kInf, false};
  RVec dbest;
  for (int it = 0; it < max_iters; ++it) {
    LP lp(d + 1);
    lp.c = RVec::Zero(d + 1);
    lp.c(d) = -1.0;  // minimize t
    for (const RVec& y : cuts) {
      RVec row = RVec::Zero(d + 1);
      row.head(d) = y;
      row(d) = -1.0;
      lp.add_le(row, 0.0);
    }
    {
      RVec row = RVec::Zero(d + 1);
      row(d) = -1.0;
      lp.add_le(row, 0.0);  // t >= 0
    }
    for (int r = 0; r < pi.M.rows(); ++r) {
      RVec row = RVec::Zero(d + 1);
      row.head(d) = pi.M.row(r).transpose();
      lp.add_eq(row, a(r));
    }
    for (int i = 0; i <= d; ++i) {
      RVec e = RVec::Zero(d + 1);
      e(i) = 1.0;
      lp.add_le(e, 1e6);
      lp.add_le(-e, 1e6);
    }
    const LPResult r = lp.solve();
    if (r.status == LPStatus::Infeasible) {
      out.value = {kInf, kInf, true};  // a not in the range
      return out;
    }
    if (r.status != LPStatus::Optimal)
      throw std::runtime_error("quotient_gauge: LP failed");
    const RVec dv = r.x.head(d);
    out.value.lb = std::max(out.value.lb, r.x(d));
    const SupportCut sc = LD.ball->support_cut(dv);
    if (sc.g.finite && sc.g.v < out.value.ub) {
      out.value.ub = sc.g.v;
      dbest = dv;
    }
    if (sc.g.finite && sc.g.v <= out.value.lb + tol * std::max(1.0, sc.g.v)) {
      out.value.converged = true;
      break;
    }
    cuts.push_back(sc.y);
  }
  out.lift = dbest;
  return out;
}

// Verify the quotient condition L_A(a) = inf{L_D : pi = a} on the factor
// generators; returns the worst |mismatch|.
inline double verify_quotient(const Tunnel& t, double tol = 1e-6) {
  double worst = 0.0;
  auto side = [&](const LipNorm& LA, const LinMap& pi) {
    const VRepBall* v = LA.vrep();
    std::vector<RVec> probes;
    if (v)
      for (int k = 0; k < v->G.cols(); ++k) probes.push_back(v->G.col(k));
    else
      for (int i = 0; i < coord_dim(LA.alg); ++i)
        probes.push_back(RVec::Unit(coord_dim(LA.alg), i));
    for (const RVec& a : probes) {
      const GaugeVal la = LA.ball->gauge(a);
      if (!la.finite) continue;
      const QuotientResult q = quotient_gauge(t.LD, pi, a, tol);
      worst = std::max(worst, std::abs(q.value.ub - la.v));
    }
  };
  side(t.LA, t.piA);
  side(t.LB, t.piB);
  return worst;
}

// Target set probe: find d with pi_A(d) = a and L_D(d) <= l; also report the
// norm bound ||d|| <= ||a|| + 2 l * extent_ub.
struct TargetProbe {
  bool feasible = false;
  RVec d;
  double lip = kInf;
  double norm_bound = kInf;
};

inline TargetProbe target_set_probe(const Tunnel& t, const Element& a, double l,
                                    double extent_ub, double tol = 1e-7) {
  TargetProbe out;
  const QuotientResult q = quotient_gauge(t.LD, t.piA, to_coords(a), tol);
  if (!q.lift.size()) return out;
  if (q.value.ub <= l * (1.0 + 1e-9) + tol) {
    out.feasible = true;
    out.d = q.lift;
    out.lip = q.value.ub;
    out.norm_bound = operator_norm(a) + 2.0 * l * extent_ub;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard tunnel (direct sum with an embedding-mismatch seminorm):
//   L(a,b) = max{ L_A(a), L_B(b), ||rho_A(a) - rho_B(b)|| / lam },
//   lam = max(diam_A, diam_B) + eps.
inline Tunnel standard_tunnel(const LipNorm& LA, const LipNorm& LB, double eps) {
  if (eps <= 0) throw std::invalid_argument("standard_tunnel: eps <= 0");
  const auto [ea, eb] = common_unital_embedding(LA.alg, LB.alg);
  const double dm = std::max(diameter(LA).ub, diameter(LB).ub);
  const double lam = dm + eps;
  const DirectSum ds = direct_sum(LA.alg, LB.alg);
  const int d = coord_dim(ds.sum);
  const LinMap ra = ea.as_linmap(), rb = eb.as_linmap();
  std::vector<MaxBall::Term> terms;
  terms.push_back({ds.p1.M, LA.ball});
  terms.push_back({ds.p2.M, LB.ball});
  terms.push_back({ra.M * ds.p1.M - rb.M * ds.p2.M,
                   std::make_shared<OpNormBall>(Algebra::full(ea.N), lam)});
  Tunnel t;
  t.LD = LipNorm(ds.sum, std::make_shared<MaxBall>(d, std::move(terms)),
                 Permissible{std::max(LA.F.C, LB.F.C), std::max(LA.F.D, LB.F.D)});
  t.LA = LA;
  t.LB = LB;
  t.piA = ds.p1;
  t.piB = ds.p2;
  t.direct_sum = true;
  // any ball member satisfies ||rho_A a - rho_B b|| <= lam; composing the top
  // eigenstate of one side with the other unital embedding is a state, so
  // |lmax a - lmax b| <= lam pointwise and reach = extent <= lam.
  t.analytic_reach_ub = lam;
  t.analytic_extent_ub = lam;
  t.kind = "standard";
  return t;
}

// Bridge tunnel on a common embedding with pivot omega (element of M_N):
//   L(a,b) = max{ L_A(a), L_B(b), ||rho_A(a) w - w rho_B(b)|| / lam }.
inline Tunnel bridge_tunnel(const LipNorm& LA, const LipNorm& LB, const Mat& omega,
                            double lam) {
  if (lam <= 0) throw std::invalid_argument("bridge_tunnel: lam <= 0");
  const auto [ea, eb] = common_unital_embedding(LA.alg, LB.alg);
  const int N = ea.N;
  if (omega.rows() != N || omega.cols() != N)
    throw std::invalid_argument("bridge_tunnel: pivot size mismatch");
  // pivot admissibility: some state annihilates (1-w)*(1-w) and (1-w)(1-w)*
  const Mat dw = Mat::Identity(N, N) - omega;
  if (lambda_min(dw.adjoint() * dw) > 1e-9 || lambda_min(dw * dw.adjoint()) > 1e-9)
    throw std::invalid_argument("bridge_tunnel: pivot admits no annihilating state");
  const DirectSum ds = direct_sum(LA.alg, LB.alg);
  const int d = coord_dim(ds.sum);
  const LinMap ra = ea.as_linmap(), rb = eb.as_linmap();
  // x -> rho_A(a) w - w rho_B(b), a general matrix; build the real-coords map
  RMat Pgen(2 * N * N, d);
  for (int k = 0; k < d; ++k) {
    const RVec x = RVec::Unit(d, k);
    const Mat ma = from_coords(Algebra::full(N), ra.M * ds.p1.M * x).m[0];
    const Mat mb = from_coords(Algebra::full(N), rb.M * ds.p2.M * x).m[0];
    Pgen.col(k) = gen_to_coords(ma * omega - omega * mb);
  }
  std::vector<MaxBall::Term> terms;
  terms.push_back({ds.p1.M, LA.ball});
  terms.push_back({ds.p2.M, LB.ball});
  terms.push_back({Pgen, std::make_shared<GenNormBall>(N, N, lam)});
  Tunnel t;
  t.LD = LipNorm(ds.sum, std::make_shared<MaxBall>(d, std::move(terms)),
                 Permissible{std::max(LA.F.C, LB.F.C), std::max(LA.F.D, LB.F.D)});
  t.LA = LA;
  t.LB = LB;
  t.piA = ds.p1;
  t.piB = ds.p2;
  t.direct_sum = true;
  const bool identity_pivot = (dw.norm() <= 1e-12);
  if (identity_pivot) {
    t.analytic_reach_ub = lam;
    t.analytic_extent_ub = lam;
  }
  t.kind = "bridge";
  return t;
}

// Tunnel composition: carrier D1 (+) D2 glued along the common middle factor
// with an eps-mismatch seminorm.
inline Tunnel compose_tunnels(const Tunnel& t1, const Tunnel& t2, double eps,
                              double ext1_ub, double ext2_ub) {
  if (!(t1.LB.alg == t2.LA.alg))
    throw std::invalid_argument("compose_tunnels: middle algebras differ");
  if (eps <= 0) throw std::invalid_argument("compose_tunnels: eps <= 0");
  const DirectSum ds = direct_sum(t1.LD.alg, t2.LD.alg);
  const int d = coord_dim(ds.sum);
  std::vector<MaxBall::Term> terms;
  terms.push_back({ds.p1.M, t1.LD.ball});
  terms.push_back({ds.p2.M, t2.LD.ball});
  terms.push_back({t1.piB.M * ds.p1.M - t2.piA.M * ds.p2.M,
                   std::make_shared<OpNormBall>(t1.LB.alg, eps)});
  Tunnel t;
  t.LD = LipNorm(ds.sum, std::make_shared<MaxBall>(d, std::move(terms)),
                 Permissible{std::max(t1.LD.F.C, t2.LD.F.C),
                             std::max(t1.LD.F.D, t2.LD.F.D)});
  t.LA = t1.LA;
  t.LB = t2.LB;
  t.piA = t1.piA.compose(ds.p1);
  t.piB = t2.piB.compose(ds.p2);
  t.direct_sum = false;
  t.analytic_extent_ub = ext1_ub + ext2_ub + eps;
  t.analytic_reach_ub = t.analytic_extent_ub;
  t.kind = "composed";
  return t;
}

}  // namespace qmet
