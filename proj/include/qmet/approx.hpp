#pragma once
// Finite-dimensional approximation pipeline: compression witnesses,
// unitalization corrections, approximation Lip-norms with certified
// quasi-Leibniz constants, and the mismatch tunnel with its length bound.

#include "qmet/tunnel.hpp"

namespace qmet {

// per-block kept corner sizes; empty selects the identity witness
struct CompressionSpec {
  std::vector<int> keep;
  bool identity() const { return keep.empty(); }
};

// ---------------------------------------------------------------------------

// s = m(1)^{-1/2} m(.) m(1)^{-1/2}; requires m(1) invertible
inline LinMap normalize_unital(const LinMap& m, double tol = 1e-8) {
  const Element u = m.apply(from_coords(m.src, unit_coords(m.src)));
  std::vector<Mat> s(u.m.size());
  for (size_t j = 0; j < u.m.size(); ++j) {
    if (lambda_min(u.m[j]) <= tol)
      throw std::invalid_argument("normalize_unital: unit image not invertible");
    s[j] = herm_function(u.m[j], [](double v) { return 1.0 / std::sqrt(v); });
  }
  return LinMap::from_action(m.src, m.dst, [&](const Element& x) {
    Element y = m.apply(x);
    for (size_t j = 0; j < y.m.size(); ++j) y.m[j] = s[j] * y.m[j] * s[j];
    return y;
  });
}

// ---------------------------------------------------------------------------
// Compression witness: psi: A -> B, phi: B -> A with recorded deviations on a
// finite set F (round trip, jordan and lie multiplicativity).

struct PseudoDiagonalWitness {
  LinMap psi, phi;
  double eps = 0.0;
  double roundtrip = 0.0;   // max ||a - phi(psi(a))||
  double jordan_dev = 0.0;  // max ||psi(jordan(a,b)) - jordan(psi a, psi b)||
  double lie_dev = 0.0;
  bool pass = false;
};

namespace apxdetail {

inline void record_deviations(PseudoDiagonalWitness& w,
                              const std::vector<Element>& F) {
  for (const Element& a : F) {
    w.roundtrip =
        std::max(w.roundtrip, operator_norm(a - w.phi.apply(w.psi.apply(a))));
    for (const Element& b : F) {
      const Element pa = w.psi.apply(a), pb = w.psi.apply(b);
      w.jordan_dev = std::max(
          w.jordan_dev,
          operator_norm(w.psi.apply(jordan(a, b)) - jordan(pa, pb)));
      w.lie_dev = std::max(
          w.lie_dev, operator_norm(w.psi.apply(lie(a, b)) - lie(pa, pb)));
    }
  }
  w.pass = w.roundtrip <= w.eps + 1e-12 && w.jordan_dev <= w.eps + 1e-12 &&
           w.lie_dev <= w.eps + 1e-12;
}

}  // namespace apxdetail

inline PseudoDiagonalWitness pseudo_diagonal_witness(
    const Algebra& A, const std::vector<Element>& F, double eps,
    const CompressionSpec& spec) {
  PseudoDiagonalWitness w;
  w.eps = eps;
  if (spec.identity()) {
    w.psi = LinMap::identity(A);
    w.phi = LinMap::identity(A);
  } else {
    if (static_cast<int>(spec.keep.size()) != A.num_blocks())
      throw std::invalid_argument("pseudo_diagonal_witness: keep size");
    w.psi = normalize_unital(compress_map(A, spec.keep));
    const Algebra B = corner_algebra(A, spec.keep);
    const RVec tau = State::tracial(B).coords();
    w.phi = LinMap::from_action(B, A, [&](const Element& b) {
      const double t = tau.dot(to_coords(b));  // complement completion level
      Element y(A);
      int out = 0;
      for (int j = 0; j < A.num_blocks(); ++j) {
        y.m[j] = t * Mat::Identity(A.blocks[j], A.blocks[j]);
        if (spec.keep[j] > 0) {
          y.m[j].topLeftCorner(spec.keep[j], spec.keep[j]) = b.m[out];
          ++out;
        }
      }
      return y;
    });
  }
  apxdetail::record_deviations(w, F);
  return w;
}

// ---------------------------------------------------------------------------
// Unitalization: from a near-unital positive pair, cut down to the spectral
// corner of D = psi(1) where D is close to 1, and verify the corrected maps.

struct UnitalizeResult {
  bool ok = false;  // spectral gap present, corner built
  std::string message;
  Algebra corner;
  LinMap sigma;    // A -> corner
  LinMap phi_out;  // corner -> A
  double one_mismatch = kInf;
  double roundtrip = kInf;
  double jordan_dev = kInf, lie_dev = kInf;
};

inline UnitalizeResult unitalize(const LinMap& psi, const LinMap& phi,
                                 const std::vector<Element>& F, double eps) {
  if (eps <= 0 || eps >= 0.25)
    throw std::invalid_argument("unitalize: need 0 < eps < 1/4");
  UnitalizeResult out;
  const Algebra& A = psi.src;
  const Algebra& B = psi.dst;
  const Element D = psi.apply(from_coords(A, unit_coords(A)));
  // spectral corners: eigenvalues must avoid (eps, 1-eps)
  std::vector<Mat> V(B.num_blocks());
  std::vector<int> rank(B.num_blocks(), 0);
  for (int j = 0; j < B.num_blocks(); ++j) {
    const int n = B.blocks[j];
    if ((D.m[j] - Mat::Identity(n, n)).norm() <= 1e-12) {
      V[j] = Mat::Identity(n, n);
      rank[j] = n;
      continue;
    }
    const EigH e = eigh(D.m[j]);
    std::vector<int> sel;
    for (int i = 0; i < n; ++i) {
      const double lam = e.values(i);
      if (lam > eps && lam < 1.0 - eps) {
        out.message = "spectral gap absent: eigenvalue " + std::to_string(lam) +
                      " of psi(1) lies in (" + std::to_string(eps) + ", " +
                      std::to_string(1.0 - eps) + ")";
        return out;
      }
      if (lam >= 1.0 - eps) sel.push_back(i);
    }
    rank[j] = static_cast<int>(sel.size());
    V[j].resize(n, rank[j]);
    for (size_t k = 0; k < sel.size(); ++k) V[j].col(k) = e.vectors.col(sel[k]);
  }
  std::vector<int> bl;
  for (int j = 0; j < B.num_blocks(); ++j)
    if (rank[j] > 0) bl.push_back(rank[j]);
  if (bl.empty()) {
    out.message = "unitalize: psi(1) has no spectrum near 1";
    return out;
  }
  out.corner = Algebra(bl);
  out.sigma = LinMap::from_action(A, out.corner, [&](const Element& a) {
    const Element pa = psi.apply(a);
    Element y(out.corner);
    int oj = 0;
    for (int j = 0; j < B.num_blocks(); ++j)
      if (rank[j] > 0) y.m[oj++] = V[j].adjoint() * pa.m[j] * V[j];
    return y;
  });
  out.phi_out = LinMap::from_action(out.corner, A, [&](const Element& c) {
    Element b(B);
    int oj = 0;
    for (int j = 0; j < B.num_blocks(); ++j) {
      b.m[j] = Mat::Zero(B.blocks[j], B.blocks[j]);
      if (rank[j] > 0) {
        b.m[j] = V[j] * c.m[oj] * V[j].adjoint();
        ++oj;
      }
    }
    return phi.apply(b);
  });
  out.ok = true;
  const Element oneC = from_coords(out.corner, unit_coords(out.corner));
  out.one_mismatch = operator_norm(
      oneC - out.sigma.apply(from_coords(A, unit_coords(A))));
  out.roundtrip = 0.0;
  out.jordan_dev = out.lie_dev = 0.0;
  for (const Element& a : F) {
    out.roundtrip = std::max(
        out.roundtrip, operator_norm(a - out.phi_out.apply(out.sigma.apply(a))));
    for (const Element& b : F) {
      const Element sa = out.sigma.apply(a), sb = out.sigma.apply(b);
      out.jordan_dev =
          std::max(out.jordan_dev, operator_norm(out.sigma.apply(jordan(a, b)) -
                                                 jordan(sa, sb)));
      out.lie_dev = std::max(
          out.lie_dev,
          operator_norm(out.sigma.apply(lie(a, b)) - lie(sa, sb)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// delta-dense finite subset (operator norm) of a VRep section
// {gauge <= 1, mu = 0}, grown adaptively and certified on random probes.

struct DenseSubset {
  std::vector<RVec> pts;
  double covering_radius = kInf;
  bool certified = false;
};

inline DenseSubset dense_subset_of_ball(const LipNorm& L, const State& mu,
                                        double delta, unsigned seed = 5,
                                        int probes = 1000) {
  const VRepBall* v = L.vrep();
  if (!v)
    throw std::invalid_argument("dense_subset_of_ball: needs a VRep ball");
  const RVec mc = mu.coords();
  const RVec u = unit_coords(L.alg);
  const int m = static_cast<int>(v->G.cols());
  // centered generators span the section: x = sum w_k ghat_k, sum |w| <= 1
  RMat Gh(v->G.rows(), m);
  for (int k = 0; k < m; ++k)
    Gh.col(k) = v->G.col(k) - (mc.dot(v->G.col(k)) / mc.dot(u)) * u;
  DenseSubset out;
  out.pts.push_back(RVec::Zero(v->G.rows()));
  for (int k = 0; k < m; ++k) {
    out.pts.push_back(Gh.col(k));
    out.pts.push_back(-Gh.col(k));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto probe = [&]() {
    RVec w(m);
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      w(k) = g(rng);
      s += std::abs(w(k));
    }
    w *= std::pow(uni(rng), 1.0 / m) / s;
    return RVec(Gh * w);
  };
  // mesh kept as a matrix for vectorized Euclidean prefiltering; the operator
  // norm is evaluated only on the few nearest candidates, which upper-bounds
  // the true mesh distance (sound for both violator detection and the
  // covering certificate)
  const int d0 = static_cast<int>(v->G.rows());
  RMat mesh(d0, static_cast<int>(out.pts.size()));
  for (size_t k = 0; k < out.pts.size(); ++k)
    mesh.col(static_cast<int>(k)) = out.pts[k];
  auto dist_ub_to_mesh = [&](const RVec& x) {
    const int n = static_cast<int>(out.pts.size());
    const RVec e2 = (mesh.leftCols(n).colwise() - x).colwise().squaredNorm();
    // op norm <= Frobenius <= sqrt(2) * coordinate norm: cheap accept
    const double quick = std::sqrt(2.0 * e2.minCoeff());
    if (quick <= delta) return quick;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const int kNear = std::min(n, 6);
    std::partial_sort(idx.begin(), idx.begin() + kNear, idx.end(),
                      [&](int a, int b) { return e2(a) < e2(b); });
    double best = kInf;
    for (int k = 0; k < kNear; ++k)
      best = std::min(best,
                      operator_norm(from_coords(L.alg, x - out.pts[idx[k]])));
    return best;
  };
  auto push = [&](const RVec& x) {
    if (static_cast<int>(out.pts.size()) == mesh.cols())
      mesh.conservativeResize(Eigen::NoChange, 2 * mesh.cols());
    mesh.col(static_cast<int>(out.pts.size())) = x;
    out.pts.push_back(x);
  };
  for (int round = 0; round < 40 && !out.certified; ++round) {
    double worst = 0.0;
    bool added = false;
    for (int t = 0; t < probes; ++t) {
      const RVec x = probe();
      const double d = dist_ub_to_mesh(x);
      worst = std::max(worst, d);
      if (d > delta) {
        push(x);
        added = true;
      }
    }
    if (!added) {
      out.covering_radius = worst;
      out.certified = worst <= delta;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Outer polytopal sandwich of the operator-norm unit ball, as balanced
// generators with a recorded inflation factor (max true norm of a vertex).

namespace apxdetail {

inline std::pair<RMat, double> norm_ball_generators(const Algebra& B) {
  std::vector<RMat> block_gens(B.num_blocks());
  double inflation = 1.0;
  for (int j = 0; j < B.num_blocks(); ++j) {
    const int n = B.blocks[j];
    if (n == 1) {
      block_gens[j] = RMat::Ones(1, 1);
      continue;
    }
    if (n > 2)
      throw std::invalid_argument(
          "norm_ball_generators: blocks above 2x2 unsupported");
    const Algebra single({n});
    const OpNormBall ball(single, 1.0);
    const int d = n * n;  // 4
    std::vector<RVec> dirs;
    for (int i = 0; i < d; ++i) {
      dirs.push_back(RVec::Unit(d, i));
      dirs.push_back(-RVec::Unit(d, i));
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (double sa : {1.0, -1.0})
          for (double sb : {1.0, -1.0}) {
            RVec x = RVec::Zero(d);
            x(a) = sa;
            x(b) = sb;
            dirs.push_back(x / std::sqrt(2.0));
          }
    std::vector<std::pair<RVec, double>> rows;
    for (const RVec& x : dirs) {
      const SupportCut sc = ball.support_cut(x);
      if (sc.g.finite && sc.g.v > 1e-12) rows.push_back({sc.y, 1.0});
    }
    const Polytope P = enumerate_vertices(rows);
    // keep one of each +/- pair
    std::vector<RVec> gens;
    for (int k = 0; k < P.nv(); ++k) {
      bool dup = false;
      for (const RVec& q : gens)
        if ((q + P.V.col(k)).norm() < 1e-7) dup = true;
      if (!dup) gens.push_back(P.V.col(k));
    }
    // normalize vertices onto the norm sphere: the balanced hull is then an
    // inner body (so unit-ball membership of generators is exact, which the
    // tunnel lift argument needs), and the pre-normalization norms certify
    // ball <= inflation * inner.
    block_gens[j].resize(d, static_cast<int>(gens.size()));
    for (size_t k = 0; k < gens.size(); ++k) {
      const double nrm = operator_norm(from_coords(single, gens[k]));
      block_gens[j].col(static_cast<int>(k)) = gens[k] / nrm;
      inflation = std::max(inflation, nrm);
    }
  }
  // product over blocks: vertices combine across blocks with all signs
  const int dim = coord_dim(B);
  std::vector<RVec> verts = {RVec::Zero(dim)};
  int off = 0;
  for (int j = 0; j < B.num_blocks(); ++j) {
    const int bd = B.blocks[j] * B.blocks[j];
    std::vector<RVec> next;
    for (const RVec& base : verts)
      for (int k = 0; k < block_gens[j].cols(); ++k)
        for (double s : {1.0, -1.0}) {
          RVec x = base;
          x.segment(off, bd) = s * block_gens[j].col(k);
          next.push_back(x);
        }
    verts.swap(next);
    off += bd;
  }
  // drop +/- duplicates again (outermost sign is redundant)
  std::vector<RVec> gens;
  for (const RVec& x : verts) {
    bool dup = false;
    for (const RVec& q : gens)
      if ((q + x).norm() < 1e-7 || (q - x).norm() < 1e-7) dup = true;
    if (!dup) gens.push_back(x);
  }
  RMat W(dim, static_cast<int>(gens.size()));
  for (size_t k = 0; k < gens.size(); ++k) W.col(static_cast<int>(k)) = gens[k];
  return {W, inflation};
}

}  // namespace apxdetail

// ---------------------------------------------------------------------------
// Approximation Lip-norm on B: gauge of  psi(ball_A) + eps * (norm ball),
// realized as a balanced hull of mixed-sign Minkowski generators, carrying
// the certified quasi-Leibniz constants derived from (C, D, eps).

struct ApproxLipNorm {
  LipNorm L;
  double eps = 0.0;
  double inflation = 1.0;  // outer sandwich factor of the norm-ball part
  Permissible constants;
  QLReport certificate;
  bool precondition_ok = true;
  std::string message;
};

inline ApproxLipNorm approx_lipnorm(const LipNorm& LA, const LinMap& psi,
                                    double eps, const std::vector<Element>& F) {
  if (eps <= 0) throw std::invalid_argument("approx_lipnorm: eps <= 0");
  const VRepBall* v = LA.vrep();
  if (!v) throw std::invalid_argument("approx_lipnorm: needs a VRep ball");
  if (!psi.is_unital(1e-7))
    throw std::invalid_argument("approx_lipnorm: psi not unital");
  ApproxLipNorm out;
  out.eps = eps;
  // deviation budget eps^2 on F
  const double budget = eps * eps + 1e-12;
  for (size_t i = 0; i < F.size() && out.precondition_ok; ++i)
    for (size_t j = 0; j < F.size(); ++j) {
      const Element pa = psi.apply(F[i]), pb = psi.apply(F[j]);
      const double dj =
          operator_norm(psi.apply(jordan(F[i], F[j])) - jordan(pa, pb));
      const double dl = operator_norm(psi.apply(lie(F[i], F[j])) - lie(pa, pb));
      if (dj > budget || dl > budget) {
        out.precondition_ok = false;
        out.message = "multiplicativity deviation " +
                      std::to_string(std::max(dj, dl)) + " above eps^2 at F[" +
                      std::to_string(i) + "], F[" + std::to_string(j) + "]";
        break;
      }
    }
  const Algebra& B = psi.dst;
  const auto [W, infl] = apxdetail::norm_ball_generators(B);
  out.inflation = infl;
  const int m = static_cast<int>(v->G.cols());
  const int nw = static_cast<int>(W.cols());
  RMat H(coord_dim(B), m * nw * 2);
  int col = 0;
  for (int k = 0; k < m; ++k) {
    const RVec u = psi.M * v->G.col(k);
    for (int w = 0; w < nw; ++w) {
      H.col(col++) = u + eps * W.col(w);
      H.col(col++) = u - eps * W.col(w);
    }
  }
  // prune generators interior to the balanced hull (the Minkowski product
  // set is heavily redundant and the quasi-Leibniz check is quadratic in it)
  {
    std::vector<int> keep;
    for (int k = 0; k < H.cols(); ++k) {
      bool dup = false;
      for (int q : keep)
        if ((H.col(q) - H.col(k)).norm() < 1e-9 ||
            (H.col(q) + H.col(k)).norm() < 1e-9) {
          dup = true;
          break;
        }
      if (!dup) keep.push_back(k);
    }
    std::vector<int> essential;
    for (size_t i = 0; i < keep.size(); ++i) {
      RMat rest(H.rows(), static_cast<int>(keep.size()) - 1);
      int c = 0;
      for (size_t j = 0; j < keep.size(); ++j)
        if (j != i) rest.col(c++) = H.col(keep[j]);
      const GaugeVal g =
          VRepBall(rest, unit_coords(B)).gauge(H.col(keep[i]));
      if (!g.finite || g.v > 1.0 + 1e-9) essential.push_back(keep[i]);
    }
    if (!essential.empty()) {
      RMat Hp(H.rows(), static_cast<int>(essential.size()));
      for (size_t i = 0; i < essential.size(); ++i)
        Hp.col(static_cast<int>(i)) = H.col(essential[i]);
      H = Hp;
    }
  }
  const double C = LA.F.C, D = LA.F.D;
  out.constants = Permissible{
      C * (1.0 + 2.0 * eps),
      C * (2.0 * eps + 10.0 * eps * eps + 12.0 * eps * eps * eps) + D};
  out.L = LipNorm(B, std::make_shared<VRepBall>(H, unit_coords(B)),
                  out.constants);
  out.certificate = quasi_leibniz_check(out.L, out.constants, 64);
  return out;
}

// ---------------------------------------------------------------------------
// Mismatch tunnel on A (+) B:  L(a,b) = max{L_A(a), L_B(b), ||psi(a)-b||/eps}.

struct ApproxTunnelResult {
  Tunnel t;
  TunnelInvariants inv;
  double quotient_defect = kInf;
};

inline ApproxTunnelResult approx_tunnel(const LipNorm& LA,
                                        const ApproxLipNorm& LB,
                                        const LinMap& psi, double eps,
                                        const DCOptions& opt = {}) {
  if (eps <= 0) throw std::invalid_argument("approx_tunnel: eps <= 0");
  const Algebra& B = psi.dst;
  const DirectSum ds = direct_sum(LA.alg, B);
  const int d = coord_dim(ds.sum);
  std::vector<MaxBall::Term> terms;
  terms.push_back({ds.p1.M, LA.ball});
  terms.push_back({ds.p2.M, LB.L.ball});
  terms.push_back({psi.M * ds.p1.M - ds.p2.M,
                   std::make_shared<OpNormBall>(B, eps)});
  ApproxTunnelResult out;
  out.t.LD = LipNorm(ds.sum, std::make_shared<MaxBall>(d, std::move(terms)),
                     LB.constants);
  out.t.LA = LA;
  out.t.LB = LB.L;
  out.t.piA = ds.p1;
  out.t.piB = ds.p2;
  out.t.direct_sum = true;
  out.t.kind = "approx";
  const bool id_psi =
      psi.src == psi.dst &&
      (psi.M - RMat::Identity(psi.M.rows(), psi.M.cols())).norm() < 1e-12;
  if (id_psi) {
    // |lmax a - lmax b| <= ||a - b|| <= eps on the unit ball of L
    out.t.analytic_reach_ub = eps;
    out.t.analytic_extent_ub = eps;
  }
  if (id_psi) {
    // analytic brackets suffice; skip the DC engine runs
    out.inv.reach = {0.0, eps, true};
    out.inv.depth = {0.0, 0.0, true};
    out.inv.extent = {0.0, eps, true};
    out.inv.length = {0.0, eps, true};
  } else {
    out.inv = tunnel_invariants(out.t, opt);
  }
  out.quotient_defect = verify_quotient(out.t);
  return out;
}

}  // namespace qmet
