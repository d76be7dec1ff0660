#pragma once
// Finite-dimensional C*-algebras as direct sums of full matrix blocks,
// hermitian coordinates, states, unital embeddings.

#include <numeric>
#include <random>
#include <string>

#include "qmet/linalg.hpp"

namespace qmet {

struct Algebra {
  std::vector<int> blocks;  // full matrix block sizes, each >= 1

  Algebra() = default;
  explicit Algebra(std::vector<int> b) : blocks(std::move(b)) {
    for (int n : blocks)
      if (n < 1) throw std::invalid_argument("Algebra: block size < 1");
  }
  static Algebra commutative(int k) { return Algebra(std::vector<int>(k, 1)); }
  static Algebra full(int n) { return Algebra({n}); }

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  // complex dimension = sum n_j^2
  int dim_c() const {
    int d = 0;
    for (int n : blocks) d += n * n;
    return d;
  }
  // real dimension of the self-adjoint part (= dim_c)
  int dim_sa() const { return dim_c(); }
  // total matrix size of the block-diagonal picture
  int total_size() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }
  bool commutative_all() const {
    for (int n : blocks)
      if (n > 1) return false;
    return true;
  }
  bool operator==(const Algebra& o) const { return blocks == o.blocks; }
};

struct Element {
  Algebra alg;
  std::vector<Mat> m;  // one matrix per block

  Element() = default;
  explicit Element(const Algebra& a) : alg(a) {
    for (int n : a.blocks) m.push_back(Mat::Zero(n, n));
  }
  Element(const Algebra& a, std::vector<Mat> mm) : alg(a), m(std::move(mm)) {
    if (static_cast<int>(m.size()) != a.num_blocks())
      throw std::invalid_argument("Element: block count mismatch");
    for (int j = 0; j < a.num_blocks(); ++j)
      if (m[j].rows() != a.blocks[j] || m[j].cols() != a.blocks[j])
        throw std::invalid_argument("Element: block size mismatch");
  }

  static Element unit(const Algebra& a) {
    Element e(a);
    for (int j = 0; j < a.num_blocks(); ++j)
      e.m[j] = Mat::Identity(a.blocks[j], a.blocks[j]);
    return e;
  }

  Element operator+(const Element& o) const {
    Element r(alg);
    for (size_t j = 0; j < m.size(); ++j) r.m[j] = m[j] + o.m[j];
    return r;
  }
  Element operator-(const Element& o) const {
    Element r(alg);
    for (size_t j = 0; j < m.size(); ++j) r.m[j] = m[j] - o.m[j];
    return r;
  }
  Element operator*(cxd s) const {
    Element r(alg);
    for (size_t j = 0; j < m.size(); ++j) r.m[j] = s * m[j];
    return r;
  }
  Element operator-() const { return (*this) * cxd(-1.0, 0.0); }
  Element mul(const Element& o) const {
    Element r(alg);
    for (size_t j = 0; j < m.size(); ++j) r.m[j] = m[j] * o.m[j];
    return r;
  }
  Element adjoint() const {
    Element r(alg);
    for (size_t j = 0; j < m.size(); ++j) r.m[j] = m[j].adjoint();
    return r;
  }
  bool is_hermitian(double tol = 1e-9) const {
    for (const Mat& b : m)
      if ((b - b.adjoint()).norm() > tol * std::max(1.0, b.norm())) return false;
    return true;
  }
  // block-diagonal picture inside M_{total_size}
  Mat block_diag() const {
    const int N = alg.total_size();
    Mat out = Mat::Zero(N, N);
    int off = 0;
    for (size_t j = 0; j < m.size(); ++j) {
      const int n = alg.blocks[j];
      out.block(off, off, n, n) = m[j];
      off += n;
    }
    return out;
  }
};

inline Element jordan(const Element& a, const Element& b) {
  return (a.mul(b) + b.mul(a)) * cxd(0.5, 0.0);
}
inline Element lie(const Element& a, const Element& b) {
  return (a.mul(b) - b.mul(a)) * cxd(0.0, -0.5);
}

inline double operator_norm(const Element& a) {
  double v = 0.0;
  for (const Mat& b : a.m) v = std::max(v, op_norm(b));
  return v;
}

// (lambda_min, lambda_max) over all blocks of a hermitian element
inline std::pair<double, double> lambda_extremes(const Element& a) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Mat& b : a.m) {
    const EigH e = eigh(b);
    lo = std::min(lo, e.values(0));
    hi = std::max(hi, e.values(e.values.size() - 1));
  }
  return {lo, hi};
}

inline double spread(const Element& a) {
  auto [lo, hi] = lambda_extremes(a);
  return hi - lo;
}

inline cxd trace(const Element& a) {
  cxd t = 0.0;
  for (const Mat& b : a.m) t += b.trace();
  return t;
}

// ---------------------------------------------------------------------------
// Hermitian coordinates: per block, the diagonal units E_ii, then for i<j the
// pair (E_ij+E_ji)/sqrt2 and (iE_ij-iE_ji)/sqrt2.  Orthonormal for tr(ab), so
// the state/element pairing is the plain euclidean dot product.

inline int coord_dim(const Algebra& a) { return a.dim_sa(); }

inline RVec to_coords(const Element& a) {
  RVec x(coord_dim(a.alg));
  int k = 0;
  const double s2 = std::sqrt(2.0);
  for (int j = 0; j < a.alg.num_blocks(); ++j) {
    const Mat& b = a.m[j];
    const int n = a.alg.blocks[j];
    for (int i = 0; i < n; ++i) x(k++) = b(i, i).real();
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        x(k++) = (b(p, q) + b(q, p)).real() / s2;
        x(k++) = (b(q, p) - b(p, q)).imag() / s2;
      }
  }
  return x;
}

inline Element from_coords(const Algebra& alg, const RVec& x) {
  Element a(alg);
  int k = 0;
  const double s2 = std::sqrt(2.0);
  for (int j = 0; j < alg.num_blocks(); ++j) {
    const int n = alg.blocks[j];
    Mat b = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) b(i, i) = x(k++);
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double re = x(k++) / s2;
        const double im = x(k++) / s2;
        b(p, q) += cxd(re, -im);
        b(q, p) += cxd(re, im);
      }
    a.m[j] = b;
  }
  return a;
}

inline RVec unit_coords(const Algebra& a) { return to_coords(Element::unit(a)); }

// ---------------------------------------------------------------------------
// States: block density matrices summing to trace 1.

struct State {
  Algebra alg;
  std::vector<Mat> rho;  // positive, sum of traces = 1

  State() = default;
  explicit State(const Algebra& a) : alg(a) {
    for (int n : a.blocks) rho.push_back(Mat::Zero(n, n));
  }

  double operator()(const Element& a) const {
    cxd v = 0.0;
    for (size_t j = 0; j < rho.size(); ++j) v += (rho[j] * a.m[j]).trace();
    return v.real();
  }
  Element as_element() const { return Element(alg, rho); }
  RVec coords() const { return to_coords(as_element()); }

  static State tracial(const Algebra& a) {
    State s(a);
    const double N = a.total_size();
    for (int j = 0; j < a.num_blocks(); ++j)
      s.rho[j] = Mat::Identity(a.blocks[j], a.blocks[j]) / N;
    return s;
  }
  // pure state sitting in one block with unit vector v
  static State pure(const Algebra& a, int block, const Vec& v) {
    State s(a);
    s.rho[block] = v * v.adjoint() / v.squaredNorm();
    return s;
  }
  // point evaluation for commutative position (block of size 1)
  static State point(const Algebra& a, int block) {
    State s(a);
    s.rho[block] = Mat::Ones(1, 1);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Linear maps between self-adjoint parts, stored on hermitian coordinates.

struct LinMap {
  Algebra src, dst;
  RMat M;  // coord_dim(dst) x coord_dim(src)

  LinMap() = default;
  LinMap(const Algebra& s, const Algebra& d)
      : src(s), dst(d), M(RMat::Zero(coord_dim(d), coord_dim(s))) {}

  Element apply(const Element& a) const { return from_coords(dst, M * to_coords(a)); }
  RVec apply(const RVec& x) const { return M * x; }

  static LinMap identity(const Algebra& a) {
    LinMap f(a, a);
    f.M = RMat::Identity(coord_dim(a), coord_dim(a));
    return f;
  }
  // build from action on basis elements
  template <typename F>
  static LinMap from_action(const Algebra& s, const Algebra& d, F&& act) {
    LinMap f(s, d);
    for (int k = 0; k < coord_dim(s); ++k) {
      RVec e = RVec::Zero(coord_dim(s));
      e(k) = 1.0;
      f.M.col(k) = to_coords(act(from_coords(s, e)));
    }
    return f;
  }
  LinMap compose(const LinMap& inner) const {  // this o inner
    LinMap f(inner.src, dst);
    f.M = M * inner.M;
    return f;
  }
  bool is_unital(double tol = 1e-9) const {
    return (M * unit_coords(src) - unit_coords(dst)).norm() <= tol;
  }
  // numeric positivity probe on random positive elements
  bool looks_positive(int samples = 64, unsigned seed = 7, double tol = 1e-8) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int t = 0; t < samples; ++t) {
      Element a(src);
      for (int j = 0; j < src.num_blocks(); ++j) {
        const int n = src.blocks[j];
        Mat z(n, n);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) z(p, q) = cxd(g(rng), g(rng));
        a.m[j] = z * z.adjoint();
      }
      const Element b = apply(a);
      if (lambda_extremes(b).first < -tol * std::max(1.0, operator_norm(a)))
        return false;
    }
    return true;
  }
};

// Corner compression a -> P a P restricted to the compressed algebra, where P
// keeps, per block, a prefix of the standard basis (keep[j] in [0, n_j]).
inline Algebra corner_algebra(const Algebra& a, const std::vector<int>& keep) {
  std::vector<int> bl;
  for (size_t j = 0; j < keep.size(); ++j) {
    if (keep[j] < 0 || keep[j] > a.blocks[j])
      throw std::invalid_argument("corner_algebra: bad keep");
    if (keep[j] > 0) bl.push_back(keep[j]);
  }
  return Algebra(bl);
}

inline LinMap compress_map(const Algebra& a, const std::vector<int>& keep) {
  const Algebra c = corner_algebra(a, keep);
  return LinMap::from_action(a, c, [&](const Element& x) {
    Element y(c);
    int out = 0;
    for (int j = 0; j < a.num_blocks(); ++j) {
      if (keep[j] == 0) continue;
      y.m[out++] = x.m[j].topLeftCorner(keep[j], keep[j]);
    }
    return y;
  });
}

// ---------------------------------------------------------------------------
// Unital *-embeddings into a single full matrix algebra M_N: block j of the
// source is repeated mult[j] >= 1 times along the diagonal.

struct UnitalEmbedding {
  Algebra src;
  int N = 0;
  std::vector<int> mult;

  Mat apply(const Element& a) const {
    Mat out = Mat::Zero(N, N);
    int off = 0;
    for (int j = 0; j < src.num_blocks(); ++j)
      for (int c = 0; c < mult[j]; ++c) {
        out.block(off, off, src.blocks[j], src.blocks[j]) = a.m[j];
        off += src.blocks[j];
      }
    return out;
  }
  // as a coordinate map into sa(M_N)
  LinMap as_linmap() const {
    const Algebra full = Algebra::full(N);
    const UnitalEmbedding* self = this;
    return LinMap::from_action(src, full, [self, &full](const Element& x) {
      return Element(full, {self->apply(x)});
    });
  }
};

namespace detail {
// smallest multiplicity vector (lexicographic, all >= 1) with sum m_j n_j = N
inline bool mults_for(const std::vector<int>& blocks, int N, std::vector<int>& out) {
  const int k = static_cast<int>(blocks.size());
  out.assign(k, 1);
  int base = 0;
  for (int n : blocks) base += n;
  if (base > N) return false;
  int rest = N - base;
  // distribute the remainder greedily from the front; any representation of
  // `rest` by the block sizes works, prefer loading the first block
  std::vector<int> coins(blocks.begin(), blocks.end());
  // DP reachability
  std::vector<int> reach(rest + 1, -1);
  reach[0] = 0;
  for (int v = 1; v <= rest; ++v)
    for (int j = 0; j < k; ++j)
      if (v >= coins[j] && reach[v - coins[j]] >= 0) {
        reach[v] = j;
        break;
      }
  if (reach[rest] < 0) return false;
  int v = rest;
  while (v > 0) {
    out[reach[v]] += 1;
    v -= coins[reach[v]];
  }
  return true;
}
}  // namespace detail

// Canonical common unital embeddings of A and B into one M_N with N minimal.
inline std::pair<UnitalEmbedding, UnitalEmbedding> common_unital_embedding(
    const Algebra& A, const Algebra& B) {
  const int start = std::max(A.total_size(), B.total_size());
  for (int N = start; N <= 64 * start; ++N) {
    std::vector<int> ma, mb;
    if (detail::mults_for(A.blocks, N, ma) && detail::mults_for(B.blocks, N, mb))
      return {UnitalEmbedding{A, N, ma}, UnitalEmbedding{B, N, mb}};
  }
  throw std::runtime_error("common_unital_embedding: no common N found");
}

// Direct sum A (+) B with coordinate projections.
struct DirectSum {
  Algebra sum;
  LinMap p1, p2;    // projections sum -> A, sum -> B
  LinMap i1, i2;    // inclusions (zero on the other summand)
};

inline DirectSum direct_sum(const Algebra& A, const Algebra& B) {
  std::vector<int> bl = A.blocks;
  bl.insert(bl.end(), B.blocks.begin(), B.blocks.end());
  DirectSum ds;
  ds.sum = Algebra(bl);
  const int da = coord_dim(A), db = coord_dim(B);
  ds.p1 = LinMap(ds.sum, A);
  ds.p2 = LinMap(ds.sum, B);
  ds.i1 = LinMap(A, ds.sum);
  ds.i2 = LinMap(B, ds.sum);
  // coordinates of the sum are the concatenation (block order is preserved
  // and the hermitian basis is per-block)
  ds.p1.M.leftCols(da) = RMat::Identity(da, da);
  ds.p2.M.rightCols(db) = RMat::Identity(db, db);
  ds.i1.M.topRows(da) = RMat::Identity(da, da);
  ds.i2.M.bottomRows(db) = RMat::Identity(db, db);
  return ds;
}

inline Element pair_element(const DirectSum& ds, const Element& a, const Element& b) {
  std::vector<Mat> mm = a.m;
  mm.insert(mm.end(), b.m.begin(), b.m.end());
  return Element(ds.sum, mm);
}

}  // namespace qmet
