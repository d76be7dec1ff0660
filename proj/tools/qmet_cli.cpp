// qmet: command-line front end for the quantum-metric library.
//
// Commands: mkdist, diameter, qleibniz, tunnel {build|extent|compose},
// propinquity, gh, compactness, approx, selftest.
// Exit codes: 0 success, 2 input error, 3 invalid mathematical object,
// 4 precondition failure, 5 internal gap not closed.

#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "qmet/io.hpp"

namespace qmet {
namespace {

struct RunConfig {
  double tol = 1e-8;
  unsigned seed = 12345;
  int workers = 1;
  std::string format = "json";
  std::vector<std::string> strategies;
  std::vector<double> eps_list;
  double eps = 1e-3;
  std::string kind = "standard";
  std::vector<std::string> pivots;
  int probes = 128;
};

Json header(const char* command, const RunConfig& cfg) {
  return Json{{"command", command}, {"seed", cfg.seed}, {"tol", cfg.tol}};
}

void emit(const Json& j, const RunConfig& cfg) {
  emit_report(j, cfg.format, std::cout);
}

DCOptions dc_options(const RunConfig& cfg) {
  DCOptions o;
  o.tol = std::max(cfg.tol, 1e-4);
  o.seed = cfg.seed;
  return o;
}

Json ql_json(const QLReport& r) {
  return Json{{"pass", r.pass},
              {"worst_margin", r.worst_margin},
              {"worst_kind", r.worst_kind},
              {"witness_a", element_json(r.witness_a)},
              {"witness_b", element_json(r.witness_b)}};
}

// ---------------------------------------------------------------------------
// mkdist / diameter / qleibniz / gh

int cmd_mkdist(const RunConfig& cfg, const std::string& lpath,
               const std::string& apath, const std::string& bpath) {
  const LipNorm L = parse_lipnorm(load_json_file(lpath));
  const State a = parse_state(L.alg, load_json_file(apath));
  const State b = parse_state(L.alg, load_json_file(bpath));
  const Bracket v = mk_distance(L, a, b, cfg.tol);
  Json out = header("mkdist", cfg);
  out["value"] = bracket_json(v);
  emit(out, cfg);
  return 0;
}

int cmd_diameter(const RunConfig& cfg, const std::string& lpath) {
  const LipNorm L = parse_lipnorm(load_json_file(lpath));
  const Bracket v = diameter(L, dc_options(cfg));
  Json out = header("diameter", cfg);
  out["value"] = bracket_json(v);
  emit(out, cfg);
  return v.converged ? 0 : 5;
}

int cmd_qleibniz(const RunConfig& cfg, const std::string& lpath) {
  const LipNorm L = parse_lipnorm(load_json_file(lpath));
  if (!L.vrep())
    throw CliError{2, "qleibniz: generator criterion needs a vrep ball"};
  const QLReport r = quasi_leibniz_check(L, L.F, cfg.probes, cfg.seed, 1e-9);
  Json out = header("qleibniz", cfg);
  out["constants"] = Json{{"C", L.F.C}, {"D", L.F.D}};
  out["report"] = ql_json(r);
  emit(out, cfg);
  return 0;
}

int cmd_gh(const RunConfig& cfg, const std::string& xpath,
           const std::string& ypath) {
  const MetricSpace X = parse_metric(load_json_file(xpath));
  const MetricSpace Y = parse_metric(load_json_file(ypath));
  const GHResult r = gh_distance(X, Y);
  Json out = header("gh", cfg);
  out["value"] = r.value;
  out["exact"] = r.exact;
  Json w = Json::array();
  for (const auto& [i, j] : r.witness) w.push_back(Json::array({i, j}));
  out["witness"] = w;
  emit(out, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// tunnels: build / extent / compose over a rebuildable JSON export

Json tunnel_export(const std::string& kind, double eps, const LipNorm& LA,
                   const LipNorm& LB) {
  return Json{{"kind", kind},
              {"eps", eps},
              {"factorA", lipnorm_json(LA)},
              {"factorB", lipnorm_json(LB)}};
}

Tunnel rebuild_tunnel(const Json& j);

Tunnel rebuild_tunnel(const Json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "composed") {
    const Tunnel t1 = rebuild_tunnel(need(j, "t1"));
    const Tunnel t2 = rebuild_tunnel(need(j, "t2"));
    return compose_tunnels(t1, t2, need(j, "eps").get<double>(),
                           need(j, "ext1_ub").get<double>(),
                           need(j, "ext2_ub").get<double>());
  }
  const LipNorm LA = parse_lipnorm(need(j, "factorA"));
  const LipNorm LB = parse_lipnorm(need(j, "factorB"));
  const double eps = need(j, "eps").get<double>();
  if (kind == "standard") return standard_tunnel(LA, LB, eps);
  if (kind == "mismatch") return mismatch_tunnel(LA, LB, eps);
  throw CliError{2, "tunnel kind must be standard, mismatch or composed"};
}

Json invariants_json(const TunnelInvariants& inv) {
  return Json{{"reach", bracket_json(inv.reach)},
              {"depth", bracket_json(inv.depth)},
              {"extent", bracket_json(inv.extent)},
              {"length", bracket_json(inv.length)}};
}

int cmd_tunnel_build(const RunConfig& cfg, const std::string& apath,
                     const std::string& bpath) {
  const LipNorm LA = parse_lipnorm(load_json_file(apath));
  const LipNorm LB = parse_lipnorm(load_json_file(bpath));
  Tunnel t;
  try {
    if (cfg.kind == "standard")
      t = standard_tunnel(LA, LB, cfg.eps);
    else if (cfg.kind == "mismatch")
      t = mismatch_tunnel(LA, LB, cfg.eps);
    else
      throw CliError{2, "tunnel build: kind must be standard or mismatch"};
  } catch (const std::invalid_argument& e) {
    throw CliError{4, e.what()};
  }
  Json out = header("tunnel build", cfg);
  out["tunnel"] = tunnel_export(cfg.kind, cfg.eps, LA, LB);
  out["analytic_reach_ub"] = t.analytic_reach_ub;
  out["analytic_extent_ub"] = t.analytic_extent_ub;
  out["quotient_defect"] = verify_quotient(t);
  emit(out, cfg);
  return 0;
}

int cmd_tunnel_extent(const RunConfig& cfg, const std::string& tpath) {
  const Json tj = load_json_file(tpath);
  const Json& body = tj.contains("tunnel") ? tj.at("tunnel") : tj;
  Tunnel t;
  try {
    t = rebuild_tunnel(body);
  } catch (const std::invalid_argument& e) {
    throw CliError{4, e.what()};
  }
  const TunnelInvariants inv = tunnel_invariants(t, dc_options(cfg));
  Json out = header("tunnel extent", cfg);
  out["kind"] = t.kind;
  out["invariants"] = invariants_json(inv);
  emit(out, cfg);
  const bool ok = inv.reach.converged && inv.depth.converged &&
                  inv.extent.converged && inv.length.converged;
  return ok ? 0 : 5;
}

int cmd_tunnel_compose(const RunConfig& cfg, const std::string& p1,
                       const std::string& p2) {
  const Json j1 = load_json_file(p1), j2 = load_json_file(p2);
  const Json& b1 = j1.contains("tunnel") ? j1.at("tunnel") : j1;
  const Json& b2 = j2.contains("tunnel") ? j2.at("tunnel") : j2;
  Tunnel t1, t2;
  try {
    t1 = rebuild_tunnel(b1);
    t2 = rebuild_tunnel(b2);
  } catch (const std::invalid_argument& e) {
    throw CliError{4, e.what()};
  }
  if (!(t1.LB.alg == t2.LA.alg))
    throw CliError{4, "tunnel compose: middle factors live on different algebras"};
  const DCOptions dco = dc_options(cfg);
  const double e1 = std::isfinite(t1.analytic_extent_ub)
                        ? t1.analytic_extent_ub
                        : tunnel_extent(t1, dco).ub;
  const double e2 = std::isfinite(t2.analytic_extent_ub)
                        ? t2.analytic_extent_ub
                        : tunnel_extent(t2, dco).ub;
  Tunnel t;
  try {
    t = compose_tunnels(t1, t2, cfg.eps, e1, e2);
  } catch (const std::invalid_argument& e) {
    throw CliError{4, e.what()};
  }
  Json out = header("tunnel compose", cfg);
  out["tunnel"] = Json{{"kind", "composed"}, {"eps", cfg.eps},
                       {"ext1_ub", e1},     {"ext2_ub", e2},
                       {"t1", b1},          {"t2", b2}};
  out["extent_bound"] = Json::array({0.0, t.analytic_extent_ub});
  out["quotient_defect"] = verify_quotient(t);
  emit(out, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// propinquity / compactness

int cmd_propinquity(const RunConfig& cfg, const std::string& apath,
                    const std::string& bpath) {
  const LipNorm LA = parse_lipnorm(load_json_file(apath));
  const LipNorm LB = parse_lipnorm(load_json_file(bpath));
  std::set<std::string> strat(cfg.strategies.begin(), cfg.strategies.end());
  if (strat.empty()) strat = {"standard", "identity", "correspondence"};
  for (const std::string& s : strat)
    if (s != "standard" && s != "identity" && s != "correspondence" &&
        s != "bridge")
      throw CliError{2, "unknown strategy " + s};
  PropinquityOptions opts;
  if (!cfg.eps_list.empty()) opts.std_eps = cfg.eps_list;
  for (const std::string& p : cfg.pivots) {
    const auto [ea, eb] = common_unital_embedding(LA.alg, LB.alg);
    const Algebra full = Algebra::full(ea.N);
    opts.pivots.push_back(
        parse_element(full, load_json_file(p)).m[0]);
  }
  const PropinquityBound b =
      propinquity_upper(LA, LB, strat, opts, apath, bpath);
  Json out = header("propinquity", cfg);
  out["pair"] = Json::array({b.labelA, b.labelB});
  out["upper"] = b.upper;
  out["witness_kind"] = b.witness_kind;
  Json stages = Json::array();
  for (const TunnelStage& s : b.stages)
    stages.push_back(Json{{"kind", s.kind},
                          {"extent_lb", s.extent.lb},
                          {"extent_ub", s.extent.ub}});
  out["stages"] = stages;
  emit(out, cfg);
  return std::isfinite(b.upper) ? 0 : 5;
}

int cmd_compactness(const RunConfig& cfg, const std::string& path) {
  const Json j = load_json_file(path);
  Json out = header("compactness", cfg);
  if (j.contains("family")) {
    const Json& fj = j.at("family");
    SpaceFamily fam;
    for (const auto& sj : need(fj, "spaces"))
      fam.spaces.push_back(parse_lipnorm(sj));
    if (fj.contains("labels"))
      for (const auto& l : fj.at("labels"))
        fam.labels.push_back(l.get<std::string>());
    const NetResult r = total_boundedness_check(fam, cfg.eps);
    out["mode"] = "family";
    out["eps"] = cfg.eps;
    out["net"] = r.net;
    Json bm = Json::array();
    for (int i = 0; i < r.bounds.rows(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < r.bounds.cols(); ++k) row.push_back(r.bounds(i, k));
      bm.push_back(row);
    }
    out["bounds"] = bm;
    out["certified"] = r.certified;
    emit(out, cfg);
    return r.certified ? 0 : 4;
  }
  if (j.contains("sequence")) {
    std::vector<LipNorm> seq;
    for (const auto& sj : j.at("sequence")) seq.push_back(parse_lipnorm(sj));
    const SequenceLimit r = sequence_limit(seq, cfg.eps);
    out["mode"] = "sequence";
    out["tol"] = cfg.eps;
    out["converged"] = r.converged;
    out["status"] = r.status;
    out["members"] = r.members;
    out["tail_start"] = r.tail_start;
    if (r.converged) {
      out["tail_haus"] = r.tail_haus;
      out["uppers"] = r.uppers;
      out["ql"] = ql_json(r.ql);
      out["limit"] = lipnorm_json(r.limit);
    }
    emit(out, cfg);
    return r.converged ? 0 : 4;
  }
  throw CliError{2, "compactness: need a \"family\" or \"sequence\" key"};
}

// ---------------------------------------------------------------------------
// approx: the approximation pipeline end-to-end, emitting a certificate with
// every verified inequality and its margin.

int cmd_approx(const RunConfig& cfg, const std::string& path) {
  const Json j = load_json_file(path);
  const LipNorm LA = parse_lipnorm(need(j, "lipnorm"));
  const Algebra& A = LA.alg;
  if (j.contains("algebra") && !(parse_algebra(j.at("algebra")) == A))
    throw CliError{2, "approx: algebra key disagrees with the Lip-norm"};
  const double eps = need(j, "epsilon").get<double>();
  if (eps <= 0 || eps >= 1) throw CliError{2, "approx: need 0 < epsilon < 1"};
  const State mu =
      j.contains("mu") ? parse_state(A, j.at("mu")) : State::tracial(A);
  CompressionSpec spec;
  std::vector<std::vector<int>> parts;  // "blocks" mode: sub-block partition
  const Json& cj = need(j, "compression");
  const std::string ctype = need(cj, "type").get<std::string>();
  if (ctype == "corner") {
    for (const auto& k : need(cj, "keep")) spec.keep.push_back(k.get<int>());
  } else if (ctype == "blocks") {
    const Json& sj = need(cj, "sizes");
    if (static_cast<int>(sj.size()) != A.num_blocks())
      throw CliError{2, "approx: sizes needs one partition per block"};
    for (int b = 0; b < A.num_blocks(); ++b) {
      std::vector<int> p;
      int tot = 0;
      for (const auto& s : sj.at(b)) {
        p.push_back(s.get<int>());
        tot += p.back();
      }
      if (tot != A.blocks[b])
        throw CliError{2, "approx: partition does not sum to the block size"};
      parts.push_back(p);
    }
  } else if (ctype != "identity") {
    throw CliError{2, "approx: compression type must be identity, corner or blocks"};
  }

  // dense subset of the mu-section (desk-scale density floor 0.25; the
  // achieved covering radius is part of the certificate)
  const double delta = std::max(eps * eps, 0.25);
  const DenseSubset ds = dense_subset_of_ball(LA, mu, delta, cfg.seed);
  std::vector<Element> F;
  for (const RVec& p : ds.pts) F.push_back(from_coords(A, p));
  F.push_back(Element::unit(A));

  const double budget = eps * eps;
  PseudoDiagonalWitness w;
  try {
    if (ctype == "blocks") {
      // block-diagonal pinching A -> (+) sub-blocks and its embedding back
      std::vector<int> flat;
      for (const auto& p : parts) flat.insert(flat.end(), p.begin(), p.end());
      const Algebra B(flat);
      w.eps = budget;
      w.psi = LinMap::from_action(A, B, [&](const Element& a) {
        Element y(B);
        int out = 0;
        for (int b = 0; b < A.num_blocks(); ++b) {
          int off = 0;
          for (int s : parts[b]) {
            y.m[out++] = a.m[b].block(off, off, s, s);
            off += s;
          }
        }
        return y;
      });
      w.phi = LinMap::from_action(B, A, [&](const Element& y) {
        Element a(A);
        int in = 0;
        for (int b = 0; b < A.num_blocks(); ++b) {
          int off = 0;
          for (int s : parts[b]) {
            a.m[b].block(off, off, s, s) = y.m[in++];
            off += s;
          }
        }
        return a;
      });
      apxdetail::record_deviations(w, F);
    } else {
      w = pseudo_diagonal_witness(A, F, budget, spec);
    }
  } catch (const std::invalid_argument& e) {
    throw CliError{2, e.what()};
  }
  const ApproxLipNorm alb = approx_lipnorm(LA, w.psi, eps, F);

  Json cert = header("approx", cfg);
  cert["epsilon"] = eps;
  cert["dense_subset"] = Json{{"size", static_cast<int>(F.size())},
                              {"delta", delta},
                              {"covering_radius", ds.covering_radius},
                              {"certified", ds.certified}};
  cert["witness"] = Json{{"budget_eps2", budget},
                         {"roundtrip", w.roundtrip},
                         {"jordan_dev", w.jordan_dev},
                         {"lie_dev", w.lie_dev},
                         {"pass", w.pass}};
  cert["constants"] = Json{{"C", alb.constants.C}, {"D", alb.constants.D}};
  cert["inflation"] = alb.inflation;
  cert["quasi_leibniz"] = ql_json(alb.certificate);
  cert["precondition_ok"] = alb.precondition_ok;
  if (!alb.precondition_ok) {
    cert["message"] = alb.message;
    emit(cert, cfg);
    return 4;
  }
  DCOptions dco = dc_options(cfg);
  dco.coarse_n = 32;
  dco.fine_cap = 256;
  const ApproxTunnelResult tr = approx_tunnel(LA, alb, w.psi, eps, dco);
  const double bound = eps + 3.0 * eps * eps;
  cert["tunnel"] = Json{{"length", bracket_json(tr.inv.length)},
                        {"extent", bracket_json(tr.inv.extent)},
                        {"depth", bracket_json(tr.inv.depth)},
                        {"quotient_defect", tr.quotient_defect},
                        {"length_bound", bound},
                        {"length_bound_satisfied",
                         tr.inv.length.ub <= bound + cfg.tol}};
  if (tr.quotient_defect > 1e-5) {
    cert["message"] = "quotient lift failed: F not dense enough";
    emit(cert, cfg);
    return 4;
  }
  emit(cert, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// selftest: oracle comparisons and invariant checks

int cmd_selftest(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Json checks = Json::array();
  bool all = true;
  auto record = [&](const char* name, bool pass, double detail) {
    checks.push_back(Json{{"name", name}, {"pass", pass}, {"detail", detail}});
    all = all && pass;
  };
  auto rnd_metric = [&](int n) {
    RMat pts(2, n);
    for (int i = 0; i < 2 * n; ++i) pts(i % 2, i / 2) = 2.0 * uni(rng);
    MetricSpace X;
    X.d = RMat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      X.labels.push_back("p" + std::to_string(i));
      for (int k = 0; k < n; ++k)
        X.d(i, k) = (pts.col(i) - pts.col(k)).norm() + (i == k ? 0.0 : 0.05);
    }
    return X;
  };

  // 1. Monge-Kantorovich recovery of the metric between Dirac states
  {
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
      const MetricSpace X = rnd_metric(4);
      const LipNorm L = lip_from_metric(X);
      for (int i = 0; i < X.n(); ++i)
        for (int k = i + 1; k < X.n(); ++k) {
          const Bracket v =
              mk_distance(L, State::point(L.alg, i), State::point(L.alg, k));
          worst = std::max(worst, std::abs(v.ub - X.d(i, k)));
        }
    }
    record("mk_recovers_metric", worst <= 1e-8, worst);
  }
  // 2. GH pruned search vs exhaustive correspondence enumeration (3x3)
  {
    double worst = 0.0;
    for (int t = 0; t < 2; ++t) {
      const MetricSpace X = rnd_metric(3), Y = rnd_metric(3);
      double best = kInf;
      for (uint32_t m = 1; m < (1u << 9); ++m) {
        uint32_t px = 0, py = 0;
        double dis = 0.0;
        std::vector<std::pair<int, int>> R;
        for (int b = 0; b < 9; ++b)
          if (m & (1u << b)) {
            px |= 1u << (b / 3);
            py |= 1u << (b % 3);
            R.push_back({b / 3, b % 3});
          }
        if (px != 7u || py != 7u) continue;
        for (const auto& [i, jx] : R)
          for (const auto& [i2, j2] : R)
            dis = std::max(dis, std::abs(X.d(i, i2) - Y.d(jx, j2)));
        best = std::min(best, 0.5 * dis);
      }
      worst = std::max(worst, std::abs(gh_distance(X, Y).value - best));
    }
    record("gh_matches_enumeration", worst <= 1e-12, worst);
  }
  // 3. DC extent bracket vs a direction-grid oracle on a standard tunnel
  {
    const MetricSpace X = rnd_metric(2), Y = rnd_metric(2);
    const LipNorm LA = lip_from_metric(X), LB = lip_from_metric(Y);
    const double eps = 0.05;
    const Tunnel t = standard_tunnel(LA, LB, eps);
    Tunnel traw = t;
    traw.analytic_reach_ub = kInf;
    traw.analytic_extent_ub = kInf;
    const TunnelInvariants inv = tunnel_invariants(traw, dc_options(cfg));
    double oracle = 0.0;
    std::normal_distribution<double> gauss;
    for (int s = 0; s < 20000; ++s) {
      RVec d(4);
      for (int i = 0; i < 4; ++i) d(i) = gauss(rng);
      const GaugeVal g = t.LD.ball->gauge(d);
      if (!g.finite || g.v <= 1e-12) continue;
      d /= g.v;
      oracle = std::max(oracle, std::abs(std::max(d(0), d(1)) -
                                         std::max(d(2), d(3))));
    }
    const bool ok = inv.extent.lb <= oracle + 0.02 * (X.diam() + Y.diam()) &&
                    oracle <= inv.extent.ub + 1e-9;
    record("dc_bracket_contains_grid_oracle", ok, oracle);
  }
  // 4. VRep gauge vs LP gauge through the MaxBall wrapper
  {
    const MetricSpace X = rnd_metric(3);
    const LipNorm L = lip_from_metric(X);
    const VRepBall* v = L.vrep();
    double worst = 0.0;
    std::vector<MaxBall::Term> terms;
    terms.push_back({RMat::Identity(3, 3), L.ball});
    const MaxBall wrapped(3, std::move(terms));
    for (int k = 0; k < v->G.cols(); ++k) {
      const GaugeVal g = wrapped.gauge(v->G.col(k));
      worst = std::max(worst, std::abs(g.v - 1.0));
    }
    record("vrep_gauge_matches_lp", worst <= 1e-7, worst);
  }
  // 5. MK metric axioms on random states
  {
    const MetricSpace X = rnd_metric(4);
    const LipNorm L = lip_from_metric(X);
    const State a = State::point(L.alg, 0), b = State::point(L.alg, 1),
                c = State::point(L.alg, 2);
    const double ab = mk_distance(L, a, b).ub, ba = mk_distance(L, b, a).ub;
    const double ac = mk_distance(L, a, c).ub, cb = mk_distance(L, c, b).ub;
    const double aa = mk_distance(L, a, a).ub;
    const bool ok = std::abs(ab - ba) <= 1e-12 && aa <= 1e-12 &&
                    ab <= ac + cb + 1e-9;
    record("mk_metric_axioms", ok, ab - ac - cb);
  }

  Json out = header("selftest", cfg);
  out["pass"] = all;
  out["checks"] = checks;
  emit(out, cfg);
  return all ? 0 : 5;
}

}  // namespace
}  // namespace qmet

int main(int argc, char** argv) {
  using namespace qmet;
  RunConfig cfg;
  CLI::App app{"metric invariants of finite-dimensional quantum compact "
               "metric spaces"};
  app.require_subcommand(1);
  app.add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--workers", cfg.workers, "worker count")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "json | csv | table");

  std::string p1, p2, p3;
  auto* mk = app.add_subcommand("mkdist", "Monge-Kantorovich distance");
  mk->add_option("lipnorm", p1)->required();
  mk->add_option("stateA", p2)->required();
  mk->add_option("stateB", p3)->required();

  auto* di = app.add_subcommand("diameter", "state-space diameter");
  di->add_option("lipnorm", p1)->required();

  auto* ql = app.add_subcommand("qleibniz", "quasi-Leibniz generator check");
  ql->add_option("lipnorm", p1)->required();
  ql->add_option("--probes", cfg.probes, "random probe pairs");

  auto* gh = app.add_subcommand("gh", "Gromov-Hausdorff distance");
  gh->add_option("metricX", p1)->required();
  gh->add_option("metricY", p2)->required();

  auto* tu = app.add_subcommand("tunnel", "tunnel operations");
  tu->require_subcommand(1);
  auto* tb = tu->add_subcommand("build", "build and export a tunnel");
  tb->add_option("factorA", p1)->required();
  tb->add_option("factorB", p2)->required();
  tb->add_option("--eps", cfg.eps, "mismatch allowance");
  tb->add_option("--kind", cfg.kind, "standard | mismatch");
  auto* te = tu->add_subcommand("extent", "invariants of an exported tunnel");
  te->add_option("tunnel", p1)->required();
  auto* tc = tu->add_subcommand("compose", "compose two exported tunnels");
  tc->add_option("tunnel1", p1)->required();
  tc->add_option("tunnel2", p2)->required();
  tc->add_option("--eps", cfg.eps, "gluing allowance");

  auto* pr = app.add_subcommand("propinquity", "propinquity upper bound");
  pr->add_option("spaceA", p1)->required();
  pr->add_option("spaceB", p2)->required();
  pr->add_option("--strategy", cfg.strategies,
                 "standard | identity | correspondence | bridge");
  pr->add_option("--eps", cfg.eps_list, "standard-tunnel allowances");
  pr->add_option("--pivot", cfg.pivots, "bridge pivot element files");

  auto* co = app.add_subcommand("compactness", "net or sequence limit");
  co->add_option("input", p1)->required();
  co->add_option("--eps", cfg.eps, "net radius / sequence tolerance");

  auto* ap = app.add_subcommand("approx", "approximation pipeline");
  ap->add_option("config", p1)->required();

  auto* st = app.add_subcommand("selftest", "oracle and invariant suite");

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (mk->parsed()) return cmd_mkdist(cfg, p1, p2, p3);
    if (di->parsed()) return cmd_diameter(cfg, p1);
    if (ql->parsed()) return cmd_qleibniz(cfg, p1);
    if (gh->parsed()) return cmd_gh(cfg, p1, p2);
    if (tu->parsed()) {
      if (tb->parsed()) return cmd_tunnel_build(cfg, p1, p2);
      if (te->parsed()) return cmd_tunnel_extent(cfg, p1);
      if (tc->parsed()) return cmd_tunnel_compose(cfg, p1, p2);
    }
    if (pr->parsed()) return cmd_propinquity(cfg, p1, p2);
    if (co->parsed()) return cmd_compactness(cfg, p1);
    if (ap->parsed()) return cmd_approx(cfg, p1);
    if (st->parsed()) return cmd_selftest(cfg);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 2;
}
