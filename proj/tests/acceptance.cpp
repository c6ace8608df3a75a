#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "rdarp/bcp.hpp"

using namespace rdarp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool data_missing = false;
};

int failures = 0, missing = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) (o.data_missing ? missing : failures)++;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Instance random_instance(std::uint64_t seed, int n, int fleet) {
  RandomSpec spec;
  spec.n = n;
  spec.fleet = fleet;
  spec.capacity = 3;
  spec.horizon = 90;
  spec.window = 25;
  spec.half_width = 8;
  spec.max_ride = 20;
  return generate_random(spec, seed);
}

ArcFlows flows_of(const std::vector<Route>& routes) {
  ArcFlows x;
  for (const auto& r : routes)
    for (std::size_t k = 0; k + 1 < r.seq.size(); ++k) x[{r.seq[k], r.seq[k + 1]}] += 1.0;
  return x;
}

bool holds(const ArcRow& r, const ArcFlows& x) {
  const double a = row_activity(r, x);
  return r.sense == Sense::LE ? a <= r.rhs + 1e-9 : a >= r.rhs - 1e-9;
}

// ---------------------------------------------------------------- benchmarks

fs::path bench_dir() {
  const char* env = std::getenv("RDARP_BENCH_DIR");
  return env ? fs::path(env) : fs::path(RDARP_SOURCE_DIR) / "data" / "cordeau";
}

std::optional<fs::path> find_bench(const std::string& name) {
  for (const char* ext : {"", ".txt", ".dat"}) {
    fs::path p = bench_dir() / (name + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

Instance load_bench(const fs::path& p) {
  Instance inst = derive_benchmark_risk(load_instance(p.string()));
  inst.q_max = compute_qmax(inst);
  return preprocess(inst);
}

struct BenchRow {
  const char* name;
  double cost[3], risk[3];  // DARP, cap 30, cap 15
};

Outcome criterion_benchmarks() {
  const BenchRow rows[] = {{"a2-16", {294.25, 294.25, 318.63}, {19.00, 19.00, 13.13}},
                           {"a2-20", {344.83, 344.83, 380.12}, {15.33, 15.33, 12.69}},
                           {"a2-24", {431.12, 441.06, 441.57}, {36.57, 17.75, 13.72}},
                           {"a3-24", {344.83, 344.83, 353.09}, {20.01, 20.01, 14.74}}};
  Outcome o;
  std::string absent;
  for (const auto& r : rows)
    if (!find_bench(r.name)) absent += std::string(absent.empty() ? "" : ", ") + r.name;
  if (!absent.empty()) {
    o.data_missing = true;
    o.detail = "benchmark files not found in " + bench_dir().string() + " (" + absent + ")";
    return o;
  }
  const double caps[3] = {kInf, 30.0, 15.0};
  int good = 0, total = 0;
  std::string bad;
  for (const auto& r : rows) {
    const Instance inst = load_bench(*find_bench(r.name));
    for (int c = 0; c < 3; ++c) {
      ++total;
      const double t0 = now_seconds();
      SolveOptions so;
      so.eps_risk = caps[c];
      so.time_limit = 120;
      const SolveReport cost = solve(inst, so);
      SolveOptions ro;
      ro.objective = Objective::Risk;
      ro.eps_cost = cost.objective + 1e-6;
      ro.time_limit = std::max(1.0, 120 - (now_seconds() - t0));
      const SolveReport risk = solve(inst, ro);
      const double elapsed = now_seconds() - t0;
      const bool ok = cost.status == SolveStatus::Optimal && risk.status == SolveStatus::Optimal &&
                      std::abs(cost.objective - r.cost[c]) <= 0.02 && std::abs(risk.objective - r.risk[c]) <= 0.02 &&
                      elapsed <= 120;
      if (ok) ++good;
      else
        bad += std::string(" ") + r.name + fmt("@%g: (%.2f, %.2f, %.0fs)", caps[c], cost.objective, risk.objective, elapsed);
    }
  }
  o.pass = good == total;
  o.detail = fmt("%.0f/%.0f table entries reproduced", good, total) + bad;
  return o;
}

Outcome criterion_infeasible_root() {
  Outcome o;
  const auto p = find_bench("a3-30");
  if (!p) {
    o.data_missing = true;
    o.detail = "benchmark file a3-30 not found in " + bench_dir().string();
    return o;
  }
  const double t0 = now_seconds();
  SolveOptions so;
  so.eps_risk = 15;
  so.time_limit = 300;
  SolveReport rep;
  try {
    rep = solve(load_bench(*p), so);
  } catch (const InfeasibleRequest&) {
    rep.status = SolveStatus::Infeasible;
    rep.nodes = 0;
  }
  const double elapsed = now_seconds() - t0;
  o.pass = rep.status == SolveStatus::Infeasible && rep.nodes <= 1 && elapsed <= 300;
  o.detail = std::string("status ") + to_string(rep.status) + fmt(", %.0f nodes, %.1f s", rep.nodes, elapsed);
  return o;
}

// ---------------------------------------------------------------- oracle equivalence and column soundness

struct OracleRun {
  int compared = 0, matched = 0;
  double seconds = 0;
  std::size_t validated = 0, invalid = 0, mmr_checked = 0, mmr_mismatch = 0;
  double worst_gap = 0;
  std::string first_mismatch;
};

OracleRun run_oracle_equivalence() {
  OracleRun out;
  const double t0 = now_seconds();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const int fleet = 1 + static_cast<int>((seed / 3) % 2);
    const Instance raw = random_instance(seed, n, fleet);
    struct Regime {
      Instance inst;
      Objective obj;
      double eps;
      const char* name;
    };
    std::vector<Regime> regimes;
    const auto darp = brute_force_solve(raw, {});
    regimes.push_back({raw, Objective::Cost, kInf, "cost"});
    regimes.push_back({raw, Objective::Cost, darp.feasible ? 0.7 * darp.measure : 0.0, "cost-tight"});
    regimes.push_back({raw, Objective::Risk, kInf, "risk"});
    const Instance eq = edarp_transform(raw);
    regimes.push_back({eq, Objective::Cost, 2.0, "edarp-2"});
    regimes.push_back({eq, Objective::Cost, 4.0, "edarp-4"});
    for (const auto& r : regimes) {
      BruteOptions bo;
      bo.objective = r.obj;
      bo.eps_risk = r.eps;
      const auto bf = brute_force_solve(r.inst, bo);
      SolveOptions so;
      so.objective = r.obj;
      so.eps_risk = r.eps;
      so.audit = true;
      SolveReport rep;
      try {
        rep = solve(preprocess(r.inst), so);
      } catch (const InfeasibleRequest&) {
        rep.status = SolveStatus::Infeasible;
      }
      ++out.compared;
      bool ok;
      if (!bf.feasible) ok = rep.status == SolveStatus::Infeasible;
      else ok = rep.status == SolveStatus::Optimal && std::abs(rep.objective - bf.value) <= 1e-5;
      if (ok) ++out.matched;
      else if (out.first_mismatch.empty())
        out.first_mismatch = std::string(" first mismatch: seed ") + std::to_string(seed) + " " + r.name +
                             fmt(" bcp %.6f brute %.6f", rep.objective, bf.feasible ? bf.value : -1);
      out.validated += rep.audit.validated;
      out.invalid += rep.audit.invalid;
      out.mmr_checked += rep.audit.mmr_checked;
      out.mmr_mismatch += rep.audit.mmr_mismatch;
      out.worst_gap = std::max(out.worst_gap, rep.audit.worst_mmr_gap);
    }
  }
  out.seconds = now_seconds() - t0;
  return out;
}

// ---------------------------------------------------------------- label walkthrough and worked example

Outcome criterion_walkthrough() {
  Outcome o;
  std::string why;
  {
    Instance inst = fixtures::interlaced(60);
    PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
    const auto ext = replay_path(ctx, {0, 1, 2, 4, 3, 5});
    using V = std::vector<double>;
    const V A{10, 20, 30, 40, 60}, B{20, 60, 40, 50, 70};
    const std::vector<V> Bos{{20}, {30, 60}, {40}, {50, 50}, {60}};
    const std::vector<V> DBs{{40}, {40, 100}, {70}, {70, 90}, {90}};
    const std::vector<V> ds{{10}, {10, 40}, {10, 10}, {10, 10, 10}};
    if (ext.size() != 5) why += " path rejected;";
    for (std::size_t k = 0; k < ext.size() && k < 5; ++k) {
      const Label& l = ext[k].label;
      V bo, db, d;
      for (const auto& x : l.O) bo.push_back(x.Bo), db.push_back(x.DB), d.push_back(x.d);
      for (const auto& x : l.Oa) d.push_back(x.d);
      if (!ext[k].ok() || l.A != A[k] || l.B != B[k] || bo != Bos[k] || db != DBs[k] || (k < 4 && d != ds[k]))
        why += " row " + std::to_string(k + 1) + " differs;";
      if (k == 4 && (d.size() != 3 || d[1] != std::min(d[0], 10.0) || d[2] != std::min(d[0], 10.0)))
        why += " final buffers differ;";
    }
  }
  std::string shifts;
  for (auto [a, expect] : {std::pair{60.0, 10.0}, std::pair{65.0, 15.0}}) {
    Instance inst = fixtures::interlaced(a);
    PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
    const auto ext = replay_path(ctx, {0, 1, 2, 4, 3});
    const Label& at = ext.back().label;
    const Calibration c = calibrate_risk(ctx, at, 5, std::max(at.A + 10.0, a), 70, at.O);
    const double shift = c.onboard.count(2) ? c.onboard.at(2) : -1;
    shifts += fmt(" a=%.0f: %.0f;", a, shift);
    if (shift != expect || c.dw != expect) why += fmt(" a=%.0f gives %.2f not %.0f;", a, shift, expect);
  }
  o.pass = why.empty();
  o.detail = o.pass ? "resource table matches; onboard shift" + shifts : why;
  return o;
}

Outcome criterion_example() {
  Instance inst = fixtures::uniform(2, 5.0);
  Route r;
  r.seq = {0, 1, 2, 3, 4, 5};
  r.A = {0, 5, 10, 15, 20, 25};
  const auto br = validate_route(inst, r);
  Outcome o;
  o.pass = br.ok() && std::abs(br.H[1] - 5) <= 1e-9 && std::abs(br.H[2] - 5) <= 1e-9;
  o.detail = fmt("H1 = %.4f, H2 = %.4f", br.H[1], br.H[2]);
  return o;
}

// ---------------------------------------------------------------- property suites

bool dominance_property(std::string& detail) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int same = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RandomSpec spec;
    spec.n = 3;
    spec.fleet = 2;
    spec.horizon = 90;
    spec.window = 20;
    spec.half_width = 8;
    const Instance inst = preprocess(generate_random(spec, trial % 10 + 1));
    DualValues d = DualValues::zero(inst);
    for (int i = 1; i <= inst.n; ++i) d.pi[i] = 40.0 * u(rng);
    d.mu = -5.0 * u(rng);
    PricingContext ctx(inst, d, Objective::Cost);
    SinkEvaluator sink(inst);
    PricingOptions full, none;
    full.limit = none.limit = 0;
    full.dominance = DominanceMode::Full;
    none.dominance = DominanceMode::None;
    const double a = solve_pricing(ctx, sink, full).min_reduced_cost;
    const double b = solve_pricing(ctx, sink, none).min_reduced_cost;
    if (std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b))) ++same;
  }
  detail += fmt("(a) %.0f/100 dual draws agree; ", same);
  return same == 100;
}

bool cut_property(std::string& detail) {
  int rows = 0, held = 0, bound_ok = 0, bound_total = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = preprocess(random_instance(seed, 3 + static_cast<int>(seed % 2), 2));
    const auto bf = brute_force_solve(inst, {});
    if (!bf.feasible) continue;
    const ArcFlows opt = flows_of(bf.routes);
    ColumnPool pool(inst);
    SinkEvaluator sink(inst);
    if (!seed_pool(inst, pool, sink)) continue;
    CgStats st;
    const auto res = column_generation(inst, pool, sink, {}, {}, {}, {}, st);
    std::vector<ArcFlows> points{arc_flows(pool, res.sol.lambda)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
      ArcFlows y;
      for (const auto& c : pool.columns()) {
        const double w = u(rng) < 0.5 ? 0.0 : 0.5 * u(rng);
        for (std::size_t k = 0; w > 0 && k + 1 < c.route.seq.size(); ++k) y[{c.route.seq[k], c.route.seq[k + 1]}] += w;
      }
      points.push_back(y);
    }
    for (const auto& x : points) {
      std::vector<ArcRow> cuts = separate_ipec(inst, x);
      for (auto& c : separate_strengthened_ipec(inst, x)) cuts.push_back(c);
      for (auto& c : separate_two_path(inst, x)) cuts.push_back(c);
      for (auto& c : separate_rounded_capacity(inst, x)) cuts.push_back(c);
      for (const auto& c : cuts) ++rows, held += holds(c, opt);
    }
    SolveOptions so;
    const auto rep = solve(inst, so);
    if (rep.status == SolveStatus::Optimal) {
      ++bound_total;
      bound_ok += rep.root_bound >= rep.root_bound_no_cuts - 1e-6;
    }
  }
  detail += fmt("(b) %.0f/%.0f cuts hold at the optimum; (c) %.0f/%.0f roots not weakened; ", held, rows, bound_ok,
                bound_total);
  return rows > 0 && held == rows && bound_ok == bound_total && bound_total > 0;
}

bool monotone_property(std::string& detail) {
  int ok = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = preprocess(random_instance(seed, 3, 2));
    const auto darp = brute_force_solve(inst, {});
    if (!darp.feasible) continue;
    ++total;
    double prev = kInf;
    bool mono = true;
    for (int k = 0; k < 5; ++k) {
      SolveOptions so;
      so.eps_risk = darp.measure * k / 4.0;
      const auto rep = solve(inst, so);
      const double v = rep.status == SolveStatus::Optimal ? rep.objective : kInf;
      if (k > 0 && v > prev + 1e-9) mono = false;
      prev = v;
    }
    ok += mono;
  }
  detail += fmt("(d) %.0f/%.0f sweeps non-increasing; ", ok, total);
  return ok == total && total > 0;
}

bool pareto_property(std::string& detail) {
  int points = 0, good = 0;
  std::vector<Instance> cases;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) cases.push_back(preprocess(random_instance(seed, 3, 2)));
  cases.push_back(preprocess(load_instance(std::string(RDARP_SOURCE_DIR) + "/data/fixtures/pair2.json")));
  for (const auto& inst : cases) {
    ParetoOptions po;
    const auto front = pareto_front(inst, 1e-3, po);
    for (std::size_t a = 0; a < front.size(); ++a) {
      ++points;
      bool ok = front[a].exact;
      for (std::size_t b = 0; b < front.size(); ++b)
        if (a != b && front[b].cost <= front[a].cost + 1e-9 && front[b].max_risk <= front[a].max_risk + 1e-9)
          ok = false;
      SolveOptions c;
      c.eps_risk = front[a].max_risk + 1e-9;
      const auto rc = solve(inst, c);
      SolveOptions r;
      r.objective = Objective::Risk;
      r.eps_cost = front[a].cost + 1e-6;
      const auto rr = solve(inst, r);
      ok = ok && std::abs(rc.objective - front[a].cost) <= 1e-6 && std::abs(rr.objective - front[a].max_risk) <= 1e-6;
      good += ok;
    }
  }
  detail += fmt("(e) %.0f/%.0f Pareto points certified; ", good, points);
  return good == points && points > 0;
}

bool equity_property(std::string& detail) {
  int cols = 0, exact = 0, coef_ok = 0, reqs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = preprocess(edarp_transform(random_instance(seed, 3, 2)));
    for (int i = 1; i <= inst.n; ++i) {
      ++reqs;
      coef_ok += std::abs(risk_weight(inst, i) - 1.0 / std::max(15.0, inst.t(i, i + inst.n))) <= 1e-15;
    }
    SolveOptions so;
    so.eps_risk = 2.0;
    so.audit = true;
    const auto rep = solve(inst, so);
    for (const auto& r : rep.columns_emitted) {
      ++cols;
      bool ok = true;
      for (std::size_t k = 0; k < r.seq.size(); ++k) {
        const int v = r.seq[k];
        if (!inst.is_pickup(v)) continue;
        const auto q = std::find(r.seq.begin(), r.seq.end(), v + inst.n) - r.seq.begin();
        if (std::abs(r.H[v] - (r.A[q] - r.A[k])) > 1e-9) ok = false;
      }
      exact += ok;
    }
  }
  const bool example = edarp_transform(fixtures::uniform(1, 3.0)).detour_weight[1] == 15.0 &&
                       edarp_transform(fixtures::uniform(1, 20.0)).detour_weight[1] == 20.0;
  detail += fmt("(f) %.0f/%.0f equitable columns with H = ride time, %.0f/%.0f detour weights", exact, cols, coef_ok,
                reqs);
  return cols > 0 && exact == cols && coef_ok == reqs && example;
}

Outcome criterion_properties() {
  Outcome o;
  bool ok = dominance_property(o.detail);
  ok = cut_property(o.detail) && ok;
  ok = monotone_property(o.detail) && ok;
  ok = pareto_property(o.detail) && ok;
  ok = equity_property(o.detail) && ok;
  o.pass = ok;
  return o;
}

Outcome criterion_roundtrip() {
  Outcome o;
  int files = 0, good = 0;
  const fs::path dir = fs::path(RDARP_SOURCE_DIR) / "data" / "fixtures";
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().string().find("solution") == std::string::npos)
      paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    ++files;
    try {
      const Instance a = load_instance(p.string());
      std::istringstream s1(emit_realworld(a));
      const Instance b = parse_realworld(s1);
      const bool same = a.n == b.n && a.fleet == b.fleet && a.capacity == b.capacity && a.mode == b.mode &&
                        a.travel == b.travel && a.early == b.early && a.late == b.late && a.load == b.load &&
                        a.risk == b.risk && a.service == b.service && a.max_ride == b.max_ride &&
                        a.detour_weight == b.detour_weight && a.x == b.x && a.y == b.y &&
                        (a.q_max == b.q_max || (std::isinf(a.q_max) && std::isinf(b.q_max)));
      good += same && emit_realworld(b) == emit_realworld(a);
    } catch (const std::exception&) {
    }
  }
  o.pass = files > 0 && good == files;
  o.detail = fmt("%.0f/%.0f shipped JSON fixtures round-trip exactly", good, files);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool allow_missing = false;
  for (int k = 1; k < argc; ++k)
    if (std::string(argv[k]) == "--allow-missing-data") allow_missing = true;

  report(1, "benchmark regression", criterion_benchmarks());
  report(2, "infeasibility at the root", criterion_infeasible_root());

  const OracleRun run = run_oracle_equivalence();
  {
    Outcome o;
    o.pass = run.matched == run.compared && run.compared == 250 && run.seconds <= 60;
    o.detail = fmt("%.0f/%.0f solves equal brute force, %.1f s", run.matched, run.compared, run.seconds) +
               run.first_mismatch;
    report(3, "oracle equivalence", o);
  }
  {
    Outcome o;
    o.pass = run.validated > 0 && run.invalid == 0 && run.mmr_checked == run.validated && run.mmr_mismatch == 0;
    o.detail = fmt("%.0f columns validated, %.0f invalid, %.0f off the MMR optimum (worst gap %.2e)",
                   static_cast<double>(run.validated), static_cast<double>(run.invalid),
                   static_cast<double>(run.mmr_mismatch), run.worst_gap);
    report(4, "column soundness", o);
  }
  report(5, "label walkthrough", criterion_walkthrough());
  report(6, "risk-measure example", criterion_example());
  report(7, "property suites", criterion_properties());
  report(8, "JSON round-trip", criterion_roundtrip());

  std::printf("summary: %d failed, %d without data%s\n", failures, missing,
              allow_missing && missing ? " (not gating: --allow-missing-data)" : "");
  return failures > 0 || (!allow_missing && missing > 0) ? 1 : 0;
}
