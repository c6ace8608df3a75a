#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "rdarp/pricing.hpp"

using namespace rdarp;

namespace {

std::vector<std::vector<int>> all_sequences(const Instance& inst) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << inst.n); ++mask) {
    std::vector<int> reqs;
    for (int i = 1; i <= inst.n; ++i)
      if (mask >> (i - 1) & 1) reqs.push_back(i);
    for (auto& s : feasible_sequences(inst, reqs)) out.push_back(s);
  }
  return out;
}

// Minimum reduced cost over every feasible route, with the exposure of the dual-weighted MMR schedule.
double enumerate_min_rc(const Instance& inst, const DualValues& d, Objective mode) {
  double best = 0.0;
  for (const auto& seq : all_sequences(inst)) {
    MmrOptions mo;
    mo.stage2_weight.assign(inst.n + 1, 0.0);
    for (int i = 1; i <= inst.n; ++i) mo.stage2_weight[i] = std::abs(d.rho_of(i)) * risk_weight(inst, i);
    auto m = mmr_schedule(inst, seq, mo);
    if (m.status != ScheduleStatus::Optimal) continue;
    double rc = (mode == Objective::Cost ? 1.0 : -d.xi) * route_cost(inst, seq) - d.mu;
    for (int i : requests_of(inst, seq)) rc -= d.pi[i] + d.rho_of(i) * risk_weight(inst, i) * m.route.H[i];
    best = std::min(best, rc);
  }
  return best;
}

Instance small_random(std::uint64_t seed, int n = 3) {
  RandomSpec spec;
  spec.n = n;
  spec.fleet = 2;
  spec.horizon = 90;
  spec.window = 20;
  spec.half_width = 8;
  return preprocess(generate_random(spec, seed));
}

DualValues random_duals(const Instance& inst, std::mt19937_64& rng, bool with_rho) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DualValues d = DualValues::zero(inst);
  for (int i = 1; i <= inst.n; ++i) {
    d.pi[i] = 40.0 * u(rng);
    if (with_rho) d.rho[i] = -u(rng);
  }
  d.mu = -5.0 * u(rng);
  return d;
}

}  // namespace

TEST_CASE("arc reduced costs") {
  Instance inst = fixtures::two_requests();
  DualValues d = DualValues::zero(inst);
  CHECK(arc_reduced_cost(inst, d, 3, 4, Objective::Cost) == doctest::Approx(inst.t(3, 4)));
  d.pi[1] = inst.t(1, 2);
  CHECK(arc_reduced_cost(inst, d, 1, 2, Objective::Cost) == doctest::Approx(0.0));
  DualValues r = DualValues::zero(inst);
  r.xi = -1.0;
  CHECK(arc_reduced_cost(inst, r, 1, 2, Objective::Risk) == doctest::Approx(inst.t(1, 2)));
  CHECK_THROWS(arc_reduced_cost(inst, d, 3, 1, Objective::Cost));
}

TEST_CASE("interlaced walkthrough reproduces the resource table") {
  Instance inst = fixtures::interlaced(60);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  auto ext = replay_path(ctx, {0, 1, 2, 4, 3, 5});
  REQUIRE(ext.size() == 5);
  for (const auto& e : ext) REQUIRE(e.ok());

  auto opens = [](const Label& l, auto field) {
    std::vector<double> v;
    for (const auto& o : l.O) v.push_back(field(o));
    return v;
  };
  auto bufs = [](const Label& l) {
    std::vector<double> v;
    for (const auto& o : l.O) v.push_back(o.d);
    for (const auto& a : l.Oa) v.push_back(a.d);
    return v;
  };
  auto Bo = [](const OpenState& o) { return o.Bo; };
  auto DB = [](const OpenState& o) { return o.DB; };
  using V = std::vector<double>;
  const std::vector<double> A{10, 20, 30, 40, 60}, B{20, 60, 40, 50, 70};
  const std::vector<V> Bos{{20}, {30, 60}, {40}, {50, 50}, {60}};
  const std::vector<V> DBs{{40}, {40, 100}, {70}, {70, 90}, {90}};
  const std::vector<V> ds{{10}, {10, 40}, {10, 10}, {10, 10, 10}};
  const std::vector<std::vector<int>> O{{1}, {1, 2}, {2}, {2, 3}, {3}}, Oa{{}, {}, {1}, {1}, {1, 2}};
  for (std::size_t k = 0; k < ext.size(); ++k) {
    const Label& l = ext[k].label;
    CAPTURE(k);
    CHECK(l.A == A[k]);
    CHECK(l.B == B[k]);
    CHECK(opens(l, Bo) == Bos[k]);
    CHECK(opens(l, DB) == DBs[k]);
    if (k < ds.size()) CHECK(bufs(l) == ds[k]);
    std::vector<int> o, oa;
    for (const auto& x : l.O) o.push_back(x.req);
    for (const auto& x : l.Oa) oa.push_back(x.req);
    CHECK(o == O[k]);
    CHECK(oa == Oa[k]);
  }
  // the final buffer set is {d^k, min(d^k,10), min(d^k,10)} with d^k what remains after the delay
  const V last = bufs(ext[4].label);
  REQUIRE(last.size() == 3);
  CHECK(last[1] == std::min(last[0], 10.0));
  CHECK(last[2] == std::min(last[0], 10.0));
}

TEST_CASE("calibration cases on the interlaced path") {
  for (auto [a, wait, onboard] : {std::tuple{60.0, 10.0, 10.0}, std::tuple{65.0, 15.0, 15.0}}) {
    CAPTURE(a);
    Instance inst = fixtures::interlaced(a);
    PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
    auto ext = replay_path(ctx, {0, 1, 2, 4, 3});
    const Label& at_k = ext.back().label;
    const double A_next = std::max(at_k.A + 10.0, a);
    Calibration c = calibrate_risk(ctx, at_k, 5, A_next, 70, at_k.O);
    CHECK(c.dw == wait);
    CHECK(c.delta.at(2) == 10.0);
    CHECK(c.delta.at(3) == 10.0);
    CHECK(c.onboard.at(2) == onboard);
    CHECK(c.onboard.at(3) == onboard);
  }
}

TEST_CASE("calibration without delay when associated exposure already dominates") {
  // lift the associated request's exposure above anything the open riders can reach
  Instance inst = fixtures::interlaced(65);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  auto ext = replay_path(ctx, {0, 1, 2, 4, 3});
  Label at_k = ext.back().label;
  at_k.Oa[0].h = 1000;
  Calibration c = calibrate_risk(ctx, at_k, 5, 65, 70, at_k.O);
  CHECK(c.which == Calibration::NoDelay);
  CHECK(c.onboard.at(2) == 25.0);
  // equality of both sides at zero delay is also a no-delay case
  at_k.O[0].h = at_k.O[1].h = 0;
  at_k.Oa[0].h = 25.0;  // one co-rider of risk 1 over the full arc
  c = calibrate_risk(ctx, at_k, 5, 65, 70, at_k.O);
  CHECK(c.which == Calibration::NoDelay);
  CHECK(c.delta.at(2) == 0.0);
}

TEST_CASE("partial delay balances open and associated exposure") {
  Instance inst = fixtures::interlaced(65);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  auto ext = replay_path(ctx, {0, 1, 2, 4, 3});
  Label at_k = ext.back().label;
  // open side: 0 + 1 * (25 - delta); associated side stays at 20, since nobody else was aboard when j boarded
  for (auto& o : at_k.O) o.h = 0;
  at_k.Oa[0].h = 20;
  at_k.Oa[0].d = 2;
  Calibration c = calibrate_risk(ctx, at_k, 5, 65, 70, at_k.O);
  REQUIRE(c.which == Calibration::Partial);
  // 25 - x = 20  ->  x = 5
  CHECK(c.delta_star == doctest::Approx(5.0));
  CHECK(c.onboard.at(2) == doctest::Approx(20.0));
}

TEST_CASE("extension rejects") {
  Instance inst = fixtures::interlaced(60);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  Label l0 = initial_label(ctx);
  Extension e = extend_label(ctx, l0, 1);
  REQUIRE(e.ok());
  Extension bad = extend_label(ctx, e.label, 5);
  CHECK(bad.stage == RejectStage::Pdptw);
  CHECK(bad.reason == "precedence");
  // riding i beyond its maximum: 0 -> i -> k -> ... cannot drop i in time
  Extension late = extend_label(ctx, e.label, 3);
  CHECK_FALSE(late.ok());
}

TEST_CASE("dominance basics") {
  Instance inst = fixtures::interlaced(60);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  auto ext = replay_path(ctx, {0, 1, 2});
  Label l = ext.back().label;
  CHECK(dominates(l, l, DominanceMode::Full));
  CHECK(dominates(l, l, DominanceMode::Weak));
  Label worse = l;
  worse.c_tilde += 1.0;
  worse.c_lb += 1.0;
  CHECK(dominates(l, worse));
  CHECK_FALSE(dominates(worse, l));
  CHECK_FALSE(dominates(l, l, DominanceMode::None));
}

TEST_CASE("zero duals price out nothing") {
  Instance inst = small_random(3);
  PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
  SinkEvaluator sink(inst);
  auto r = solve_pricing(ctx, sink);
  CHECK(r.columns.empty());
  CHECK(r.complete);
}

TEST_CASE("a heavily rewarded request is covered by the best column") {
  Instance inst = small_random(4);
  DualValues d = DualValues::zero(inst);
  d.pi[2] = 1000;
  PricingContext ctx(inst, d, Objective::Cost);
  SinkEvaluator sink(inst);
  auto r = solve_pricing(ctx, sink);
  REQUIRE_FALSE(r.columns.empty());
  auto reqs = requests_of(inst, r.columns.front().route.seq);
  CHECK(std::count(reqs.begin(), reqs.end(), 2) == 1);
}

TEST_CASE("every feasible route is generated and matches the oracle schedule") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    CAPTURE(seed);
    Instance inst = small_random(seed);
    DualValues d = DualValues::zero(inst);
    for (int i = 1; i <= inst.n; ++i) d.pi[i] = 1000;
    PricingContext ctx(inst, d, Objective::Cost);
    SinkEvaluator sink(inst);
    PricingOptions opt;
    opt.limit = 0;
    opt.dominance = DominanceMode::None;
    auto r = solve_pricing(ctx, sink, opt);
    std::set<std::vector<int>> got, want;
    for (const auto& c : r.columns) {
      got.insert(c.route.seq);
      auto br = validate_route(inst, c.route);
      CHECK(br.ok());
      auto m = mmr_schedule(inst, c.route.seq);
      REQUIRE(m.status == ScheduleStatus::Optimal);
      CHECK(c.measure == doctest::Approx(m.hbar).epsilon(1e-6));
    }
    for (const auto& s : all_sequences(inst)) want.insert(s);
    CHECK(got == want);
  }
}

TEST_CASE("minimum reduced cost equals enumeration") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    Instance inst = small_random(seed);
    for (Objective mode : {Objective::Cost, Objective::Risk}) {
      DualValues d = random_duals(inst, rng, true);
      if (mode == Objective::Risk) d.xi = -0.3;
      PricingContext ctx(inst, d, mode);
      SinkEvaluator sink(inst);
      PricingOptions opt;
      opt.limit = 0;
      auto r = solve_pricing(ctx, sink, opt);
      CHECK(r.min_reduced_cost == doctest::Approx(enumerate_min_rc(inst, d, mode)).epsilon(1e-6));
    }
  }
}

TEST_CASE("dominance never changes the minimum reduced cost") {
  std::mt19937_64 rng(11);
  int trials = 0;
  for (std::uint64_t seed = 1; trials < 100; ++seed) {
    Instance inst = small_random(seed % 10 + 1);
    DualValues d = random_duals(inst, rng, false);
    PricingContext ctx(inst, d, Objective::Cost);
    REQUIRE_FALSE(ctx.risk_active);
    SinkEvaluator sink(inst);
    PricingOptions full, none;
    full.limit = none.limit = 0;
    none.dominance = DominanceMode::None;
    auto a = solve_pricing(ctx, sink, full);
    auto b = solve_pricing(ctx, sink, none);
    CAPTURE(seed);
    CHECK(a.min_reduced_cost == doctest::Approx(b.min_reduced_cost).epsilon(1e-9));
    CHECK(a.stats.created <= b.stats.created);
    ++trials;
  }
}

TEST_CASE("labels accept exactly the schedulable routes under tight ride limits") {
  RandomSpec spec;
  spec.capacity = 3;
  spec.horizon = 90;
  spec.window = 25;
  spec.half_width = 8;
  spec.max_ride = 20;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    spec.n = 3 + static_cast<int>(seed % 2);
    // no route-level risk cap, so only time, ride and capacity limits apply
    const Instance inst = preprocess(edarp_transform(generate_random(spec, seed)));
    PricingContext ctx(inst, DualValues::zero(inst), Objective::Cost);
    std::set<std::vector<int>> got, want;
    std::vector<int> path{0};
    std::function<void(const Label&)> dfs = [&](const Label& l) {
      for (int j = 1; j < inst.nodes(); ++j) {
        const Extension e = extend_label(ctx, l, j);
        if (!e.ok()) continue;
        path.push_back(j);
        if (j == inst.sink()) got.insert(path);
        else dfs(e.label);
        path.pop_back();
      }
    };
    dfs(initial_label(ctx));
    for (const auto& s : all_sequences(inst)) want.insert(s);
    CHECK(got == want);
  }
}

TEST_CASE("equitable columns carry onboard durations") {
  Instance inst = edarp_transform(small_random(5));
  DualValues d = DualValues::zero(inst);
  for (int i = 1; i <= inst.n; ++i) d.pi[i] = 1000, d.rho[i] = -0.5;
  PricingContext ctx(inst, d, Objective::Cost);
  SinkEvaluator sink(inst);
  PricingOptions opt;
  opt.limit = 0;
  auto r = solve_pricing(ctx, sink, opt);
  REQUIRE_FALSE(r.columns.empty());
  for (const auto& c : r.columns) {
    CHECK(validate_route(inst, c.route).ok());
    for (std::size_t k = 0; k < c.route.seq.size(); ++k) {
      const int v = c.route.seq[k];
      if (!inst.is_pickup(v)) continue;
      const auto q = std::find(c.route.seq.begin(), c.route.seq.end(), v + inst.n) - c.route.seq.begin();
      CHECK(c.route.H[v] == doctest::Approx(c.route.A[q] - c.route.A[k]).epsilon(1e-9));
    }
  }
  CHECK(r.min_reduced_cost == doctest::Approx(enumerate_min_rc(inst, d, Objective::Cost)).epsilon(1e-6));
}

TEST_CASE("trace lines describe accepted labels") {
  Instance inst = fixtures::interlaced(60);
  DualValues d = DualValues::zero(inst);
  for (int i = 1; i <= inst.n; ++i) d.pi[i] = 100;
  PricingContext ctx(inst, d, Objective::Cost);
  SinkEvaluator sink(inst);
  PricingOptions opt;
  opt.trace = true;
  auto r = solve_pricing(ctx, sink, opt);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.size() == r.stats.created);
  CHECK(r.trace.front().rfind("node=", 0) == 0);
  auto ext = replay_path(ctx, {0, 1});
  CHECK(trace_line(ext[0].label) == "node=1 c=10.0000 A=10.0000 B=20.0000 open=1 Q=0.0000");
}
