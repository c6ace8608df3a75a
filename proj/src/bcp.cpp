#include "rdarp/bcp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace rdarp {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPruneTol = 1e-6;

struct TreeNode {
  std::vector<BranchRule> rules;
  double bound = -kInf;
  int depth = 0;
  int id = 0;
};

struct Worse {
  bool operator()(const TreeNode& a, const TreeNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

std::vector<ArcRow> separate_all(const Instance& inst, const ArcFlows& x, const CutSelection& sel) {
  std::vector<ArcRow> out;
  auto take = [&](std::vector<ArcRow> v) {
    for (auto& r : v) out.push_back(std::move(r));
  };
  if (sel.ipec) {
    take(separate_ipec(inst, x));
    take(separate_strengthened_ipec(inst, x));
  }
  if (sel.two_path) take(separate_two_path(inst, x));
  if (sel.rounded_capacity) take(separate_rounded_capacity(inst, x));
  return out;
}

double objective_of(const Instance& inst, Objective obj, const std::vector<Route>& routes) {
  double cost = 0.0, risk = 0.0;
  for (const auto& r : routes) {
    cost += r.cost;
    risk = std::max(risk, route_measure(inst, r));
  }
  return obj == Objective::Cost ? cost : risk;
}

bool fractional(double v) { return std::abs(v - std::round(v)) > kIntTol; }

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

std::map<std::vector<int>, double> sequence_values(const ColumnPool& pool, const std::vector<double>& lambda) {
  std::map<std::vector<int>, double> v;
  for (std::size_t k = 0; k < pool.size(); ++k)
    if (lambda[k] > 1e-9) v[pool[k].route.seq] += lambda[k];
  return v;
}

bool integral_solution(const ColumnPool& pool, const std::vector<double>& lambda) {
  for (const auto& [seq, v] : sequence_values(pool, lambda))
    if (fractional(v)) return false;
  return true;
}

std::vector<BranchRule> choose_branch(const Instance& inst, const ColumnPool& pool, const MasterSolution& sol,
                                      bool& arc_fallback) {
  if (fractional(sol.vehicles)) {
    const double lo = std::floor(sol.vehicles);
    return {BranchRule{vehicle_row(inst, Sense::LE, lo)}, BranchRule{vehicle_row(inst, Sense::GE, lo + 1)}};
  }
  if (integral_solution(pool, sol.lambda)) return {};
  const ArcFlows x = arc_flows(pool, sol.lambda);
  auto interior = [&](int v) { return v >= 1 && v <= 2 * inst.n; };

  double best = kInf;
  std::vector<int> pick;
  for (const auto& [arc, v] : x) {
    const auto [a, b] = arc;
    if (v <= 1e-6 || !interior(a) || !interior(b)) continue;
    const std::vector<int> pair{std::min(a, b), std::max(a, b)};
    const double f = row_activity(outflow_row(inst, "pair", pair, Sense::LE, 1.0), x);
    if (f <= 1.0 + kIntTol || f >= 2.0 - kIntTol) continue;
    const double score = std::abs(f - 1.5);
    if (score < best - 1e-12) best = score, pick = pair;
  }
  if (!pick.empty())
    return {BranchRule{outflow_row(inst, "pair", pick, Sense::LE, 1.0)},
            BranchRule{outflow_row(inst, "pair", pick, Sense::GE, 2.0)}};

  best = kInf;
  std::pair<int, int> arc{-1, -1};
  for (const auto& [a, v] : x) {
    if (!fractional(v)) continue;
    const double score = std::abs(v - std::floor(v) - 0.5);
    if (score < best - 1e-12) best = score, arc = a;
  }
  if (arc.first < 0) return {};
  arc_fallback = true;
  BranchRule off;
  off.forbid = true;
  off.arc = arc;
  off.row = path_row("arc_off", {arc.first, arc.second}, Sense::LE, 0.0);
  return {off, BranchRule{path_row("arc_on", {arc.first, arc.second}, Sense::GE, 1.0)}};
}

SolveReport solve(const Instance& inst, const SolveOptions& opt) {
  const double start = now_seconds();
  const double deadline = std::isfinite(opt.time_limit) ? start + opt.time_limit : kInf;
  SolveReport rep;
  ColumnPool pool(inst, opt.audit);
  SinkEvaluator sink(inst);
  auto finish = [&]() {
    rep.columns = pool.size();
    rep.audit = pool.audit();
    rep.t_total = now_seconds() - start;
    if (opt.audit)
      for (const auto& c : pool.columns()) rep.columns_emitted.push_back(c.route);
    return rep;
  };
  if (!seed_pool(inst, pool, sink)) {
    rep.status = SolveStatus::Infeasible;
    return finish();
  }

  MasterProblem mp;
  mp.objective = opt.objective;
  mp.eps_risk = opt.eps_risk;
  mp.eps_cost = opt.eps_cost;
  CgOptions co;
  co.heuristic = opt.heuristic_pricing;
  co.limit = opt.pricing_limit;
  co.deadline = deadline;
  CgStats st;
  CutPool cuts;

  double incumbent = kInf;
  std::vector<Route> best;
  bool timed_out = false;
  double open_bound = kInf;  // best bound among nodes left unexplored on a time-out
  int next_id = 1;
  std::priority_queue<TreeNode, std::vector<TreeNode>, Worse> open;
  open.push(TreeNode{});

  while (!open.empty()) {
    TreeNode node = open.top();
    if (node.bound >= incumbent - kPruneTol) {
      open.pop();
      continue;
    }
    if (now_seconds() > deadline) {
      timed_out = true;
      break;
    }
    open.pop();
    ++rep.nodes;

    std::vector<ArcRow> rows = cuts.rows();
    std::vector<std::uint8_t> forbidden;
    for (const auto& r : node.rules) {
      if (!r.forbid) {
        rows.push_back(r.row);
        continue;
      }
      if (forbidden.empty()) forbidden.assign(static_cast<std::size_t>(inst.nodes()) * inst.nodes(), 0);
      forbidden[static_cast<std::size_t>(r.arc.first) * inst.nodes() + r.arc.second] = 1;
    }

    CgResult res = column_generation(inst, pool, sink, mp, rows, forbidden, co, st);
    if (node.id == 0) {
      rep.root_bound_no_cuts = res.bound;
      for (int round = 0; round < opt.max_cut_rounds && opt.cuts.any() && !res.truncated && !res.infeasible;
           ++round) {
        if (integral_solution(pool, res.sol.lambda)) break;
        int added = 0;
        for (auto& r : separate_all(inst, arc_flows(pool, res.sol.lambda), opt.cuts))
          if (cuts.add(std::move(r))) ++added;
        if (added == 0) break;
        rows = cuts.rows();
        res = column_generation(inst, pool, sink, mp, rows, forbidden, co, st);
      }
      rep.root_bound = res.bound;
    }
    if (res.truncated) {
      timed_out = true;
      open_bound = std::min(open_bound, node.bound);
      break;
    }
    if (res.infeasible) continue;
    const double bound = std::max(res.bound, node.bound);
    if (bound >= incumbent - kPruneTol) continue;

    if (integral_solution(pool, res.sol.lambda)) {
      std::vector<Route> routes;
      bool ok = true;
      for (const auto& [seq, v] : sequence_values(pool, res.sol.lambda)) {
        if (std::llround(v) == 0) continue;
        const MmrResult m = mmr_schedule(inst, seq);
        if (m.status != ScheduleStatus::Optimal) {
          ok = false;
          break;
        }
        routes.push_back(m.route);
      }
      if (!ok) throw std::logic_error("integral master solution without a feasible schedule");
      const double value = objective_of(inst, opt.objective, routes);
      if (value < incumbent) {
        incumbent = value;
        best = std::move(routes);
      }
      continue;
    }
    const auto rules = choose_branch(inst, pool, res.sol, rep.arc_fallback);
    if (rules.empty()) {
      rep.uncertified = true;
      open_bound = std::min(open_bound, bound);
      continue;
    }
    for (const auto& rule : rules) {
      TreeNode child;
      child.rules = node.rules;
      child.rules.push_back(rule);
      child.bound = bound;
      child.depth = node.depth + 1;
      child.id = next_id++;
      open.push(std::move(child));
    }
  }
  while (!open.empty()) {
    if (open.top().bound < incumbent - kPruneTol) open_bound = std::min(open_bound, open.top().bound);
    open.pop();
  }

  rep.t_master = st.t_master;
  rep.t_pricing = st.t_pricing;
  rep.cuts = cuts.counts();
  rep.routes = best;
  rep.objective = incumbent;
  if (!best.empty() || std::isfinite(incumbent)) {
    rep.cost = objective_of(inst, Objective::Cost, best);
    rep.max_risk = objective_of(inst, Objective::Risk, best);
  }
  rep.bound = std::min(open_bound, incumbent);
  if (timed_out && !std::isfinite(rep.bound)) rep.bound = rep.root_bound;
  if (std::isfinite(incumbent)) {
    const double denom = std::max(std::abs(incumbent), 1e-9);
    rep.gap = std::max(0.0, (incumbent - rep.bound) / denom);
    if (incumbent - rep.bound <= kPruneTol) rep.gap = 0.0;
  }
  if (timed_out)
    rep.status = SolveStatus::TimeLimit;
  else if (!std::isfinite(incumbent))
    rep.status = rep.uncertified ? SolveStatus::Feasible : SolveStatus::Infeasible;
  else
    rep.status = rep.uncertified && rep.gap > 0 ? SolveStatus::Feasible : SolveStatus::Optimal;
  return finish();
}

std::string solution_json(const Instance& inst, const SolveReport& rep) {
  using nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json doc;
  doc["status"] = to_string(rep.status);
  doc["objective"] = num(rep.objective);
  doc["bound"] = num(rep.bound);
  doc["gap"] = num(rep.gap);
  doc["cost"] = rep.cost;
  doc["max_risk"] = rep.max_risk;
  ordered_json routes = ordered_json::array();
  for (const auto& r : rep.routes) {
    ordered_json jr;
    jr["sequence"] = r.seq;
    jr["schedule"] = r.A;
    jr["cost"] = r.cost;
    ordered_json h = ordered_json::object();
    for (int i : requests_of(inst, r.seq)) h[std::to_string(i)] = r.H[i];
    jr["H"] = h;
    jr["Q"] = r.Q;
    routes.push_back(jr);
  }
  doc["routes"] = routes;
  ordered_json cuts = ordered_json::object();
  int total = 0;
  for (const auto& [k, c] : rep.cuts) cuts[k] = c, total += c;
  doc["stats"] = {{"nodes", rep.nodes},
                  {"columns", rep.columns},
                  {"cuts", total},
                  {"cuts_by_family", cuts},
                  {"root_bound", num(rep.root_bound)},
                  {"arc_fallback", rep.arc_fallback},
                  {"t_master_s", rep.t_master},
                  {"t_pricing_s", rep.t_pricing}};
  return doc.dump(2) + "\n";
}

std::vector<Route> routes_from_json(const Instance& inst, const std::string& text) {
  using nlohmann::json;
  const json doc = json::parse(text);
  std::vector<Route> out;
  for (const auto& jr : doc.at("routes")) {
    Route r;
    r.seq = jr.at("sequence").get<std::vector<int>>();
    r.A = jr.at("schedule").get<std::vector<double>>();
    for (int v : r.seq)
      if (v < 0 || v >= inst.nodes()) throw std::runtime_error("node " + std::to_string(v) + " out of range");
    r.cost = route_cost(inst, r.seq);
    if (jr.contains("H")) {
      r.H.assign(inst.n + 1, 0.0);
      for (const auto& [k, v] : jr.at("H").items()) {
        const int i = std::stoi(k);
        if (i < 1 || i > inst.n) throw std::runtime_error("request " + k + " out of range");
        r.H[i] = v.get<double>();
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rdarp
