#include "rdarp/master.hpp"

#include "rdarp/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rdarp {

namespace {

constexpr double kArtTol = 1e-6;

bool uses_forbidden(const Instance& inst, const std::vector<int>& seq, const std::vector<std::uint8_t>& forbidden) {
  if (forbidden.empty()) return false;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k)
    if (forbidden[static_cast<std::size_t>(seq[k]) * inst.nodes() + seq[k + 1]]) return true;
  return false;
}

}  // namespace

double ArcRow::coefficient(const std::vector<int>& seq) const {
  double a = 0.0;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    auto it = coef.find({seq[k], seq[k + 1]});
    if (it != coef.end()) a += it->second;
  }
  return a;
}

std::string ArcRow::key() const {
  std::ostringstream os;
  os << kind << ':' << static_cast<int>(sense) << ':' << rhs;
  for (const auto& [arc, c] : coef) os << ' ' << arc.first << '-' << arc.second << '*' << c;
  return os.str();
}

ArcRow outflow_row(const Instance& inst, std::string kind, const std::vector<int>& set, Sense sense, double rhs) {
  ArcRow r;
  r.kind = std::move(kind);
  r.sense = sense;
  r.rhs = rhs;
  r.nodes = set;
  std::sort(r.nodes.begin(), r.nodes.end());
  std::vector<char> in(inst.nodes(), 0);
  for (int v : set) in[v] = 1;
  for (int i : set)
    for (int j = 0; j < inst.nodes(); ++j)
      if (!in[j] && inst.arc_ok(i, j)) r.coef[{i, j}] = 1.0;
  return r;
}

ArcRow path_row(std::string kind, const std::vector<int>& path, Sense sense, double rhs) {
  ArcRow r;
  r.kind = std::move(kind);
  r.sense = sense;
  r.rhs = rhs;
  r.nodes = path;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) r.coef[{path[k], path[k + 1]}] += 1.0;
  return r;
}

ArcRow vehicle_row(const Instance& inst, Sense sense, double rhs) {
  ArcRow r;
  r.kind = "vehicles";
  r.sense = sense;
  r.rhs = rhs;
  for (int j = 1; j < inst.nodes(); ++j)
    if (inst.arc_ok(0, j)) r.coef[{0, j}] = 1.0;
  return r;
}

int ColumnPool::add(const Route& r) {
  const Instance& inst = *inst_;
  std::vector<long long> hkey;
  for (double h : r.H) hkey.push_back(std::llround(h * 1e7));
  auto key = std::make_pair(r.seq, hkey);
  if (index_.count(key)) return -1;
  ++audit_stats_.validated;
  const ExposureBreakdown br = validate_route(inst, r);
  if (!br.ok()) {
    ++audit_stats_.invalid;
    const Violation& v = br.violations.front();
    throw std::logic_error("column fails validation at node " + std::to_string(v.node) + ": " + v.what);
  }
  PoolColumn c;
  c.route = r;
  c.measure = route_measure(inst, r);
  c.reqs = requests_of(inst, r.seq);
  if (audit_) {
    ++audit_stats_.mmr_checked;
    const MmrResult m = mmr_schedule(inst, r.seq);
    const double gap = m.status == ScheduleStatus::Optimal ? std::abs(m.hbar - c.measure) : kInf;
    audit_stats_.worst_mmr_gap = std::max(audit_stats_.worst_mmr_gap, gap);
    if (gap > 1e-6) ++audit_stats_.mmr_mismatch;
  }
  const int id = static_cast<int>(cols_.size());
  cols_.push_back(std::move(c));
  index_.emplace(std::move(key), id);
  return id;
}

double big_m(const Instance& inst) {
  double s = 0.0;
  for (int i = 1; i <= 2 * inst.n; ++i) s += std::abs(inst.late[i]);
  return 10.0 * std::max(1.0, s);
}

void add_edarp_constraints(LinearModel& model, const Instance& inst, const ColumnPool& pool,
                           const std::vector<int>& lambda, double eps_dt, int dbar_var, std::vector<int>& rows_out) {
  rows_out.assign(inst.n + 1, -1);
  if (dbar_var < 0 && !std::isfinite(eps_dt)) return;
  for (int i = 1; i <= inst.n; ++i) {
    std::vector<std::pair<int, double>> coefs;
    const double w = risk_weight(inst, i);
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const double h = pool[k].route.H[i];
      if (h != 0.0) coefs.emplace_back(lambda[k], w * h);
    }
    if (dbar_var >= 0) coefs.emplace_back(dbar_var, -1.0);
    rows_out[i] = model.add_row("risk" + std::to_string(i), std::move(coefs), Sense::LE, dbar_var >= 0 ? 0.0 : eps_dt);
  }
}

LinearModel build_rlmp(const Instance& inst, const ColumnPool& pool, const MasterProblem& mp,
                       const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden, RlmpIndex& idx) {
  const int n = inst.n;
  const double big = big_m(inst);
  LinearModel m;
  idx = RlmpIndex{};
  const bool risk_obj = mp.objective == Objective::Risk;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& c = pool[k];
    const double ub = uses_forbidden(inst, c.route.seq, forbidden) ? 0.0 : kInf;
    idx.lambda.push_back(m.add_var("lambda" + std::to_string(k), 0.0, ub, risk_obj ? 0.0 : c.route.cost));
  }
  if (risk_obj) idx.hbar = m.add_var("Hbar", 0.0, kInf, 1.0);
  idx.artificial.assign(n + 1, -1);
  for (int i = 1; i <= n; ++i) idx.artificial[i] = m.add_var("art" + std::to_string(i), 0.0, kInf, big);

  idx.partition_row.assign(n + 1, -1);
  std::vector<std::vector<std::pair<int, double>>> part(n + 1);
  for (std::size_t k = 0; k < pool.size(); ++k)
    for (int i : pool[k].reqs) part[i].emplace_back(idx.lambda[k], 1.0);
  for (int i = 1; i <= n; ++i) {
    part[i].emplace_back(idx.artificial[i], 1.0);
    idx.partition_row[i] = m.add_row("cover" + std::to_string(i), part[i], Sense::EQ, 1.0);
  }
  std::vector<std::pair<int, double>> fleet;
  for (std::size_t k = 0; k < pool.size(); ++k) fleet.emplace_back(idx.lambda[k], 1.0);
  idx.fleet_row = m.add_row("fleet", fleet, Sense::LE, inst.fleet);

  add_edarp_constraints(m, inst, pool, idx.lambda, risk_obj ? kInf : mp.eps_risk, idx.hbar, idx.risk_row);
  if (risk_obj && std::isfinite(mp.eps_cost)) {
    std::vector<std::pair<int, double>> cr;
    for (std::size_t k = 0; k < pool.size(); ++k) cr.emplace_back(idx.lambda[k], pool[k].route.cost);
    idx.cost_row = m.add_row("cost_cap", cr, Sense::LE, mp.eps_cost);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::pair<int, double>> coefs;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const double a = rows[r].coefficient(pool[k].route.seq);
      if (a != 0.0) coefs.emplace_back(idx.lambda[k], a);
    }
    if (rows[r].sense != Sense::LE) {
      const int art = m.add_var("art_" + rows[r].kind + std::to_string(r), 0.0, kInf, big);
      idx.artificial.push_back(art);
      coefs.emplace_back(art, 1.0);
    }
    idx.arc_row.push_back(m.add_row(rows[r].kind + std::to_string(r), std::move(coefs), rows[r].sense, rows[r].rhs));
  }
  return m;
}

MasterSolution solve_rlmp(const Instance& inst, const ColumnPool& pool, const MasterProblem& mp,
                          const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden) {
  RlmpIndex idx;
  const LinearModel m = build_rlmp(inst, pool, mp, rows, forbidden, idx);
  const LpSolution s = solve_lp(m);
  MasterSolution out;
  out.status = s.status;
  if (s.status != LpStatus::Optimal) return out;
  out.objective = s.objective;
  out.lambda.resize(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    out.lambda[k] = std::max(0.0, s.x[idx.lambda[k]]);
    out.vehicles += out.lambda[k];
  }
  for (int a : idx.artificial)
    if (a >= 0) out.artificial += s.x[a];
  const int n = inst.n;
  DualValues& d = out.duals;
  d = DualValues::zero(inst);
  for (int i = 1; i <= n; ++i) {
    d.pi[i] = s.dual[idx.partition_row[i]];
    if (idx.risk_row[i] >= 0) d.rho[i] = std::min(0.0, s.dual[idx.risk_row[i]]);
  }
  d.mu = std::min(0.0, s.dual[idx.fleet_row]);
  if (idx.cost_row >= 0) d.xi = std::min(0.0, s.dual[idx.cost_row]);
  if (!rows.empty()) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double y = s.dual[idx.arc_row[r]];
      out.row_duals.push_back(rows[r].sense == Sense::LE ? std::min(0.0, y) : rows[r].sense == Sense::GE ? std::max(0.0, y) : y);
    }
    d.arc = fold_cut_duals(inst, rows, out.row_duals);
  }
  return out;
}

std::map<std::pair<int, int>, double> arc_flows(const ColumnPool& pool, const std::vector<double>& lambda) {
  std::map<std::pair<int, int>, double> x;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (lambda[k] <= 1e-9) continue;
    const auto& seq = pool[k].route.seq;
    for (std::size_t p = 0; p + 1 < seq.size(); ++p) x[{seq[p], seq[p + 1]}] += lambda[k];
  }
  return x;
}

bool seed_pool(const Instance& inst, ColumnPool& pool, SinkEvaluator& sink) {
  for (int i = 1; i <= inst.n; ++i) {
    Route r;
    double hbar = 0.0;
    const std::vector<int> seq{0, i, i + inst.n, inst.sink()};
    bool arcs = true;
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) arcs = arcs && inst.arc_ok(seq[k], seq[k + 1]);
    if (!arcs || !sink.evaluate(seq, {}, r, hbar)) return false;
    pool.add(r);
  }
  return true;
}

CgResult column_generation(const Instance& inst, ColumnPool& pool, SinkEvaluator& sink, const MasterProblem& mp,
                           const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden,
                           const CgOptions& opt, CgStats& stats) {
  CgResult res;
  for (;;) {
    double t0 = now_seconds();
    res.sol = solve_rlmp(inst, pool, mp, rows, forbidden);
    stats.t_master += now_seconds() - t0;
    if (res.sol.status != LpStatus::Optimal)
      throw std::runtime_error(std::string("restricted master: ") + to_string(res.sol.status));
    ++stats.iterations;

    PricingContext ctx(inst, res.sol.duals, mp.objective);
    if (mp.objective == Objective::Risk) ctx.eps_cost = mp.eps_cost;
    ctx.forbidden = forbidden;
    int added = 0;
    bool complete = true;
    t0 = now_seconds();
    auto take = [&](const PricingResult& pr) {
      for (const auto& c : pr.columns)
        if (pool.add(c.route) >= 0) ++added;
    };
    if (opt.heuristic) {
      PricingOptions po;
      po.heuristic = true;
      po.limit = opt.limit;
      po.deadline = opt.deadline;
      po.max_labels = 20000;
      take(solve_pricing(ctx, sink, po));
    }
    if (added == 0) {
      PricingOptions po;
      po.limit = opt.limit;
      po.deadline = opt.deadline;
      const PricingResult pr = solve_pricing(ctx, sink, po);
      complete = pr.complete;
      take(pr);
    }
    stats.t_pricing += now_seconds() - t0;
    stats.columns_added += added;
    if (!complete || (std::isfinite(opt.deadline) && now_seconds() > opt.deadline)) {
      res.truncated = true;
      break;
    }
    if (added == 0) break;
  }
  res.bound = res.sol.objective;
  res.infeasible = !res.truncated && res.sol.artificial > kArtTol;
  return res;
}

}  // namespace rdarp
