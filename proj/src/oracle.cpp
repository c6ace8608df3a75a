#include "rdarp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "rdarp/lp.hpp"

namespace rdarp {

namespace {

constexpr double kTol = 1e-6;

struct Positions {
  std::vector<int> pick, drop;  // per request, -1 when absent
};

Positions positions(const Instance& inst, const std::vector<int>& seq) {
  Positions p{std::vector<int>(inst.n + 1, -1), std::vector<int>(inst.n + 1, -1)};
  for (int k = 0; k < static_cast<int>(seq.size()); ++k) {
    const int v = seq[k];
    if (inst.is_pickup(v)) p.pick[v] = k;
    else if (inst.is_delivery(v)) p.drop[v - inst.n] = k;
  }
  return p;
}

double weight_of(const Instance& inst, int i) {
  return inst.edarp() ? 1.0 / inst.detour_weight[i] : 1.0;
}

// H_i as a linear form over the schedule positions, for a fixed sequence.
std::vector<std::pair<int, double>> exposure_form(const Instance& inst, const Positions& pos, int i) {
  std::map<int, double> coef;
  const int pi = pos.pick[i], qi = pos.drop[i];
  for (int j = 1; j <= inst.n; ++j) {
    if (j == i || pos.pick[j] < 0 || inst.risk[j] == 0.0) continue;
    const int start = std::max(pi, pos.pick[j]), end = std::min(qi, pos.drop[j]);
    if (start >= end) continue;
    coef[end] += inst.risk[j];
    coef[start] -= inst.risk[j];
  }
  if (inst.edarp()) {
    coef[qi] += 1.0;
    coef[pi] -= 1.0;
  }
  std::vector<std::pair<int, double>> out;
  for (const auto& [k, c] : coef)
    if (c != 0.0) out.emplace_back(k, c);
  return out;
}

}  // namespace

std::vector<int> requests_of(const Instance& inst, const std::vector<int>& seq) {
  std::vector<int> r;
  for (int v : seq)
    if (inst.is_pickup(v)) r.push_back(v);
  return r;
}

double route_cost(const Instance& inst, const std::vector<int>& seq) {
  double c = 0;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) c += inst.t(seq[k], seq[k + 1]);
  return c;
}

double route_measure(const Instance& inst, const Route& r) {
  double m = 0;
  for (int i : requests_of(inst, r.seq)) m = std::max(m, weight_of(inst, i) * r.H[i]);
  return m;
}

std::vector<double> overlap_exposure(const Instance& inst, const std::vector<int>& seq, const std::vector<double>& A) {
  const Positions pos = positions(inst, seq);
  std::vector<double> H(inst.n + 1, 0.0);
  for (int i = 1; i <= inst.n; ++i) {
    if (pos.pick[i] < 0 || pos.drop[i] < 0) continue;
    const double s = A[pos.pick[i]], e = A[pos.drop[i]];
    double h = inst.edarp() ? e - s : 0.0;
    for (int j = 1; j <= inst.n; ++j) {
      if (j == i || pos.pick[j] < 0 || pos.drop[j] < 0) continue;
      const double ov = std::min(e, A[pos.drop[j]]) - std::max(s, A[pos.pick[j]]);
      if (ov > 0) h += inst.risk[j] * ov;
    }
    H[i] = h;
  }
  return H;
}

ExposureBreakdown validate_route(const Instance& inst, const Route& route) {
  ExposureBreakdown out;
  auto bad = [&out](int node, std::string what, double lhs, double rhs) {
    out.violations.push_back({node, std::move(what), lhs, rhs});
  };
  const auto& seq = route.seq;
  const int m = static_cast<int>(seq.size());
  if (m < 2 || seq.front() != 0 || seq.back() != inst.sink()) {
    bad(m ? seq.front() : -1, "route must start at 0 and end at the destination depot", 0, 0);
    return out;
  }
  if (static_cast<int>(route.A.size()) != m) {
    bad(0, "schedule length differs from sequence length", route.A.size(), m);
    return out;
  }
  std::vector<int> seen(inst.nodes(), 0);
  for (int k = 0; k < m; ++k) {
    const int v = seq[k];
    if (v < 0 || v >= inst.nodes()) {
      bad(v, "node id out of range", v, inst.nodes() - 1);
      return out;
    }
    if (++seen[v] > 1) bad(v, "node visited more than once", seen[v], 1);
    if ((v == 0 && k != 0) || (v == inst.sink() && k != m - 1)) bad(v, "depot inside the route", k, 0);
  }
  if (!out.ok()) return out;
  const Positions pos = positions(inst, seq);
  for (int i = 1; i <= inst.n; ++i) {
    if ((pos.pick[i] < 0) != (pos.drop[i] < 0)) bad(i, "pick-up and drop-off not on the same route", 0, 0);
    else if (pos.pick[i] >= 0 && pos.pick[i] > pos.drop[i]) bad(inst.delivery_of(i), "drop-off before pick-up", pos.drop[i], pos.pick[i]);
  }
  if (!out.ok()) return out;

  int load = 0;
  for (int k = 0; k < m; ++k) {
    const int v = seq[k];
    const double A = route.A[k];
    if (A < inst.early[v] - kTol) bad(v, "a_i <= A_i", inst.early[v], A);
    if (A > inst.late[v] + kTol) bad(v, "A_i <= b_i", A, inst.late[v]);
    if (k + 1 < m) {
      const double need = A + inst.service[v] + inst.t(v, seq[k + 1]);
      if (route.A[k + 1] < need - kTol) bad(seq[k + 1], "A_i + s_i + t_ij <= A_j", need, route.A[k + 1]);
    }
    load += inst.load[v];
    if (load > inst.capacity) bad(v, "load <= capacity", load, inst.capacity);
    if (load < 0) bad(v, "load >= 0", 0, load);
  }
  for (int i = 1; i <= inst.n; ++i) {
    if (pos.pick[i] < 0) continue;
    const double ride = route.A[pos.drop[i]] - route.A[pos.pick[i]] - inst.service[i];
    const double direct = inst.t(i, inst.delivery_of(i));
    if (ride > inst.max_ride[i] + kTol) bad(i, "ride time <= L_max", ride, inst.max_ride[i]);
    if (ride < direct - kTol) bad(i, "t_{i,n+i} <= ride time", direct, ride);
  }

  // Risk propagation: departure-node accrual.
  out.R.assign(m, 0.0);
  out.Q.assign(m, 0.0);
  double R = inst.edarp() ? 1.0 : 0.0;
  for (int k = 0; k < m; ++k) {
    if (k > 0) out.Q[k] = out.Q[k - 1] + (route.A[k] - route.A[k - 1]) * out.R[k - 1];
    R += inst.risk[seq[k]];
    if (inst.edarp() && seq[k] == inst.sink()) R -= 1.0;
    out.R[k] = R;
  }
  for (int k = 1; k < m; ++k)
    if (out.Q[k] < out.Q[k - 1] - kTol) bad(seq[k], "cumulative risk is non-decreasing", out.Q[k - 1], out.Q[k]);
  if (out.Q[m - 1] > inst.q_max + kTol) bad(inst.sink(), "Q <= Q_max", out.Q[m - 1], inst.q_max);

  out.H = overlap_exposure(inst, seq, route.A);
  // Same exposures by accrual over legs; must agree with the pairwise overlaps.
  for (int i = 1; i <= inst.n; ++i) {
    if (pos.pick[i] < 0) continue;
    double h = 0;
    for (int k = pos.pick[i]; k < pos.drop[i]; ++k) h += (route.A[k + 1] - route.A[k]) * (out.R[k] - inst.risk[i]);
    if (std::abs(h - out.H[i]) > kTol * std::max(1.0, std::abs(h))) bad(i, "exposure accrual equals overlap sum", h, out.H[i]);
    if (inst.edarp()) {
      const double ride = route.A[pos.drop[i]] - route.A[pos.pick[i]];
      if (std::abs(out.H[i] - ride) > kTol) bad(i, "EDARP exposure equals onboard duration", out.H[i], ride);
    }
  }
  if (!route.H.empty()) {
    for (int i = 1; i <= inst.n; ++i) {
      const double given = i < static_cast<int>(route.H.size()) ? route.H[i] : 0.0;
      if (std::abs(given - out.H[i]) > kTol * std::max(1.0, std::abs(out.H[i])))
        bad(i, "reported H_i equals recomputed H_i", given, out.H[i]);
    }
  }
  return out;
}

MmrResult mmr_schedule(const Instance& inst, const std::vector<int>& seq, const MmrOptions& opt) {
  MmrResult res;
  const int m = static_cast<int>(seq.size());
  const Positions pos = positions(inst, seq);
  LinearModel lp;
  for (int k = 0; k < m; ++k) lp.add_var("A" + std::to_string(k), inst.early[seq[k]], inst.late[seq[k]], 0.0);
  const int hbar = lp.add_var("Hbar", 0.0, kInf, 1.0);
  for (int k = 0; k + 1 < m; ++k)
    lp.add_row("prec" + std::to_string(k), {{k + 1, 1.0}, {k, -1.0}}, Sense::GE,
               inst.service[seq[k]] + inst.t(seq[k], seq[k + 1]));
  const std::vector<int> reqs = requests_of(inst, seq);
  std::vector<std::vector<std::pair<int, double>>> forms(inst.n + 1);
  for (int i : reqs) {
    const int p = pos.pick[i], q = pos.drop[i];
    lp.add_row("ride" + std::to_string(i), {{q, 1.0}, {p, -1.0}}, Sense::LE, inst.service[i] + inst.max_ride[i]);
    lp.add_row("direct" + std::to_string(i), {{q, 1.0}, {p, -1.0}}, Sense::GE,
               inst.service[i] + inst.t(i, inst.delivery_of(i)));
    forms[i] = exposure_form(inst, pos, i);
    auto row = forms[i];
    for (auto& e : row) e.second *= weight_of(inst, i);
    row.emplace_back(hbar, -1.0);
    lp.add_row("mmr" + std::to_string(i), row, Sense::LE, 0.0);
  }
  if (std::isfinite(inst.q_max)) {
    std::map<int, double> qf;
    for (int j : reqs) {
      qf[pos.drop[j]] += inst.risk[j];
      qf[pos.pick[j]] -= inst.risk[j];
    }
    if (inst.edarp()) qf[m - 1] += 1.0, qf[0] -= 1.0;
    std::vector<std::pair<int, double>> row(qf.begin(), qf.end());
    lp.add_row("qmax", row, Sense::LE, inst.q_max);
  }
  LpSolution s = solve_lp(lp);
  if (s.status == LpStatus::Infeasible) return res;
  if (s.status != LpStatus::Optimal) {
    res.status = ScheduleStatus::NumericalFailure;
    return res;
  }
  res.hbar = s.objective;
  if (opt.second_stage && !reqs.empty()) {
    lp.vars[hbar].obj = 0.0;
    lp.vars[hbar].ub = res.hbar + 1e-9 * std::max(1.0, res.hbar);
    bool any = false;
    for (double w : opt.stage2_weight) any = any || w != 0.0;
    for (int i : reqs) {
      const double w = any ? opt.stage2_weight[i] : 1.0;
      for (const auto& [k, c] : forms[i]) lp.vars[k].obj += w * c;
    }
    LpSolution s2 = solve_lp(lp);
    if (s2.status == LpStatus::Optimal) s = s2;
  }
  res.status = ScheduleStatus::Optimal;
  res.route.seq = seq;
  res.route.A.assign(s.x.begin(), s.x.begin() + m);
  res.route.cost = route_cost(inst, seq);
  res.route.H = overlap_exposure(inst, seq, res.route.A);
  double Q = 0, R = inst.edarp() ? 1.0 : 0.0;
  for (int k = 0; k + 1 < m; ++k) {
    R += inst.risk[seq[k]];
    Q += (res.route.A[k + 1] - res.route.A[k]) * R;
  }
  res.route.Q = Q;
  res.hbar = route_measure(inst, res.route);
  return res;
}

bool path_feasible(const Instance& inst, const std::vector<int>& nodes) {
  const int m = static_cast<int>(nodes.size());
  if (m == 0) return true;
  std::vector<int> at(inst.nodes(), -1);
  for (int k = 0; k < m; ++k) {
    if (at[nodes[k]] >= 0) return false;
    at[nodes[k]] = k;
  }
  int load = 0;
  for (int k = 0; k < m; ++k) {
    const int v = nodes[k];
    if (inst.is_delivery(v) && at[v - inst.n] < 0) load += inst.load[v - inst.n];
  }
  if (load > inst.capacity) return false;
  for (int k = 0; k < m; ++k) {
    const int v = nodes[k];
    if (inst.is_delivery(v) && at[v - inst.n] > k) return false;
    load += inst.load[v];
    if (load > inst.capacity) return false;
  }
  // Difference constraints x_v - x_u <= w as edges u -> v; node m is the zero reference.
  struct Edge {
    int u, v;
    double w;
  };
  std::vector<Edge> edges;
  for (int k = 0; k < m; ++k) {
    edges.push_back({m, k, inst.late[nodes[k]]});
    edges.push_back({k, m, -inst.early[nodes[k]]});
    if (k + 1 < m) edges.push_back({k + 1, k, -(inst.service[nodes[k]] + inst.t(nodes[k], nodes[k + 1]))});
    const int v = nodes[k];
    if (inst.is_pickup(v) && at[inst.delivery_of(v)] >= 0) {
      const int q = at[inst.delivery_of(v)];
      edges.push_back({k, q, inst.service[v] + inst.max_ride[v]});
      edges.push_back({q, k, -(inst.service[v] + inst.t(v, inst.delivery_of(v)))});
    }
  }
  std::vector<double> dist(m + 1, 0.0);
  for (int it = 0; it <= m + 1; ++it) {
    bool changed = false;
    for (const auto& e : edges)
      if (dist[e.u] + e.w < dist[e.v] - 1e-9) {
        dist[e.v] = dist[e.u] + e.w;
        changed = true;
      }
    if (!changed) return true;
  }
  return false;
}

std::vector<std::vector<int>> feasible_sequences(const Instance& inst, const std::vector<int>& requests) {
  std::vector<std::vector<int>> out;
  const int k = static_cast<int>(requests.size());
  std::vector<int> state(k, 0);  // 0 waiting, 1 onboard, 2 done
  std::vector<int> seq{0};
  std::function<void(double, int)> rec = [&](double t, int load) {
    const int last = seq.back();
    if (static_cast<int>(seq.size()) == 2 * k + 1) {
      const double arr = t + inst.service[last] + inst.t(last, inst.sink());
      if (arr > inst.late[inst.sink()] + 1e-9) return;
      seq.push_back(inst.sink());
      if (path_feasible(inst, seq)) out.push_back(seq);
      seq.pop_back();
      return;
    }
    for (int idx = 0; idx < k; ++idx) {
      if (state[idx] == 2) continue;
      const int i = requests[idx];
      const int v = state[idx] == 0 ? i : inst.delivery_of(i);
      const int nl = load + inst.load[v];
      if (nl > inst.capacity) continue;
      const double a = std::max(t + inst.service[last] + inst.t(last, v), inst.early[v]);
      if (a > inst.late[v] + 1e-9) continue;
      seq.push_back(v);
      ++state[idx];
      if (path_feasible(inst, seq)) rec(a, nl);
      --state[idx];
      seq.pop_back();
    }
  };
  rec(inst.early[0], 0);
  return out;
}

namespace {

struct Option {
  double cost, measure;
  Route route;
};

// Non-dominated (cost, measure) single-route options for every request subset.
std::vector<std::vector<Option>> subset_options(const Instance& inst) {
  const int n = inst.n;
  std::vector<std::vector<Option>> opts(std::size_t(1) << n);
  for (std::size_t mask = 1; mask < opts.size(); ++mask) {
    std::vector<int> reqs;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) reqs.push_back(i + 1);
    std::vector<Option> all;
    for (const auto& seq : feasible_sequences(inst, reqs)) {
      MmrResult r = mmr_schedule(inst, seq);
      if (r.status != ScheduleStatus::Optimal) continue;
      all.push_back({r.route.cost, r.hbar, r.route});
    }
    std::sort(all.begin(), all.end(), [](const Option& a, const Option& b) {
      return a.cost != b.cost ? a.cost < b.cost : a.measure < b.measure;
    });
    for (auto& o : all) {
      if (!opts[mask].empty() && opts[mask].back().measure <= o.measure + 1e-12) continue;
      opts[mask].push_back(std::move(o));
    }
  }
  return opts;
}

// Calls f(blocks) for every partition of {0..n-1} into at most K non-empty blocks (as masks).
void for_each_partition(int n, int K, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> blocks;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      f(blocks);
      return;
    }
    for (std::size_t k = 0; k < blocks.size(); ++k) {  // recursion may grow the vector
      blocks[k] |= std::size_t(1) << i;
      rec(i + 1);
      blocks[k] &= ~(std::size_t(1) << i);
    }
    if (static_cast<int>(blocks.size()) < K) {
      blocks.push_back(std::size_t(1) << i);
      rec(i + 1);
      blocks.pop_back();
    }
  };
  rec(0);
}

}  // namespace

BruteResult brute_force_solve(const Instance& inst, const BruteOptions& opt) {
  if (inst.n > opt.max_n) throw ValidationError("brute force limited to n <= " + std::to_string(opt.max_n));
  const auto opts = subset_options(inst);
  BruteResult best;
  std::vector<const Option*> pick;
  for_each_partition(inst.n, inst.fleet, [&](const std::vector<std::size_t>& blocks) {
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t b, double cost, double meas) {
      if (cost > opt.eps_cost + 1e-9) return;
      const double value = opt.objective == Objective::Cost ? cost : meas;
      if (best.feasible && value >= best.value - 1e-12) return;  // both objectives only grow
      if (b == blocks.size()) {
        best.feasible = true;
        best.value = value;
        best.cost = cost;
        best.measure = meas;
        best.routes.clear();
        for (const Option* o : pick) best.routes.push_back(o->route);
        return;
      }
      for (const Option& o : opts[blocks[b]]) {
        if (o.measure > opt.eps_risk + 1e-9) continue;
        pick.push_back(&o);
        rec(b + 1, cost + o.cost, std::max(meas, o.measure));
        pick.pop_back();
      }
    };
    rec(0, 0.0, 0.0);
  });
  return best;
}

std::vector<std::pair<double, double>> brute_force_front(const Instance& inst, int max_n) {
  if (inst.n > max_n) throw ValidationError("brute force limited to n <= " + std::to_string(max_n));
  const auto opts = subset_options(inst);
  std::vector<std::pair<double, double>> pts;
  for_each_partition(inst.n, inst.fleet, [&](const std::vector<std::size_t>& blocks) {
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t b, double cost, double meas) {
      if (b == blocks.size()) {
        pts.emplace_back(cost, meas);
        return;
      }
      for (const Option& o : opts[blocks[b]]) rec(b + 1, cost + o.cost, std::max(meas, o.measure));
    };
    rec(0, 0.0, 0.0);
  });
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> front;
  for (const auto& p : pts) {
    if (!front.empty() && front.back().second <= p.second + 1e-9) continue;
    if (!front.empty() && std::abs(front.back().first - p.first) <= 1e-9) continue;
    front.push_back(p);
  }
  return front;
}

}  // namespace rdarp
