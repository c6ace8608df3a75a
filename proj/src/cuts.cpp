#include "rdarp/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace rdarp {

namespace {

constexpr double kSupport = 1e-6;
constexpr std::size_t kMaxCandidates = 20000;

std::vector<std::vector<std::pair<int, double>>> support_out(const Instance& inst, const ArcFlows& x) {
  std::vector<std::vector<std::pair<int, double>>> out(inst.nodes());
  for (const auto& [arc, v] : x)
    if (v > kSupport) out[arc.first].emplace_back(arc.second, v);
  return out;
}

double flow(const ArcFlows& x, int i, int j) {
  auto it = x.find({i, j});
  return it == x.end() ? 0.0 : it->second;
}

double outflow(const ArcFlows& x, const std::vector<char>& in) {
  double s = 0.0;
  for (const auto& [arc, v] : x)
    if (in[arc.first] && !in[arc.second]) s += v;
  return s;
}

bool interior(const Instance& inst, int v) { return v >= 1 && v <= 2 * inst.n; }

ArcRow tournament_row(const Instance& inst, const std::vector<int>& path) {
  ArcRow r;
  r.kind = "ipec";
  r.sense = Sense::LE;
  r.rhs = static_cast<double>(path.size()) - 2.0;
  r.nodes = path;
  for (std::size_t k = 0; k < path.size(); ++k)
    for (std::size_t l = k + 1; l < path.size(); ++l)
      if (inst.arc_ok(path[k], path[l])) r.coef[{path[k], path[l]}] = 1.0;
  return r;
}

// Connected node sets of the undirected support graph, sizes 2..max_size, over pick-ups and drop-offs.
std::vector<std::vector<int>> connected_sets(const Instance& inst, const ArcFlows& x, int max_size) {
  std::vector<std::vector<int>> nb(inst.nodes());
  for (const auto& [arc, v] : x)
    if (v > kSupport && interior(inst, arc.first) && interior(inst, arc.second)) {
      nb[arc.first].push_back(arc.second);
      nb[arc.second].push_back(arc.first);
    }
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier;
  for (int v = 1; v <= 2 * inst.n; ++v)
    if (!nb[v].empty()) frontier.push_back({v});
  std::vector<std::vector<int>> out;
  for (int size = 2; size <= max_size && !frontier.empty(); ++size) {
    std::vector<std::vector<int>> next;
    for (const auto& s : frontier) {
      for (int u : s)
        for (int w : nb[u]) {
          if (std::find(s.begin(), s.end(), w) != s.end()) continue;
          auto t = s;
          t.push_back(w);
          std::sort(t.begin(), t.end());
          if (!seen.insert(t).second) continue;
          next.push_back(t);
          out.push_back(t);
          if (out.size() >= kMaxCandidates) return out;
        }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

double row_activity(const ArcRow& row, const ArcFlows& x) {
  double s = 0.0;
  for (const auto& [arc, c] : row.coef) s += c * flow(x, arc.first, arc.second);
  return s;
}

bool block_infeasible(const Instance& inst, std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  do {
    if (path_feasible(inst, nodes)) return false;
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return true;
}

std::vector<ArcRow> separate_ipec(const Instance& inst, const ArcFlows& x, const SeparationOptions& opt) {
  const auto out = support_out(inst, x);
  std::vector<ArcRow> cuts;
  std::set<std::string> keys;
  std::vector<int> path;
  std::vector<char> on(inst.nodes(), 0);
  // gap = arcs - tournament lhs never decreases along the path (inflow of a request node is at most 1)
  std::function<void(double)> rec = [&](double lhs) {
    if (cuts.size() >= opt.max_cuts) return;
    const int u = path.back();
    if (static_cast<int>(path.size()) - 1 >= opt.max_path_arcs) return;
    for (const auto& [v, xv] : out[u]) {
      if (on[v] || !interior(inst, v)) continue;
      double add = 0.0;
      for (int p : path) add += flow(x, p, v);
      const double nl = lhs + add;
      const double arcs = static_cast<double>(path.size());
      if (arcs - nl >= 1.0 - opt.threshold) continue;
      path.push_back(v);
      on[v] = 1;
      if (!path_feasible(inst, path)) {
        if (nl > arcs - 1.0 + opt.threshold) {
          ArcRow r = tournament_row(inst, path);
          if (keys.insert(r.key()).second) cuts.push_back(std::move(r));
        }
      } else {
        rec(nl);
      }
      on[v] = 0;
      path.pop_back();
    }
  };
  // depots are excluded: several vehicles pass through them
  for (int s = 1; s <= 2 * inst.n; ++s) {
    if (out[s].empty()) continue;
    path = {s};
    on[s] = 1;
    rec(0.0);
    on[s] = 0;
  }
  return cuts;
}

std::vector<ArcRow> separate_strengthened_ipec(const Instance& inst, const ArcFlows& x,
                                               const SeparationOptions& opt) {
  const auto out = support_out(inst, x);
  std::vector<ArcRow> cuts;
  std::set<std::vector<int>> tried;
  for (int i = 1; i <= inst.n && cuts.size() < opt.max_cuts; ++i) {
    const int di = inst.delivery_of(i);
    std::vector<int> path{i};
    std::vector<char> on(inst.nodes(), 0);
    on[i] = 1;
    std::function<void()> rec = [&]() {
      if (cuts.size() >= opt.max_cuts || static_cast<int>(path.size()) > opt.max_path_arcs) return;
      for (const auto& [v, xv] : out[path.back()]) {
        if (on[v] || !interior(inst, v)) continue;
        if (v == di) {
          if (path.size() < 2) continue;
          std::vector<int> set(path.begin() + 1, path.end());
          std::sort(set.begin(), set.end());
          if (!tried.insert(set).second) continue;
          bool infeasible = true;
          auto perm = set;
          do {
            std::vector<int> p{i};
            p.insert(p.end(), perm.begin(), perm.end());
            p.push_back(di);
            if (path_feasible(inst, p)) infeasible = false;
          } while (infeasible && std::next_permutation(perm.begin(), perm.end()));
          if (!infeasible) continue;
          ArcRow r;
          r.kind = "sipec";
          r.sense = Sense::LE;
          r.rhs = static_cast<double>(set.size());
          r.nodes = {i};
          r.nodes.insert(r.nodes.end(), set.begin(), set.end());
          r.nodes.push_back(di);
          for (int a : r.nodes)
            for (int b : r.nodes)
              if (a != b && b != i && a != di && inst.arc_ok(a, b)) r.coef[{a, b}] = 1.0;
          if (row_activity(r, x) > r.rhs + opt.threshold) cuts.push_back(std::move(r));
          continue;
        }
        path.push_back(v);
        on[v] = 1;
        rec();
        on[v] = 0;
        path.pop_back();
      }
    };
    rec();
  }
  return cuts;
}

std::vector<ArcRow> separate_two_path(const Instance& inst, const ArcFlows& x, const SeparationOptions& opt) {
  std::vector<ArcRow> cuts;
  std::vector<char> in(inst.nodes(), 0);
  for (const auto& s : connected_sets(inst, x, opt.max_set_size)) {
    if (cuts.size() >= opt.max_cuts) break;
    for (int v : s) in[v] = 1;
    const double f = outflow(x, in);
    for (int v : s) in[v] = 0;
    if (f >= 2.0 - opt.threshold || !block_infeasible(inst, s)) continue;
    cuts.push_back(outflow_row(inst, "2pc", s, Sense::GE, 2.0));
  }
  return cuts;
}

double rounded_capacity_rhs(const Instance& inst, const std::vector<int>& set) {
  std::vector<char> in(inst.nodes(), 0);
  for (int v : set) in[v] = 1;
  double pred = 0.0, succ = 0.0;
  for (int v : set) {
    if (inst.is_delivery(v) && !in[v - inst.n]) pred += inst.load[v - inst.n];
    if (inst.is_pickup(v) && !in[inst.delivery_of(v)]) succ += inst.load[inst.delivery_of(v)];
  }
  const double w = std::max(1, inst.capacity);
  return std::max({1.0, std::ceil(pred / w - 1e-9), std::ceil(-succ / w - 1e-9)});
}

std::vector<ArcRow> separate_rounded_capacity(const Instance& inst, const ArcFlows& x,
                                              const SeparationOptions& opt) {
  std::vector<ArcRow> cuts;
  std::set<std::vector<int>> emitted;
  std::vector<char> in(inst.nodes(), 0);
  auto score = [&](const std::vector<int>& s) {
    for (int v : s) in[v] = 1;
    const double f = outflow(x, in);
    for (int v : s) in[v] = 0;
    return rounded_capacity_rhs(inst, s) - f;
  };
  for (int seed = 1; seed <= 2 * inst.n && cuts.size() < opt.max_cuts; ++seed) {
    std::vector<int> s{seed};
    while (static_cast<int>(s.size()) < opt.max_rc_size) {
      double best = -kInf;
      int pick = -1;
      for (int v : s)
        for (int w = 1; w <= 2 * inst.n; ++w) {
          if (std::find(s.begin(), s.end(), w) != s.end()) continue;
          if (flow(x, v, w) <= kSupport && flow(x, w, v) <= kSupport) continue;
          auto t = s;
          t.push_back(w);
          const double sc = score(t);
          if (sc > best + 1e-12 || (std::abs(sc - best) <= 1e-12 && w < pick)) best = sc, pick = w;
        }
      if (pick < 0) break;
      s.push_back(pick);
      std::sort(s.begin(), s.end());
      const double rhs = rounded_capacity_rhs(inst, s);
      if (rhs >= 2.0 && best > opt.threshold && emitted.insert(s).second)
        cuts.push_back(outflow_row(inst, "rc", s, Sense::GE, rhs));
    }
  }
  return cuts;
}

std::vector<double> fold_cut_duals(const Instance& inst, const std::vector<ArcRow>& rows,
                                   const std::vector<double>& duals) {
  if (duals.size() != rows.size()) throw std::logic_error("one dual per row required");
  const int N = inst.nodes();
  std::vector<double> table(static_cast<std::size_t>(N) * N, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y = duals[r];
    if ((rows[r].sense == Sense::LE && y > 1e-7) || (rows[r].sense == Sense::GE && y < -1e-7))
      throw std::logic_error("dual of " + rows[r].kind + " row has the wrong sign");
    for (const auto& [arc, c] : rows[r].coef) table[static_cast<std::size_t>(arc.first) * N + arc.second] += y * c;
  }
  return table;
}

bool CutPool::add(ArcRow row) {
  if (!keys_.insert(row.key()).second) return false;
  rows_.push_back(std::move(row));
  return true;
}

std::map<std::string, int> CutPool::counts() const {
  std::map<std::string, int> c;
  for (const auto& r : rows_) ++c[r.kind];
  return c;
}

}  // namespace rdarp
