#include "rdarp/pricing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "rdarp/lp.hpp"

namespace rdarp {

namespace {

constexpr double kTol = 1e-9;
constexpr double kNeg = -1e-6;

Extension reject(RejectStage stage, std::string why, double value, double limit) {
  Extension e;
  e.stage = stage;
  e.reason = std::move(why);
  e.value = value;
  e.limit = limit;
  return e;
}

// Piecewise-linear exposure increase of an associated request when its co-riders are delayed by delta.
struct AssocCurve {
  double base;                                    // h^i
  std::vector<std::pair<double, double>> pieces;  // (end of segment, slope), starting after d^i
  double start;                                   // d^i
  double eval(double delta) const {
    double v = base, x = start;
    for (const auto& [end, slope] : pieces) {
      if (delta <= x) break;
      const double hi = std::min(delta, end);
      if (hi > x) v += slope * (hi - x);
      x = std::max(x, end);
    }
    return v;
  }
  double increase(double delta) const { return eval(delta) - base; }
};

// Breakpoints are the buffers of co-riders picked up while the request was aboard; each slope is the
// risk aboard when that co-rider boarded, less the request's own.
AssocCurve assoc_curve(const Instance& inst, const Label& l, const AssocState& a) {
  const double virt = inst.edarp() ? 1.0 : 0.0;
  AssocCurve g{a.h, {}, a.d};
  std::vector<const OpenState*> co;
  for (const auto& o : l.O)
    if (o.pos > a.pos && o.pos < a.drop_pos) co.push_back(&o);
  std::sort(co.begin(), co.end(), [](const OpenState* x, const OpenState* y) {
    return std::tie(x->d, x->pos) < std::tie(y->d, y->pos);
  });
  for (const OpenState* o : co) {
    double rsum = virt;
    for (const auto& p : l.O)
      if (p.pos < o->pos) rsum += inst.risk[p.req];
    for (const auto& p : l.Oa)
      if (p.pos < o->pos && o->pos < p.drop_pos) rsum += inst.risk[p.req];
    g.pieces.emplace_back(o->d, rsum - inst.risk[a.req]);
  }
  return g;
}

}  // namespace

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

DualValues DualValues::zero(const Instance& inst) {
  DualValues d;
  d.pi.assign(inst.n + 1, 0.0);
  d.rho.assign(inst.n + 1, 0.0);
  return d;
}

double risk_weight(const Instance& inst, int i) {
  return inst.edarp() ? 1.0 / inst.detour_weight[i] : 1.0;
}

double arc_reduced_cost(const Instance& inst, const DualValues& duals, int i, int j, Objective mode) {
  if (!inst.arc_ok(i, j)) throw std::logic_error("reduced cost of an eliminated arc");
  double c = mode == Objective::Cost ? inst.t(i, j) : -duals.xi * inst.t(i, j);
  if (inst.is_pickup(i)) c -= duals.pi[i];
  if (!duals.arc.empty()) c -= duals.arc[static_cast<std::size_t>(i) * inst.nodes() + j];
  return c;
}

const OpenState* Label::open(int req) const {
  for (const auto& o : O)
    if (o.req == req) return &o;
  return nullptr;
}

PricingContext::PricingContext(const Instance& in, DualValues d, Objective m)
    : inst(&in), duals(std::move(d)), mode(m) {
  const int N = in.nodes();
  if (in.n > kMaxRequests) throw std::invalid_argument("too many requests for the pricing label");
  if (duals.pi.empty()) duals.pi.assign(in.n + 1, 0.0);
  rc.assign(static_cast<std::size_t>(N) * N, kInf);
  sp.assign(static_cast<std::size_t>(N) * N, kInf);
  min_in.assign(N, kInf);
  for (int i = 0; i < N; ++i) {
    sp[static_cast<std::size_t>(i) * N + i] = 0.0;
    for (int j = 0; j < N; ++j) {
      if (!in.arc_ok(i, j)) continue;
      const double c = arc_reduced_cost(in, duals, i, j, mode);
      rc[static_cast<std::size_t>(i) * N + j] = c;
      sp[static_cast<std::size_t>(i) * N + j] = in.service[i] + in.t(i, j);
    }
  }
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i) {
      const double ik = sp[static_cast<std::size_t>(i) * N + k];
      if (ik == kInf) continue;
      for (int j = 0; j < N; ++j) {
        double& ij = sp[static_cast<std::size_t>(i) * N + j];
        ij = std::min(ij, ik + sp[static_cast<std::size_t>(k) * N + j]);
      }
    }
  double qmax_bound = in.edarp() ? in.horizon() : 0.0;
  for (int i = 1; i <= in.n; ++i) {
    qmax_bound += in.risk[i] * in.max_ride[i];
    if (duals.rho_of(i) != 0.0) risk_active = true;
  }
  if (std::isfinite(in.q_max) && qmax_bound > in.q_max) risk_active = true;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (rc[static_cast<std::size_t>(i) * N + j] != kInf) min_in[j] = std::min(min_in[j], arc_rc(i, j));
}

bool PricingContext::arc_usable(int i, int j) const {
  if (rc[static_cast<std::size_t>(i) * inst->nodes() + j] == kInf) return false;
  return forbidden.empty() || !forbidden[static_cast<std::size_t>(i) * inst->nodes() + j];
}

Label initial_label(const PricingContext& ctx) {
  const Instance& inst = *ctx.inst;
  Label l;
  l.node = 0;
  l.A = inst.early[0];
  l.B = inst.late[0];
  l.R = inst.edarp() ? 1.0 : 0.0;
  return l;
}

Calibration calibrate_risk(const PricingContext& ctx, const Label& l, int j, double A_next, double B_next,
                           const std::vector<OpenState>& opens_next) {
  const Instance& inst = *ctx.inst;
  const int eta = l.node;
  const double travel = inst.service[eta] + inst.t(eta, j);
  const double virt = inst.edarp() ? 1.0 : 0.0;  // the ever-onboard rider of the equitable variant
  Calibration c;
  c.dw = std::max(0.0, A_next - (l.A + travel));
  const double slack = std::max(0.0, l.B - l.A);
  std::map<int, double> buf;
  for (const auto& o : l.O) buf[o.req] = std::min(o.d, slack);
  for (const auto& a : l.Oa) buf[a.req] = std::min(a.d, slack);

  auto full = [&](int req) { return std::min(c.dw, buf[req]); };
  if (l.Oa.empty() || l.O.empty()) {
    c.which = Calibration::NoAssoc;
    for (const auto& o : l.O) c.delta[o.req] = full(o.req);
  } else {
    // F: largest open exposure after the arc as a function of the delay
    double span = A_next - l.A;
    auto F = [&](double delta) {
      double best = -kInf;
      double total = virt;
      for (const auto& o : l.O) total += inst.risk[o.req];
      for (const auto& o : l.O)
        best = std::max(best, o.h + (total - inst.risk[o.req]) * (span - std::min(delta, c.dw)));
      return best;
    };
    // G: largest associated exposure
    std::vector<AssocCurve> curves;
    for (const auto& a : l.Oa) {
      curves.push_back(assoc_curve(inst, l, a));
    }
    auto G = [&](double delta) {
      double best = -kInf;
      for (const auto& g : curves) best = std::max(best, g.eval(delta));
      return best;
    };
    double maxbuf = 0.0;
    for (const auto& o : l.O) maxbuf = std::max(maxbuf, buf[o.req]);
    if (F(0.0) <= G(0.0) + kTol) {
      c.which = Calibration::NoDelay;
      for (const auto& o : l.O) c.delta[o.req] = 0.0;
      for (const auto& a : l.Oa) c.delta[a.req] = 0.0;
    } else if (F(maxbuf) >= G(maxbuf) - kTol) {
      c.which = Calibration::MaxDelay;
      c.delta_star = maxbuf;
      for (const auto& o : l.O) c.delta[o.req] = full(o.req);
      for (const auto& a : l.Oa) c.delta[a.req] = full(a.req);
    } else {
      c.which = Calibration::Partial;
      std::vector<double> pts{0.0, maxbuf, c.dw};
      for (const auto& g : curves) {
        pts.push_back(g.start);
        for (const auto& pc : g.pieces) pts.push_back(pc.first);
      }
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
      double lo = 0.0, hi = maxbuf;
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        if (pts[k] < 0.0 || pts[k + 1] > maxbuf) continue;
        if (F(pts[k + 1]) - G(pts[k + 1]) <= 0.0) {
          lo = pts[k], hi = pts[k + 1];
          break;
        }
      }
      // F - G is non-increasing; on a bracketing segment both sides are linear except at
      // crossings of their own pieces, so regula falsi terminates after a few steps.
      double x = lo;
      for (int it = 0; it < 60; ++it) {
        const double fl = F(lo) - G(lo), fh = F(hi) - G(hi);
        x = fl == fh ? lo : lo + (hi - lo) * fl / (fl - fh);
        const double fx = F(x) - G(x);
        if (std::abs(fx) <= 1e-12 || hi - lo <= 1e-12) break;
        if (fx > 0) lo = x;
        else hi = x;
      }
      c.delta_star = x;
      for (const auto& o : l.O) c.delta[o.req] = std::min(full(o.req), x);
      for (const auto& a : l.Oa) c.delta[a.req] = std::min(full(a.req), x);
    }
  }
  for (const auto& o : l.O) c.onboard[o.req] = travel + c.dw - c.delta[o.req];
  for (const auto& o : l.O) {
    double bo = o.Bo;
    for (const auto& p : opens_next)
      if (p.req == o.req) bo = p.Bo;
    c.d[o.req] = std::max(0.0, std::min(o.d - c.delta[o.req], bo - A_next));
  }
  for (const auto& a : l.Oa) c.d[a.req] = std::max(0.0, a.d - c.delta[a.req]);
  if (inst.is_pickup(j)) c.d[j] = std::max(0.0, B_next - A_next);
  return c;
}

Extension extend_label(const PricingContext& ctx, const Label& l, int j) {
  const Instance& inst = *ctx.inst;
  const int eta = l.node, n = inst.n;
  if (j < 0 || j >= inst.nodes() || !ctx.arc_usable(eta, j)) return reject(RejectStage::Pdptw, "arc", eta, j);
  int dropped = -1;
  if (inst.is_pickup(j) && (l.V.test(j) || l.open(j)))
    return reject(RejectStage::Pdptw, "visited", j, 0);
  if (inst.is_delivery(j)) {
    dropped = j - n;
    if (!l.open(dropped)) return reject(RejectStage::Pdptw, "precedence", j, 0);
  }
  if (j == inst.sink() && !l.O.empty()) return reject(RejectStage::Pdptw, "open requests", l.O.size(), 0);

  const double travel = inst.service[eta] + inst.t(eta, j);
  const double A = std::max(l.A + travel, inst.early[j]);
  if (A > inst.late[j] + kTol) return reject(RejectStage::Pdptw, "time window", A, inst.late[j]);
  const int W = l.W + inst.load[j];
  if (W > inst.capacity) return reject(RejectStage::Pdptw, "capacity", W, inst.capacity);

  // dynamic time windows for the maximum ride times
  double B = inst.late[j];
  if (dropped > 0) B = std::min(B, l.open(dropped)->DB);
  if (A > B + kTol) return reject(RejectStage::Darp, "latest start", A, B);
  std::vector<OpenState> opens;
  opens.reserve(l.O.size() + 1);
  for (const auto& o : l.O) {
    OpenState p = o;
    p.Bo = std::max(A, std::min(o.Bo + travel, B));
    p.DA = o.DA + std::min(A - travel - l.A, o.Bo - l.A);
    p.DB = o.DB - std::max(0.0, o.Bo + travel - B);
    opens.push_back(p);
  }
  if (inst.is_pickup(j)) {
    OpenState p{};
    p.req = j;
    p.pos = l.depth + 1;
    // a breakpoint below A would shrink DA on later waits; the drop-off window is flat from A then
    p.Bo = std::max(A, std::min(B, inst.late[j + n] - inst.service[j] - inst.max_ride[j]));
    p.DA = std::min(A + inst.service[j] + inst.max_ride[j], inst.late[j + n]);
    p.DB = std::min(p.Bo + inst.service[j] + inst.max_ride[j], inst.late[j + n]);
    opens.push_back(p);
  }
  // D(t) - t is largest at t = A, so DA bounds every drop-off reachable from here
  for (const auto& p : opens) {
    const double reach = p.req == dropped ? A : A + ctx.shortest(j, p.req + n);
    const double latest = std::min(p.DA, inst.late[p.req + n]);
    if (reach > latest + kTol)
      return reject(RejectStage::Darp, p.req == dropped ? "ride time" : "drop-off unreachable", reach, latest);
  }

  // cumulative risk: the bound drops all waiting, so it never exceeds the true value
  const double Q_lb = l.Q_lb + l.R * travel;
  if (Q_lb > inst.q_max + kTol) return reject(RejectStage::Risk, "cumulative risk", Q_lb, inst.q_max);
  const double cost = l.cost + inst.t(eta, j);
  if (ctx.mode == Objective::Risk && cost > ctx.eps_cost + 1e-6)
    return reject(RejectStage::Bound, "cost cap", cost, ctx.eps_cost);

  const Calibration cal = calibrate_risk(ctx, l, j, A, B, opens);
  const double virt = inst.edarp() ? 1.0 : 0.0;

  Extension e;
  Label& nl = e.label;
  nl.node = j;
  nl.depth = l.depth + 1;
  nl.A = A;
  nl.B = B;
  nl.W = W;
  nl.V = l.V;
  if (inst.is_pickup(j)) nl.V.set(j);
  nl.R = l.R + inst.risk[j];
  nl.Q_lb = Q_lb;
  nl.cost = cost;
  nl.c_lb = l.c_lb + ctx.arc_rc(eta, j);

  double Q = l.Q + virt * (travel + cal.dw);
  for (const auto& o : l.O) Q += inst.risk[o.req] * cal.onboard.at(o.req);
  for (const auto& a : l.Oa) Q += inst.risk[a.req] * cal.delta.at(a.req);
  nl.Q = Q;

  double risk_term = 0.0;
  std::vector<OpenState> next_open;
  for (std::size_t k = 0; k < l.O.size(); ++k) {
    const OpenState& o = l.O[k];
    double dh = virt * cal.onboard.at(o.req);
    for (const auto& p : l.O) {
      if (p.req == o.req) continue;
      dh += inst.risk[p.req] * (p.pos < o.pos ? cal.onboard.at(o.req) : cal.onboard.at(p.req));
    }
    risk_term -= ctx.duals.rho_of(o.req) * risk_weight(inst, o.req) * dh;
    OpenState p = opens[k];
    p.h = o.h + dh;
    p.d = cal.d.at(o.req);
    if (o.req != dropped) next_open.push_back(p);
    else if (l.O.size() > 1) nl.Oa.push_back({o.req, o.pos, nl.depth, p.d, p.h});
  }
  if (inst.is_pickup(j)) {
    OpenState p = opens.back();
    p.h = 0.0;
    p.d = cal.d.at(j);
    next_open.push_back(p);
  }
  std::vector<AssocState> assoc;
  for (const auto& a : l.Oa) {
    const double dh = assoc_curve(inst, l, a).increase(cal.delta.at(a.req));
    risk_term -= ctx.duals.rho_of(a.req) * risk_weight(inst, a.req) * dh;
    assoc.push_back({a.req, a.pos, a.drop_pos, cal.d.at(a.req), a.h + dh});
  }
  nl.O = std::move(next_open);
  if (nl.O.empty()) {
    nl.Oa.clear();
  } else {
    auto dropped_assoc = std::move(nl.Oa);
    nl.Oa = std::move(assoc);
    for (auto& a : dropped_assoc) nl.Oa.push_back(a);
  }
  nl.c_tilde = l.c_tilde + ctx.arc_rc(eta, j) + risk_term;
  return e;
}

bool dominates(const Label& l1, const Label& l2, DominanceMode mode) {
  if (mode == DominanceMode::None || l1.node != l2.node) return false;
  if (l1.A > l2.A + kTol || l1.W > l2.W || l1.c_tilde > l2.c_tilde + kTol || l1.c_lb > l2.c_lb + kTol) return false;
  if (mode == DominanceMode::Full) {
    if (l1.O.size() != l2.O.size()) return false;
    if ((l1.V & ~l2.V).any()) return false;
  } else {
    if (l1.Q > l2.Q + kTol || l1.Q_lb > l2.Q_lb + kTol) return false;
  }
  for (const auto& o1 : l1.O) {
    const OpenState* o2 = l2.open(o1.req);
    if (!o2) return false;
    if (o1.DA - l1.A < o2->DA - l2.A - kTol || o1.DB < o2->DB - kTol) return false;
    if (mode == DominanceMode::Weak && o1.d < o2->d - kTol) return false;
  }
  if (mode == DominanceMode::Weak) {
    for (const auto& a1 : l1.Oa) {
      auto it = std::find_if(l2.Oa.begin(), l2.Oa.end(), [&](const AssocState& a) { return a.req == a1.req; });
      if (it == l2.Oa.end() || a1.d < it->d - kTol) return false;
    }
  }
  return true;
}

bool SinkEvaluator::evaluate(const std::vector<int>& seq, const std::vector<double>& weight, Route& out,
                             double& hbar) {
  const Instance& inst = *inst_;
  const int m = static_cast<int>(seq.size());
  std::vector<int> pick(inst.n + 1, -1), drop(inst.n + 1, -1);
  for (int k = 0; k < m; ++k) {
    if (inst.is_pickup(seq[k])) pick[seq[k]] = k;
    if (inst.is_delivery(seq[k])) drop[seq[k] - inst.n] = k;
  }
  // onboard risk on the leg leaving position k
  std::vector<double> Rk(m, 0.0);
  double R = inst.edarp() ? 1.0 : 0.0;
  for (int k = 0; k < m; ++k) Rk[k] = R += inst.risk[seq[k]];

  LinearModel lp;
  for (int k = 0; k < m; ++k) lp.add_var("A" + std::to_string(k), inst.early[seq[k]], inst.late[seq[k]], 0.0);
  const int hv = lp.add_var("Hbar", 0.0, kInf, 1.0);
  for (int k = 0; k + 1 < m; ++k)
    lp.add_row("leg" + std::to_string(k), {{k + 1, 1.0}, {k, -1.0}}, Sense::GE,
               inst.service[seq[k]] + inst.t(seq[k], seq[k + 1]));
  std::vector<int> reqs;
  std::vector<std::vector<double>> form(inst.n + 1);
  for (int i = 1; i <= inst.n; ++i) {
    if (pick[i] < 0) continue;
    reqs.push_back(i);
    const int p = pick[i], q = drop[i];
    lp.add_row("ride" + std::to_string(i), {{q, 1.0}, {p, -1.0}}, Sense::LE, inst.service[i] + inst.max_ride[i]);
    lp.add_row("min_ride" + std::to_string(i), {{q, 1.0}, {p, -1.0}}, Sense::GE,
               inst.service[i] + inst.t(i, i + inst.n));
    std::vector<double>& f = form[i];
    f.assign(m, 0.0);
    for (int k = p; k < q; ++k) {
      const double c = Rk[k] - inst.risk[i];
      f[k + 1] += c;
      f[k] -= c;
    }
    std::vector<std::pair<int, double>> row;
    const double w = risk_weight(inst, i);
    for (int k = 0; k < m; ++k)
      if (f[k] != 0.0) row.emplace_back(k, w * f[k]);
    row.emplace_back(hv, -1.0);
    lp.add_row("measure" + std::to_string(i), row, Sense::LE, 0.0);
  }
  if (std::isfinite(inst.q_max)) {
    std::vector<double> f(m, 0.0);
    for (int k = 0; k + 1 < m; ++k) f[k + 1] += Rk[k], f[k] -= Rk[k];
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < m; ++k)
      if (f[k] != 0.0) row.emplace_back(k, f[k]);
    lp.add_row("qmax", row, Sense::LE, inst.q_max);
  }

  LpSolution sol;
  auto it = cache_.find(seq);
  if (it == cache_.end()) {
    ++lp_solves_;
    sol = solve_lp(lp);
    if (sol.status == LpStatus::NumericalFailure) throw std::runtime_error("schedule LP failed");
    it = cache_.emplace(seq, Stage1{sol.status == LpStatus::Optimal, sol.objective}).first;
  }
  if (!it->second.feasible) return false;
  const double h1 = it->second.hbar;
  {
    LinearModel lp2 = lp;
    lp2.vars[hv].obj = 0.0;
    lp2.vars[hv].ub = h1 + 1e-9 * std::max(1.0, h1);
    bool any = false;
    for (int i : reqs) any = any || (i < static_cast<int>(weight.size()) && weight[i] != 0.0);
    for (int i : reqs) {
      const double w = any ? (i < static_cast<int>(weight.size()) ? weight[i] : 0.0) : 1.0;
      for (int k = 0; k < m; ++k) lp2.vars[k].obj += w * form[i][k];
    }
    ++lp_solves_;
    LpSolution s2 = solve_lp(lp2);
    if (s2.status == LpStatus::Optimal) {
      sol = std::move(s2);
    } else if (sol.x.empty()) {
      ++lp_solves_;
      sol = solve_lp(lp);
      if (sol.status != LpStatus::Optimal) throw std::runtime_error("schedule LP failed");
    }
  }
  out = Route{};
  out.seq = seq;
  out.A.assign(sol.x.begin(), sol.x.begin() + m);
  for (int k = 0; k + 1 < m; ++k) out.cost += inst.t(seq[k], seq[k + 1]);
  out.H.assign(inst.n + 1, 0.0);
  hbar = 0.0;
  for (int i : reqs) {
    double h = 0.0;
    for (int k = 0; k < m; ++k) h += form[i][k] * out.A[k];
    out.H[i] = std::max(0.0, h);
    hbar = std::max(hbar, risk_weight(inst, i) * out.H[i]);
  }
  for (int k = 0; k + 1 < m; ++k) out.Q += Rk[k] * (out.A[k + 1] - out.A[k]);
  return true;
}

std::string trace_line(const Label& l) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "node=%d c=%.4f A=%.4f B=%.4f open=%zu Q=%.4f", l.node, l.c_tilde, l.A, l.B,
                l.O.size(), l.Q);
  return buf;
}

std::vector<Extension> replay_path(const PricingContext& ctx, const std::vector<int>& path) {
  std::vector<Extension> out;
  Label cur = initial_label(ctx);
  for (std::size_t k = 1; k < path.size(); ++k) {
    Extension e = extend_label(ctx, cur, path[k]);
    out.push_back(e);
    if (!e.ok()) break;
    cur = e.label;
  }
  return out;
}

PricingResult solve_pricing(const PricingContext& ctx, SinkEvaluator& sink, const PricingOptions& opt) {
  const Instance& inst = *ctx.inst;
  const int n = inst.n, N = inst.nodes();
  PricingResult res;
  DominanceMode dom = opt.dominance ? *opt.dominance
                      : opt.heuristic ? DominanceMode::Weak
                      : ctx.risk_active ? DominanceMode::None
                                        : DominanceMode::Full;
  std::vector<double> weight(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) weight[i] = std::abs(ctx.duals.rho_of(i)) * risk_weight(inst, i);

  std::vector<Label> labels;
  std::vector<char> alive;
  std::vector<std::vector<int>> bucket(N);
  using Entry = std::tuple<double, std::size_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  std::size_t counter = 0;
  labels.push_back(initial_label(ctx));
  alive.push_back(1);
  pq.emplace(0.0, counter++, 0);

  auto sequence = [&](const Label& last, int parent) {
    std::vector<int> seq{last.node};
    for (int p = parent; p >= 0; p = labels[p].parent) seq.push_back(labels[p].node);
    std::reverse(seq.begin(), seq.end());
    return seq;
  };

  while (!pq.empty()) {
    const int idx = std::get<2>(pq.top());
    pq.pop();
    if (!alive[idx]) continue;
    ++res.stats.popped;
    if ((opt.max_labels && res.stats.created > opt.max_labels) ||
        (std::isfinite(opt.deadline) && (res.stats.popped & 63) == 0 && now_seconds() > opt.deadline)) {
      res.complete = false;
      break;
    }
    const Label cur = labels[idx];
    for (int j = 1; j < N; ++j) {
      if (!ctx.arc_usable(cur.node, j)) continue;
      Extension e = extend_label(ctx, cur, j);
      if (!e.ok()) continue;
      Label& nl = e.label;
      nl.parent = idx;
      if (j == inst.sink()) {
        if (nl.c_lb - ctx.duals.mu >= kNeg) {
          ++res.stats.bound_pruned;
          continue;
        }
        Column col;
        double hbar = 0.0;
        if (!sink.evaluate(sequence(nl, idx), weight, col.route, hbar)) continue;
        ++res.stats.sink_lps;
        double rc = nl.c_lb - ctx.duals.mu;
        for (int i = 1; i <= n; ++i) rc -= ctx.duals.rho_of(i) * risk_weight(inst, i) * col.route.H[i];
        col.reduced_cost = rc;
        col.measure = hbar;
        res.min_reduced_cost = std::min(res.min_reduced_cost, rc);
        if (rc < kNeg) res.columns.push_back(std::move(col));
        continue;
      }
      double lb = nl.c_lb - ctx.duals.mu + ctx.min_in[inst.sink()];
      for (const auto& o : nl.O) lb += ctx.min_in[o.req + n];
      for (int i = 1; i <= n; ++i)
        if (!nl.V.test(i)) lb += std::min(0.0, ctx.min_in[i] + ctx.min_in[i + n]);
      if (lb >= kNeg) {
        ++res.stats.bound_pruned;
        continue;
      }
      bool dominated = false;
      if (dom != DominanceMode::None) {
        auto& bk = bucket[j];
        for (int other : bk)
          if (alive[other] && dominates(labels[other], nl, dom)) {
            dominated = true;
            break;
          }
        if (dominated) {
          ++res.stats.dominated;
          continue;
        }
        std::size_t keep = 0;
        for (int other : bk) {
          if (alive[other] && dominates(nl, labels[other], dom)) {
            alive[other] = 0;
            ++res.stats.dominated;
          } else if (alive[other]) {
            bk[keep++] = other;
          }
        }
        bk.resize(keep);
        bk.push_back(static_cast<int>(labels.size()));
      }
      if (opt.trace) res.trace.push_back(trace_line(nl));
      pq.emplace(nl.c_tilde, counter++, static_cast<int>(labels.size()));
      labels.push_back(std::move(nl));
      alive.push_back(1);
      ++res.stats.created;
    }
    if (opt.limit > 0 && static_cast<int>(res.columns.size()) >= opt.limit) break;
  }
  std::stable_sort(res.columns.begin(), res.columns.end(),
                   [](const Column& a, const Column& b) { return a.reduced_cost < b.reduced_cost; });
  if (opt.limit > 0 && static_cast<int>(res.columns.size()) > opt.limit) res.columns.resize(opt.limit);
  return res;
}

}  // namespace rdarp
