#include <cmath>
#include <cstdio>

#include "rdarp/bcp.hpp"

namespace rdarp {

std::vector<ParetoPoint> pareto_front(const Instance& inst, double step, const ParetoOptions& opt) {
  if (!(step > 0)) throw std::invalid_argument("pareto step must be positive");
  std::vector<ParetoPoint> front;
  double eps = kInf;
  for (;;) {
    SolveOptions cost = opt.base;
    cost.objective = Objective::Cost;
    cost.eps_risk = eps;
    cost.eps_cost = kInf;
    cost.time_limit = opt.time_limit;
    const SolveReport rc = solve(inst, cost);
    if (rc.status == SolveStatus::Infeasible || !std::isfinite(rc.objective)) break;

    SolveOptions risk = opt.base;
    risk.objective = Objective::Risk;
    risk.eps_risk = kInf;
    risk.eps_cost = rc.objective + 1e-6;
    risk.time_limit = opt.time_limit;
    const SolveReport rr = solve(inst, risk);

    ParetoPoint p;
    p.epsilon_risk = eps;
    p.exact = rc.status == SolveStatus::Optimal && rr.status == SolveStatus::Optimal;
    p.t_master = rc.t_master + rr.t_master;
    p.t_pricing = rc.t_pricing + rr.t_pricing;
    const SolveReport& pick = std::isfinite(rr.objective) ? rr : rc;
    p.routes = pick.routes;
    p.cost = pick.cost;
    p.max_risk = pick.max_risk;
    front.push_back(std::move(p));
    if (!std::isfinite(rr.objective) || front.back().max_risk <= 0.0) break;
    eps = front.back().max_risk - step;
    if (eps < 0) break;
  }
  return front;
}

std::string pareto_csv(const std::vector<ParetoPoint>& front) {
  std::string out = "epsilon_risk,cost,max_risk,n_routes,t_master_s,t_pricing_s\n";
  char buf[256];
  for (const auto& p : front) {
    if (!p.exact) continue;
    char eps[64];
    if (std::isfinite(p.epsilon_risk))
      std::snprintf(eps, sizeof eps, "%.6f", p.epsilon_risk);
    else
      std::snprintf(eps, sizeof eps, "inf");
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%zu,%.3f,%.3f\n", eps, p.cost, p.max_risk, p.routes.size(), p.t_master,
                  p.t_pricing);
    out += buf;
  }
  return out;
}

}  // namespace rdarp
