#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdarp/cuts.hpp"
#include "rdarp/master.hpp"

namespace rdarp {

struct CutSelection {
  bool ipec = true;  // plain and strengthened tournament rows
  bool two_path = true;
  bool rounded_capacity = true;
  bool any() const { return ipec || two_path || rounded_capacity; }
};

struct SolveOptions {
  Objective objective = Objective::Cost;
  double eps_risk = kInf;  // P_cost cap on the route measure (detour rate in EDARP)
  double eps_cost = kInf;  // P_risk cap on total cost
  double time_limit = kInf;  // seconds
  CutSelection cuts;
  int max_cut_rounds = 20;
  bool heuristic_pricing = true;
  int pricing_limit = 200;
  bool audit = false;  // re-solve every column's schedule with the MMR oracle
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };
const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<Route> routes;
  double objective = kInf;  // cost (P_cost) or max measure (P_risk); kInf without incumbent
  double bound = -kInf;
  double gap = kInf;
  double cost = 0.0, max_risk = 0.0;  // of the incumbent
  int nodes = 0;
  std::size_t columns = 0;
  std::map<std::string, int> cuts;
  double root_bound = -kInf, root_bound_no_cuts = -kInf;
  double t_master = 0.0, t_pricing = 0.0, t_total = 0.0;
  bool arc_fallback = false;   // single-arc branching was needed
  bool uncertified = false;    // a node could not be branched on
  ColumnPool::Audit audit;
  std::vector<Route> columns_emitted;  // filled when auditing
};

// Branching decision at a node; `forbid` set means x_ij <= 0 on that arc.
struct BranchRule {
  ArcRow row;
  bool forbid = false;
  std::pair<int, int> arc{-1, -1};
};

// Children of a fractional node, empty when the solution is integral per sequence.
std::vector<BranchRule> choose_branch(const Instance& inst, const ColumnPool& pool, const MasterSolution& sol,
                                      bool& arc_fallback);

// Sum of lambda per distinct sequence.
std::map<std::vector<int>, double> sequence_values(const ColumnPool& pool, const std::vector<double>& lambda);
bool integral_solution(const ColumnPool& pool, const std::vector<double>& lambda);

SolveReport solve(const Instance& inst, const SolveOptions& opt);

// Solution document with status, objective, bound, gap, routes and statistics.
std::string solution_json(const Instance& inst, const SolveReport& rep);

// Routes from a solution document (sequence and schedule; exposures are recomputed).
std::vector<Route> routes_from_json(const Instance& inst, const std::string& text);

struct ParetoOptions {
  SolveOptions base;
  double time_limit = kInf;  // per point
};

}  // namespace rdarp
