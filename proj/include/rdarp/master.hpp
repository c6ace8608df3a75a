#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rdarp/instance.hpp"
#include "rdarp/lp.hpp"
#include "rdarp/oracle.hpp"
#include "rdarp/pricing.hpp"

namespace rdarp {

// A linear row over arc usage: the coefficient of a column is sum over its arcs of coef(i, j).
// Vehicle-count, node-set outflow, arc-flow branching rows and all cut families take this form.
struct ArcRow {
  std::string kind;
  std::map<std::pair<int, int>, double> coef;
  Sense sense = Sense::LE;
  double rhs = 0.0;
  std::vector<int> nodes;  // defining set or path, for reporting and deduplication

  double coefficient(const std::vector<int>& seq) const;
  std::string key() const;
};

ArcRow outflow_row(const Instance& inst, std::string kind, const std::vector<int>& set, Sense sense, double rhs);
ArcRow path_row(std::string kind, const std::vector<int>& path, Sense sense, double rhs);
ArcRow vehicle_row(const Instance& inst, Sense sense, double rhs);

struct PoolColumn {
  Route route;
  double measure = 0.0;
  std::vector<int> reqs;
};

// Columns keyed by sequence and exposure vector; every insertion is re-validated by the oracle.
class ColumnPool {
 public:
  explicit ColumnPool(const Instance& inst, bool audit = false) : inst_(&inst), audit_(audit) {}
  // Index of the new column, -1 for a duplicate. Throws std::logic_error for an invalid route.
  int add(const Route& r);
  std::size_t size() const { return cols_.size(); }
  const PoolColumn& operator[](std::size_t k) const { return cols_[k]; }
  const std::vector<PoolColumn>& columns() const { return cols_; }

  struct Audit {
    std::size_t validated = 0, invalid = 0, mmr_checked = 0, mmr_mismatch = 0;
    double worst_mmr_gap = 0.0;
  };
  const Audit& audit() const { return audit_stats_; }

 private:
  const Instance* inst_;
  bool audit_;
  std::vector<PoolColumn> cols_;
  std::map<std::pair<std::vector<int>, std::vector<long long>>, int> index_;
  Audit audit_stats_;
};

// Which member of the epsilon-constraint pair: P_cost(eps_risk) or P_risk(eps_cost).
struct MasterProblem {
  Objective objective = Objective::Cost;
  double eps_risk = kInf;  // P_cost: cap on every request's measure (H, or H/dw in EDARP)
  double eps_cost = kInf;  // P_risk: cap on total cost
};

struct RlmpIndex {
  std::vector<int> lambda;  // per pool column, variable index
  std::vector<int> artificial;
  int hbar = -1;
  std::vector<int> partition_row;  // per request 1..n
  int fleet_row = -1;
  std::vector<int> risk_row;  // per request 1..n, -1 when absent
  int cost_row = -1;
  std::vector<int> arc_row;  // per ArcRow
};

// Artificial cost keeping every restricted master feasible.
double big_m(const Instance& inst);

LinearModel build_rlmp(const Instance& inst, const ColumnPool& pool, const MasterProblem& mp,
                       const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden, RlmpIndex& idx);

// Per-request detour-rate rows sum_r (H_ir / dw_i) lambda_r <= eps_dt, or <= Dbar when dbar_var >= 0.
void add_edarp_constraints(LinearModel& model, const Instance& inst, const ColumnPool& pool,
                           const std::vector<int>& lambda, double eps_dt, int dbar_var, std::vector<int>& rows_out);

struct MasterSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> lambda;  // per pool column
  double artificial = 0.0;     // total artificial activity
  double vehicles = 0.0;
  DualValues duals;
  std::vector<double> row_duals;  // per ArcRow
};

MasterSolution solve_rlmp(const Instance& inst, const ColumnPool& pool, const MasterProblem& mp,
                          const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden);

// Arc flows x_ij = sum_r beta_ij,r lambda_r over the columns with positive value.
std::map<std::pair<int, int>, double> arc_flows(const ColumnPool& pool, const std::vector<double>& lambda);

struct CgOptions {
  bool heuristic = true;
  int limit = 200;
  double deadline = kInf;  // steady-clock seconds
};

struct CgStats {
  int iterations = 0;
  int columns_added = 0;
  double t_master = 0.0, t_pricing = 0.0;
};

struct CgResult {
  MasterSolution sol;
  bool infeasible = false;  // artificials positive with pricing exhausted
  bool truncated = false;   // deadline hit before convergence
  double bound = 0.0;
};

// Single-request round trips; false when some request cannot be served at all.
bool seed_pool(const Instance& inst, ColumnPool& pool, SinkEvaluator& sink);

CgResult column_generation(const Instance& inst, ColumnPool& pool, SinkEvaluator& sink, const MasterProblem& mp,
                           const std::vector<ArcRow>& rows, const std::vector<std::uint8_t>& forbidden,
                           const CgOptions& opt, CgStats& stats);

struct ParetoPoint {
  double epsilon_risk = kInf;
  double cost = 0.0;
  double max_risk = 0.0;
  std::vector<Route> routes;
  double t_master = 0.0, t_pricing = 0.0;
  bool exact = true;
};

struct ParetoOptions;  // in bcp.hpp
std::vector<ParetoPoint> pareto_front(const Instance& inst, double step, const ParetoOptions& opt);
std::string pareto_csv(const std::vector<ParetoPoint>& front);

}  // namespace rdarp
