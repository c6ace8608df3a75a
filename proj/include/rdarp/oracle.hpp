#pragma once

#include <string>
#include <vector>

#include "rdarp/instance.hpp"

namespace rdarp {

// A trip with its schedule. H is indexed by request 1..n (0 when not covered).
struct Route {
  std::vector<int> seq;   // 0, ..., 2n+1
  std::vector<double> A;  // start of service per position of seq
  double cost = 0.0;
  std::vector<double> H;
  double Q = 0.0;  // cumulative risk at the destination depot
};

// Requests covered by a sequence, in pick-up order.
std::vector<int> requests_of(const Instance& inst, const std::vector<int>& seq);
double route_cost(const Instance& inst, const std::vector<int>& seq);
// Max over covered requests of H_i (RDARP) or H_i / dw_i (EDARP detour rate).
double route_measure(const Instance& inst, const Route& r);

struct Violation {
  int node;
  std::string what;
  double lhs, rhs;  // violated inequality lhs <= rhs
};

struct ExposureBreakdown {
  std::vector<double> R;  // onboard risk after service, per position
  std::vector<double> Q;  // cumulative risk at arrival, per position
  std::vector<double> H;  // per request 1..n
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the full route constraint set and recomputes exposures from the schedule.
// When route.H is non-empty it must match the recomputed values to 1e-6.
ExposureBreakdown validate_route(const Instance& inst, const Route& route);

// Exposure of each request from pairwise co-ride overlaps (travel, service and waiting).
std::vector<double> overlap_exposure(const Instance& inst, const std::vector<int>& seq, const std::vector<double>& A);

enum class ScheduleStatus { Optimal, Infeasible, NumericalFailure };

struct MmrOptions {
  // Second stage: among schedules attaining the min-max value, minimise sum_i weight_i * H_i.
  // Empty or all-zero means plain sum of H_i.
  std::vector<double> stage2_weight;
  bool second_stage = true;
};

struct MmrResult {
  ScheduleStatus status = ScheduleStatus::Infeasible;
  Route route;
  double hbar = 0.0;  // min over schedules of route_measure
};

// Min-max exposure schedule for a fixed node sequence (route-level Q cap included).
MmrResult mmr_schedule(const Instance& inst, const std::vector<int>& seq, const MmrOptions& opt = {});

// Time/ride/capacity feasibility of a (possibly partial) node path, ignoring risk.
// For partial paths only constraints among the listed nodes are imposed.
bool path_feasible(const Instance& inst, const std::vector<int>& nodes);

// All precedence-feasible full sequences over the given requests that pass path_feasible.
std::vector<std::vector<int>> feasible_sequences(const Instance& inst, const std::vector<int>& requests);

enum class Objective { Cost, Risk };

struct BruteOptions {
  Objective objective = Objective::Cost;
  double eps_risk = kInf;  // cap on the route measure (H-bar, or detour rate in EDARP)
  double eps_cost = kInf;
  int max_n = 5;
};

struct BruteResult {
  bool feasible = false;
  double value = 0.0;
  double cost = 0.0;
  double measure = 0.0;
  std::vector<Route> routes;
};

// Exhaustive optimum over all request partitions into at most K routes.
BruteResult brute_force_solve(const Instance& inst, const BruteOptions& opt);

// All non-dominated (cost, measure) pairs of the bi-objective problem.
std::vector<std::pair<double, double>> brute_force_front(const Instance& inst, int max_n = 5);

}  // namespace rdarp
