#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rdarp/master.hpp"

namespace rdarp {

using ArcFlows = std::map<std::pair<int, int>, double>;

struct SeparationOptions {
  int max_path_arcs = 6;
  int max_set_size = 4;     // two-path candidates
  int max_rc_size = 8;      // rounded-capacity growth
  double threshold = 1e-4;  // minimum violation
  std::size_t max_cuts = 100;
};

// Left-hand side of a row at the aggregated arc flows.
double row_activity(const ArcRow& row, const ArcFlows& x);

// Tournament rows over support paths that no vehicle can drive consecutively:
// sum of x over forward arcs among the path nodes <= arcs - 1.
std::vector<ArcRow> separate_ipec(const Instance& inst, const ArcFlows& x, const SeparationOptions& opt = {});

// For a pick-up i and a set S such that no ordering of S fits between i and n+i:
// sum of x over arcs inside {i} + S + {n+i}, except arcs into i and out of n+i, <= |S|.
std::vector<ArcRow> separate_strengthened_ipec(const Instance& inst, const ArcFlows& x,
                                               const SeparationOptions& opt = {});

// Outflow >= 2 for node sets that cannot be visited as one consecutive block.
std::vector<ArcRow> separate_two_path(const Instance& inst, const ArcFlows& x, const SeparationOptions& opt = {});

// Outflow >= max{1, ceil(W(pred)/Wmax), ceil(-W(succ)/Wmax)}.
double rounded_capacity_rhs(const Instance& inst, const std::vector<int>& set);
std::vector<ArcRow> separate_rounded_capacity(const Instance& inst, const ArcFlows& x,
                                              const SeparationOptions& opt = {});

// True when no ordering of the nodes passes the consecutive-path feasibility test.
bool block_infeasible(const Instance& inst, std::vector<int> nodes);

// Per-arc table sum_rows dual * coef, row-major over the node count; throws std::logic_error when a
// dual has the wrong sign for its row (<= rows need dual <= 0, >= rows dual >= 0).
std::vector<double> fold_cut_duals(const Instance& inst, const std::vector<ArcRow>& rows,
                                   const std::vector<double>& duals);

// Rows deduplicated by canonical key.
class CutPool {
 public:
  bool add(ArcRow row);
  const std::vector<ArcRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  std::map<std::string, int> counts() const;

 private:
  std::vector<ArcRow> rows_;
  std::set<std::string> keys_;
};

}  // namespace rdarp
