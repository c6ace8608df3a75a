#pragma once

#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdarp/instance.hpp"
#include "rdarp/oracle.hpp"

namespace rdarp {

constexpr int kMaxRequests = 128;
using RequestSet = std::bitset<kMaxRequests + 1>;

// Duals of the restricted master. rho_i belongs to the row of request i, whose coefficients are
// H_ir (RDARP) or H_ir / dw_i (EDARP); risk_weight() converts between the two.
struct DualValues {
  std::vector<double> pi;   // per request 1..n, free
  double mu = 0.0;          // fleet row plus vehicle-count branching rows
  std::vector<double> rho;  // per request 1..n, <= 0; empty means all zero
  double xi = 0.0;          // cost-cap row of P_risk, <= 0
  std::vector<double> arc;  // folded cut and branching duals, row-major (2n+2)^2, subtracted from arc costs

  static DualValues zero(const Instance& inst);
  double rho_of(int i) const { return rho.empty() ? 0.0 : rho[i]; }
};

double risk_weight(const Instance& inst, int i);  // 1, or 1/dw_i in EDARP

double arc_reduced_cost(const Instance& inst, const DualValues& duals, int i, int j, Objective mode);

struct OpenState {
  int req;
  int pos;         // position of the pick-up in the path
  double Bo, DA, DB;  // breakpoint, latest drop-off given A, latest drop-off given Bo
  double d, h;
};

struct AssocState {
  int req;
  int pos, drop_pos;
  double d, h;
};

struct Label {
  int node = 0;
  int parent = -1;
  int depth = 0;        // position of node in the path
  double c_tilde = 0.0; // travel reduced cost plus calibrated risk term
  double c_lb = 0.0;    // travel reduced cost only (the risk term is never negative)
  double A = 0.0, B = 0.0;
  int W = 0;
  RequestSet V;
  std::vector<OpenState> O;   // ordered by pick-up position
  std::vector<AssocState> Oa;
  double R = 0.0;       // onboard risk after service at node
  double Q = 0.0;       // calibrated cumulative risk
  double Q_lb = 0.0;    // lower bound on cumulative risk (all waiting removed)
  double cost = 0.0;    // travel time so far

  const OpenState* open(int req) const;
};

enum class RejectStage { None, Pdptw, Darp, Risk, Bound };

struct Extension {
  RejectStage stage = RejectStage::None;
  std::string reason;
  double value = 0.0, limit = 0.0;
  Label label;
  bool ok() const { return stage == RejectStage::None; }
};

struct Calibration {
  double dw = 0.0;                 // waiting time on the arc
  std::map<int, double> delta;     // per open/associated request
  std::map<int, double> onboard;   // per open request, onboard duration on the arc
  std::map<int, double> d;         // updated buffers
  enum Case { NoAssoc, NoDelay, MaxDelay, Partial } which = NoAssoc;
  double delta_star = 0.0;
};

// Precomputed per-call data: arc reduced costs, shortest service+travel paths, completion bounds.
struct PricingContext {
  const Instance* inst;
  DualValues duals;
  Objective mode = Objective::Cost;
  double eps_cost = kInf;  // P_risk: routes dearer than this are never useful
  std::vector<std::uint8_t> forbidden;  // row-major; branching x_ij <= 0
  std::vector<double> rc;      // arc reduced costs
  std::vector<double> sp;      // shortest s+t path lengths
  std::vector<double> min_in;  // cheapest reduced cost entering each node
  bool risk_active = false;

  PricingContext(const Instance& inst, DualValues duals, Objective mode);
  bool arc_usable(int i, int j) const;
  double arc_rc(int i, int j) const { return rc[static_cast<std::size_t>(i) * inst->nodes() + j]; }
  double shortest(int i, int j) const { return sp[static_cast<std::size_t>(i) * inst->nodes() + j]; }
};

Label initial_label(const PricingContext& ctx);
Calibration calibrate_risk(const PricingContext& ctx, const Label& l, int j, double A_next, double B_next,
                           const std::vector<OpenState>& opens_next);
Extension extend_label(const PricingContext& ctx, const Label& l, int j);

enum class DominanceMode { None, Full, Weak };
bool dominates(const Label& l1, const Label& l2, DominanceMode mode = DominanceMode::Full);

// Schedule of a fixed sequence minimising the max measure (with the Q cap), then the weighted exposure
// sum among such schedules. Results of the first stage are cached by sequence.
class SinkEvaluator {
 public:
  explicit SinkEvaluator(const Instance& inst) : inst_(&inst) {}
  // Returns false when no schedule exists.
  bool evaluate(const std::vector<int>& seq, const std::vector<double>& weight, Route& out, double& hbar);
  std::size_t lp_solves() const { return lp_solves_; }

 private:
  struct Stage1 {
    bool feasible;
    double hbar;
  };
  const Instance* inst_;
  std::map<std::vector<int>, Stage1> cache_;
  std::size_t lp_solves_ = 0;
};

struct Column {
  Route route;
  double reduced_cost = 0.0;
  double measure = 0.0;  // max H (or detour rate)
};

struct PricingOptions {
  bool heuristic = false;
  int limit = 200;
  std::size_t max_labels = 0;  // 0: unlimited
  double deadline = kInf;      // seconds since epoch of steady clock; kInf: none
  bool trace = false;
  std::optional<DominanceMode> dominance;  // default: weak when heuristic, else full unless risk is active
};

struct PricingStats {
  std::size_t created = 0, popped = 0, dominated = 0, bound_pruned = 0, sink_lps = 0;
};

struct PricingResult {
  std::vector<Column> columns;  // reduced cost < -1e-6, best first
  double min_reduced_cost = 0.0;  // over evaluated complete routes (0 if none below)
  bool complete = true;           // false when truncated by label limit or deadline
  PricingStats stats;
  std::vector<std::string> trace;
};

PricingResult solve_pricing(const PricingContext& ctx, SinkEvaluator& sink, const PricingOptions& opt = {});

// Convenience: path labels along a fixed node sequence (for walkthroughs and tests).
std::vector<Extension> replay_path(const PricingContext& ctx, const std::vector<int>& path);

std::string trace_line(const Label& l);

double now_seconds();  // steady clock, for deadlines

}  // namespace rdarp
