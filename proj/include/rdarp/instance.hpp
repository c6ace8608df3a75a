#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdarp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Variant { RDARP, EDARP };

// Node ids: 0 origin depot, 1..n pick-ups, n+1..2n drop-offs, 2n+1 destination depot.
struct Instance {
  int n = 0;
  int fleet = 1;
  int capacity = 0;
  double q_max = kInf;
  double route_duration = kInf;  // informational; applied as depot window width
  Variant mode = Variant::RDARP;

  std::vector<double> x, y;  // empty when the matrix is given explicitly
  std::vector<double> service, risk, early, late;
  std::vector<int> load;
  std::vector<double> max_ride;       // indexed by request 1..n, slot 0 unused
  std::vector<double> detour_weight;  // EDARP only, indexed like max_ride
  std::vector<double> travel;         // row-major (2n+2)^2

  // Filled by preprocess(); empty means only structural arcs are excluded.
  std::vector<std::uint8_t> arc_removed;
  bool triangle_ok = false;

  int nodes() const { return 2 * n + 2; }
  int sink() const { return 2 * n + 1; }
  bool is_pickup(int v) const { return v >= 1 && v <= n; }
  bool is_delivery(int v) const { return v > n && v <= 2 * n; }
  int request_of(int v) const { return v > n ? v - n : v; }
  int delivery_of(int i) const { return i + n; }
  double t(int i, int j) const { return travel[static_cast<std::size_t>(i) * nodes() + j]; }
  double& t(int i, int j) { return travel[static_cast<std::size_t>(i) * nodes() + j]; }
  double horizon() const { return late[sink()] - early[0]; }
  bool edarp() const { return mode == Variant::EDARP; }

  // Structural exclusions plus the preprocessing removed-arc set.
  bool arc_ok(int i, int j) const;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleRequest : std::runtime_error {
  int request;
  InfeasibleRequest(int req, const std::string& why)
      : std::runtime_error("request " + std::to_string(req) + " infeasible: " + why), request(req) {}
};

// Throws ValidationError on broken invariants (pairing of loads/risks, windows, depots).
void validate(const Instance& inst);

Instance parse_cordeau(std::istream& in);
std::string emit_cordeau(const Instance& inst);

Instance parse_realworld(std::istream& in);
std::string emit_realworld(const Instance& inst);

Instance load_instance(const std::string& path);  // dispatch on extension (.json vs text)

Instance derive_benchmark_risk(const Instance& inst);
double compute_qmax(const Instance& inst);
Instance preprocess(const Instance& inst);
Instance edarp_transform(const Instance& inst);

// Risk scoring levels: purpose, age group, county of origin.
struct RiskProfile {
  double purpose = 0.0;
  double age = 0.0;
  double county = 0.0;
};
double purpose_score(const std::string& purpose);
double age_score(const std::string& age_group);
double county_score(const std::string& county);
double assess_risk_score(const RiskProfile& p);

// Random small instances for oracle tests and the `generate` command.
struct RandomSpec {
  int n = 3;
  int fleet = 2;
  int capacity = 3;
  double half_width = 10.0;  // coordinates uniform in [-w, w]^2
  double horizon = 240.0;
  double window = 15.0;
  double max_ride = 30.0;
  double service = 1.0;
  bool integer_risk = false;  // r_i = w_i instead of profile-like scores
};
Instance generate_random(const RandomSpec& spec, std::uint64_t seed);

}  // namespace rdarp
