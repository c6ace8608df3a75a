#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdarp/bcp.hpp"

#ifndef RDARP_VERSION
#define RDARP_VERSION "0.0.0"
#endif

using namespace rdarp;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kTimeLimit = 3, kInternal = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_cap(const std::string& s, const char* flag) {
  if (s == "inf" || s == "Inf" || s == "INF") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || std::isnan(v)) throw std::invalid_argument(s);
    if (v < 0) throw UsageError(std::string(flag) + " must be non-negative");
    return v;
  } catch (const std::logic_error&) {
    throw UsageError(std::string(flag) + ": expected a number or 'inf', got '" + s + "'");
  }
}

bool is_json(const std::string& path) { return path.size() >= 5 && path.substr(path.size() - 5) == ".json"; }

// Benchmark text files carry no risk scores: riders' risk equals their load and the cumulative cap is derived.
Instance load(const std::string& path, bool benchmark_risk, bool edarp) {
  Instance inst = load_instance(path);
  if (!is_json(path) && benchmark_risk) {
    inst = derive_benchmark_risk(inst);
    inst.q_max = compute_qmax(inst);
  }
  if (edarp) inst = edarp_transform(inst);
  return inst;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CutSelection parse_cuts(const std::string& spec) {
  CutSelection c{false, false, false};
  if (spec == "none") return c;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "ipec") c.ipec = true;
    else if (item == "2pc") c.two_path = true;
    else if (item == "rc") c.rounded_capacity = true;
    else if (item == "all") c = CutSelection{};
    else throw UsageError("--cuts: unknown family '" + item + "' (ipec, 2pc, rc, all, none)");
  }
  return c;
}

struct Common {
  std::string instance;
  bool raw_risk = false;
  bool edarp = false;
  double time_limit = 0;
  std::string cuts = "all";
  bool no_heuristic = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("instance", c.instance, "Instance file (.json real-world format, otherwise benchmark text)")
      ->required();
  cmd->add_flag("--raw-risk", c.raw_risk, "Keep zero risks on benchmark text input (no r_i = w_i extension)");
  cmd->add_option("--time-limit", c.time_limit, "Seconds (0: none)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cuts", c.cuts, "Cut families: comma list of ipec,2pc,rc, or all / none");
  cmd->add_flag("--no-heuristic-pricing", c.no_heuristic, "Price exactly in every iteration");
}

SolveOptions base_options(const Common& c) {
  SolveOptions so;
  so.time_limit = c.time_limit > 0 ? c.time_limit : kInf;
  so.cuts = parse_cuts(c.cuts);
  so.heuristic_pricing = !c.no_heuristic;
  return so;
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
    case SolveStatus::Feasible: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    case SolveStatus::TimeLimit: return kTimeLimit;
  }
  return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact branch-cut-and-price for the risk-aware and equitable dial-a-ride problems"};
  app.set_version_flag("--version", std::string("rdarp ") + RDARP_VERSION);
  app.require_subcommand(1);

  Common sc;
  std::string mode = "cost", eps_risk_s = "inf", eps_cost_s = "inf", eps_dt_s, out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one member of the epsilon-constraint pair");
  add_common(solve_cmd, sc);
  solve_cmd->add_option("--mode", mode, "Objective: cost or risk")->check(CLI::IsMember({"cost", "risk"}));
  auto* er = solve_cmd->add_option("--eps-risk", eps_risk_s, "Cap on every rider's exposed risk (number or inf)");
  solve_cmd->add_option("--eps-cost", eps_cost_s, "Cap on total cost in risk mode (number or inf)");
  auto* ed = solve_cmd->add_flag("--edarp", sc.edarp, "Equitable variant: cap detour rates instead of exposure");
  auto* edt = solve_cmd->add_option("--eps-dt", eps_dt_s, "Detour-rate cap for --edarp (number or inf)");
  ed->excludes(er);
  edt->needs(ed);
  solve_cmd->add_option("--out", out, "Solution JSON path (default: stdout)");

  Common pc;
  double step = 0.01;
  std::string csv_out, json_out;
  auto* pareto_cmd = app.add_subcommand("pareto", "Certified Pareto front of cost versus maximum exposed risk");
  add_common(pareto_cmd, pc);
  pareto_cmd->add_flag("--edarp", pc.edarp, "Equitable variant (detour rate instead of exposure)");
  pareto_cmd->add_option("--step", step, "Decrement of the risk cap between points")->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--out", csv_out, "CSV path (default: stdout)");
  pareto_cmd->add_option("--json", json_out, "Also write the points with their routes as JSON");

  std::string v_instance, v_solution, v_eps = "inf";
  bool v_raw = false, v_edarp = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check a solution document against an instance");
  validate_cmd->add_option("instance", v_instance, "Instance file")->required();
  validate_cmd->add_option("solution", v_solution, "Solution JSON")->required();
  validate_cmd->add_option("--eps-risk", v_eps, "Also check every rider's measure against this cap");
  validate_cmd->add_flag("--raw-risk", v_raw, "Keep zero risks on benchmark text input");
  validate_cmd->add_flag("--edarp", v_edarp, "Validate against the equitable variant");

  std::string c_in, c_out;
  bool c_raw = false;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between benchmark text and the JSON format");
  convert_cmd->add_option("input", c_in, "Input instance")->required();
  convert_cmd->add_option("output", c_out, "Output path; .json selects JSON, anything else benchmark text")
      ->required();
  convert_cmd->add_flag("--raw-risk", c_raw, "Keep zero risks when reading benchmark text");

  RandomSpec gs;
  std::uint64_t seed = 1;
  std::string g_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a random small instance as JSON");
  gen_cmd->add_option("--n", gs.n, "Requests")->check(CLI::Range(1, kMaxRequests));
  gen_cmd->add_option("--fleet", gs.fleet, "Vehicles")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--capacity", gs.capacity, "Vehicle capacity")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--horizon", gs.horizon, "Planning horizon (min)")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--window", gs.window, "Time-window width (min)")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-ride", gs.max_ride, "Maximum ride time (min)")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--out", g_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      SolveOptions so = base_options(sc);
      so.objective = mode == "risk" ? Objective::Risk : Objective::Cost;
      so.eps_risk = sc.edarp ? (eps_dt_s.empty() ? kInf : parse_cap(eps_dt_s, "--eps-dt")) : parse_cap(eps_risk_s, "--eps-risk");
      so.eps_cost = parse_cap(eps_cost_s, "--eps-cost");
      Instance inst;
      try {
        inst = preprocess(load(sc.instance, !sc.raw_risk, sc.edarp));
      } catch (const InfeasibleRequest& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
      }
      const SolveReport rep = solve(inst, so);
      write_text(out, solution_json(inst, rep));
      std::cerr << "status=" << to_string(rep.status) << " objective=" << rep.objective << " bound=" << rep.bound
                << " nodes=" << rep.nodes << " columns=" << rep.columns << '\n';
      return exit_for(rep.status);
    }

    if (pareto_cmd->parsed()) {
      ParetoOptions po;
      po.base = base_options(pc);
      po.time_limit = po.base.time_limit;
      Instance inst;
      try {
        inst = preprocess(load(pc.instance, !pc.raw_risk, pc.edarp));
      } catch (const InfeasibleRequest& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
      }
      const auto front = pareto_front(inst, step, po);
      write_text(csv_out, pareto_csv(front));
      if (!json_out.empty()) {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto& p : front) {
          nlohmann::ordered_json jp;
          jp["epsilon_risk"] = std::isfinite(p.epsilon_risk) ? nlohmann::ordered_json(p.epsilon_risk) : nullptr;
          jp["cost"] = p.cost;
          jp["max_risk"] = p.max_risk;
          jp["certified"] = p.exact;
          jp["routes"] = nlohmann::ordered_json::array();
          for (const auto& r : p.routes) jp["routes"].push_back({{"sequence", r.seq}, {"schedule", r.A}});
          doc.push_back(jp);
        }
        write_text(json_out, doc.dump(2) + "\n");
      }
      if (front.empty()) {
        std::cerr << "infeasible: no feasible solution\n";
        return kInfeasible;
      }
      for (const auto& p : front)
        if (!p.exact) return kTimeLimit;
      return kOk;
    }

    if (validate_cmd->parsed()) {
      const Instance inst = load(v_instance, !v_raw, v_edarp);
      const double cap = parse_cap(v_eps, "--eps-risk");
      const auto routes = routes_from_json(inst, read_text(v_solution));
      int problems = 0;
      std::vector<int> seen(inst.n + 1, 0);
      for (std::size_t k = 0; k < routes.size(); ++k) {
        const auto br = validate_route(inst, routes[k]);
        for (const auto& v : br.violations) {
          std::cout << "route " << k << " node " << v.node << ": " << v.what << " (" << v.lhs << " <= " << v.rhs
                    << " violated)\n";
          ++problems;
        }
        for (int i : requests_of(inst, routes[k].seq)) ++seen[i];
        if (br.ok() && std::isfinite(cap)) {
          Route r = routes[k];
          r.H = br.H;
          const double m = route_measure(inst, r);
          if (m > cap + 1e-6) {
            std::cout << "route " << k << ": maximum exposure (" << m << " <= " << cap << " violated)\n";
            ++problems;
          }
        }
      }
      for (int i = 1; i <= inst.n; ++i)
        if (seen[i] != 1) {
          std::cout << "request " << i << " served " << seen[i] << " times (expected 1)\n";
          ++problems;
        }
      if (static_cast<int>(routes.size()) > inst.fleet) {
        std::cout << "fleet: " << routes.size() << " routes (" << routes.size() << " <= " << inst.fleet
                  << " violated)\n";
        ++problems;
      }
      if (problems == 0) std::cout << "valid\n";
      return problems == 0 ? kOk : kInfeasible;
    }

    if (convert_cmd->parsed()) {
      const Instance inst = load(c_in, !c_raw, false);
      write_text(c_out, is_json(c_out) ? emit_realworld(inst) : emit_cordeau(inst));
      return kOk;
    }

    if (gen_cmd->parsed()) {
      write_text(g_out, emit_realworld(generate_random(gs, seed)));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
