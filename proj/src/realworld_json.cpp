#include <cmath>

#include "json.hpp"
#include "rdarp/instance.hpp"

namespace rdarp {

using nlohmann::json;

namespace {

template <class T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

Instance parse_realworld(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid JSON: ") + e.what());
  }
  Instance inst;
  inst.n = required<int>(doc, "n", "document");
  if (inst.n <= 0) throw ValidationError("instance has no requests");
  inst.fleet = required<int>(doc, "K", "document");
  inst.capacity = required<int>(doc, "capacity", "document");
  const std::string mode = doc.value("mode", std::string("RDARP"));
  if (mode != "RDARP" && mode != "EDARP") throw ValidationError("mode must be RDARP or EDARP");
  const int N = inst.nodes();

  const json& nodes = doc.at("nodes");
  if (!nodes.is_array() || static_cast<int>(nodes.size()) != N)
    throw ValidationError("node count " + std::to_string(nodes.size()) + " does not match 2n+2 = " + std::to_string(N));
  inst.service.assign(N, 0.0);
  inst.risk.assign(N, 0.0);
  inst.early.assign(N, 0.0);
  inst.late.assign(N, 0.0);
  inst.load.assign(N, 0);
  bool coords = true;
  std::vector<double> xs(N, 0.0), ys(N, 0.0);
  for (int k = 0; k < N; ++k) {
    const json& nd = nodes[k];
    const std::string where = "node " + std::to_string(k);
    if (required<int>(nd, "id", where) != k) throw ValidationError(where + ": ids must be 0..2n+1 in order");
    inst.service[k] = required<double>(nd, "service", where);
    inst.load[k] = required<int>(nd, "load", where);
    inst.risk[k] = required<double>(nd, "risk", where);
    inst.early[k] = required<double>(nd, "early", where);
    inst.late[k] = required<double>(nd, "late", where);
    if (nd.contains("x") && nd.contains("y")) {
      xs[k] = nd["x"].get<double>();
      ys[k] = nd["y"].get<double>();
    } else {
      coords = false;
    }
  }
  if (coords) {
    inst.x = xs;
    inst.y = ys;
  }

  const json& tt = doc.at("travel_time");
  inst.travel.assign(static_cast<std::size_t>(N) * N, 0.0);
  std::vector<double> flat;
  if (tt.is_array() && !tt.empty() && tt[0].is_array()) {
    if (static_cast<int>(tt.size()) != N) throw ValidationError("travel_time must have 2n+2 rows");
    for (int i = 0; i < N; ++i) {
      if (static_cast<int>(tt[i].size()) != N)
        throw ValidationError("travel_time row " + std::to_string(i) + " has a missing entry");
      for (int j = 0; j < N; ++j) flat.push_back(tt[i][j].get<double>());
    }
  } else {
    flat = tt.get<std::vector<double>>();
    if (flat.size() != inst.travel.size())
      throw ValidationError("travel_time has " + std::to_string(flat.size()) + " entries, expected (2n+2)^2");
  }
  inst.travel = flat;

  const auto rides = required<std::vector<double>>(doc, "max_ride", "document");
  if (static_cast<int>(rides.size()) != inst.n) throw ValidationError("max_ride must list one value per request");
  inst.max_ride.assign(inst.n + 1, 0.0);
  for (int i = 1; i <= inst.n; ++i) inst.max_ride[i] = rides[i - 1];

  validate(inst);
  if (doc.contains("q_max") && !doc["q_max"].is_null())
    inst.q_max = doc["q_max"].get<double>();
  else if (doc.contains("q_max"))
    inst.q_max = kInf;
  else
    inst.q_max = compute_qmax(inst);
  if (mode == "EDARP") inst = edarp_transform(inst);
  return inst;
}

std::string emit_realworld(const Instance& inst) {
  json doc;
  doc["n"] = inst.n;
  doc["K"] = inst.fleet;
  doc["capacity"] = inst.capacity;
  doc["q_max"] = std::isfinite(inst.q_max) ? json(inst.q_max) : json(nullptr);
  doc["mode"] = inst.edarp() ? "EDARP" : "RDARP";
  json nodes = json::array();
  for (int k = 0; k < inst.nodes(); ++k) {
    json nd;
    nd["id"] = k;
    nd["service"] = inst.service[k];
    nd["load"] = inst.load[k];
    nd["risk"] = inst.risk[k];
    nd["early"] = inst.early[k];
    nd["late"] = inst.late[k];
    if (!inst.x.empty()) {
      nd["x"] = inst.x[k];
      nd["y"] = inst.y[k];
    }
    nodes.push_back(nd);
  }
  doc["nodes"] = nodes;
  doc["travel_time"] = inst.travel;
  doc["max_ride"] = std::vector<double>(inst.max_ride.begin() + 1, inst.max_ride.end());
  return doc.dump(1) + "\n";
}

}  // namespace rdarp
