#include "rdarp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace rdarp {

namespace {

void compute_euclidean(Instance& inst) {
  const int N = inst.nodes();
  inst.travel.assign(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      inst.t(i, j) = std::hypot(inst.x[i] - inst.x[j], inst.y[i] - inst.y[j]);
}

bool check_triangle(const Instance& inst) {
  const int N = inst.nodes();
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (inst.t(i, j) > inst.t(i, k) + inst.t(k, j) + 1e-9) return false;
  return true;
}

void resize_nodes(Instance& inst) {
  const int N = inst.nodes();
  inst.service.assign(N, 0.0);
  inst.risk.assign(N, 0.0);
  inst.early.assign(N, 0.0);
  inst.late.assign(N, 0.0);
  inst.load.assign(N, 0);
  inst.max_ride.assign(inst.n + 1, 0.0);
}

}  // namespace

bool Instance::arc_ok(int i, int j) const {
  if (i == j || j == 0 || i == sink()) return false;
  if (i == 0 && j == sink()) return false;
  if (is_delivery(i) && j == i - n) return false;
  if (i == 0 && is_delivery(j)) return false;
  if (is_pickup(i) && j == sink()) return false;
  if (!arc_removed.empty() && arc_removed[static_cast<std::size_t>(i) * nodes() + j]) return false;
  return true;
}

void validate(const Instance& inst) {
  if (inst.n <= 0) throw ValidationError("instance has no requests");
  const int N = inst.nodes();
  auto sized = [N](const auto& v) { return static_cast<int>(v.size()) == N; };
  if (!sized(inst.service) || !sized(inst.risk) || !sized(inst.early) || !sized(inst.late) ||
      !sized(inst.load))
    throw ValidationError("node arrays do not match 2n+2 nodes");
  if (static_cast<int>(inst.max_ride.size()) != inst.n + 1)
    throw ValidationError("max ride array does not match n");
  if (inst.travel.size() != static_cast<std::size_t>(N) * N)
    throw ValidationError("travel-time matrix is not (2n+2)^2");
  if (inst.fleet < 1) throw ValidationError("fleet size must be positive");
  if (inst.capacity < 1) throw ValidationError("capacity must be positive");
  for (double v : inst.travel)
    if (!std::isfinite(v) || v < 0) throw ValidationError("travel times must be finite and non-negative");
  if (inst.service[0] != 0.0 || inst.service[inst.sink()] != 0.0)
    throw ValidationError("depot service times must be zero");
  for (int v = 0; v < N; ++v) {
    if (inst.early[v] > inst.late[v])
      throw ValidationError("node " + std::to_string(v) + " has an empty time window");
    if (inst.service[v] < 0) throw ValidationError("node " + std::to_string(v) + " has negative service");
  }
  for (int i = 1; i <= inst.n; ++i) {
    const int d = inst.delivery_of(i);
    if (inst.load[i] < 0 || inst.load[d] != -inst.load[i])
      throw ValidationError("request " + std::to_string(i) + ": loads must satisfy w_i = -w_{n+i} >= 0");
    if (inst.risk[i] < 0 || std::abs(inst.risk[d] + inst.risk[i]) > 1e-12)
      throw ValidationError("request " + std::to_string(i) + ": risks must satisfy r_i = -r_{n+i} >= 0");
    if (!(inst.max_ride[i] >= 0))
      throw ValidationError("request " + std::to_string(i) + ": negative max ride time");
  }
  if (inst.load[0] != 0 || inst.load[inst.sink()] != 0) throw ValidationError("depot loads must be zero");
}

Instance parse_cordeau(std::istream& in) {
  Instance inst;
  std::string line;
  int line_no = 0;
  bool header = false;
  int expected = 0, seen = 0;
  double T = kInf, L = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!header) {
      double K, n, Q;
      if (!(ls >> K >> n >> T >> Q >> L)) throw ParseError(line_no, "expected header 'K n T Q L'");
      if (K < 1 || n < 0 || Q < 0 || K != std::floor(K) || n != std::floor(n) || Q != std::floor(Q))
        throw ParseError(line_no, "header counts must be non-negative integers");
      inst.fleet = static_cast<int>(K);
      inst.n = static_cast<int>(n);
      inst.capacity = static_cast<int>(Q);
      inst.route_duration = T;
      if (inst.n == 0) throw ValidationError("instance has no requests");
      resize_nodes(inst);
      inst.x.assign(inst.nodes(), 0.0);
      inst.y.assign(inst.nodes(), 0.0);
      expected = inst.nodes();
      header = true;
      continue;
    }
    if (seen >= expected) throw ParseError(line_no, "more node lines than 2n+2");
    double id, x, y, s, w, a, b;
    if (!(ls >> id >> x >> y >> s >> w >> a >> b))
      throw ParseError(line_no, "expected node line 'id x y s w a b'");
    if (id != seen) throw ParseError(line_no, "node id " + std::to_string(seen) + " expected");
    if (w != std::floor(w)) throw ParseError(line_no, "load must be an integer");
    inst.x[seen] = x;
    inst.y[seen] = y;
    inst.service[seen] = s;
    inst.load[seen] = static_cast<int>(w);
    inst.early[seen] = a;
    inst.late[seen] = b;
    ++seen;
  }
  if (!header) throw ParseError(line_no, "empty input");
  if (seen != expected)
    throw ParseError(line_no, "expected " + std::to_string(expected) + " node lines, got " + std::to_string(seen));
  for (int i = 1; i <= inst.n; ++i) inst.max_ride[i] = L;
  if (std::isfinite(T)) {
    inst.late[0] = std::min(inst.late[0], inst.early[0] + T);
    inst.late[inst.sink()] = std::min(inst.late[inst.sink()], inst.early[inst.sink()] + T);
  }
  compute_euclidean(inst);
  validate(inst);
  inst.triangle_ok = true;
  return inst;
}

std::string emit_cordeau(const Instance& inst) {
  if (inst.x.empty()) throw ValidationError("Cordeau format needs planar coordinates");
  std::ostringstream os;
  os.precision(17);
  double L = inst.n > 0 ? inst.max_ride[1] : 0.0;
  for (int i = 1; i <= inst.n; ++i)
    if (inst.max_ride[i] != L) throw ValidationError("Cordeau format needs a uniform max ride time");
  const double T = std::isfinite(inst.route_duration) ? inst.route_duration : inst.late[inst.sink()] - inst.early[0];
  os << inst.fleet << ' ' << inst.n << ' ' << T << ' ' << inst.capacity << ' ' << L << '\n';
  for (int v = 0; v < inst.nodes(); ++v)
    os << v << ' ' << inst.x[v] << ' ' << inst.y[v] << ' ' << inst.service[v] << ' ' << inst.load[v] << ' '
       << inst.early[v] << ' ' << inst.late[v] << '\n';
  return os.str();
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return json ? parse_realworld(f) : parse_cordeau(f);
}

Instance derive_benchmark_risk(const Instance& inst) {
  Instance out = inst;
  for (int i = 1; i <= out.n; ++i) {
    out.risk[i] = out.load[i];
    out.risk[out.delivery_of(i)] = -static_cast<double>(out.load[i]);
  }
  return out;
}

double compute_qmax(const Instance& inst) {
  if (inst.n <= 0) throw ValidationError("compute_qmax needs at least one request");
  double sum = 0;
  for (int i = 1; i <= inst.n; ++i) sum += inst.risk[i];
  return inst.horizon() * (sum / inst.n);
}

Instance preprocess(const Instance& src) {
  Instance inst = src;
  const int n = inst.n, N = inst.nodes();
  for (int i = 1; i <= n; ++i) {
    if (inst.load[i] > inst.capacity) throw InfeasibleRequest(i, "load exceeds capacity");
    if (inst.t(i, i + n) > inst.max_ride[i] + 1e-9) throw InfeasibleRequest(i, "direct trip exceeds max ride time");
  }
  auto& a = inst.early;
  auto& b = inst.late;
  for (int round = 0; round < 1000; ++round) {
    bool changed = false;
    auto tighten = [&changed](double& v, double nv, bool lower) {
      if (lower ? nv > v + 1e-12 : nv < v - 1e-12) {
        v = nv;
        changed = true;
      }
    };
    for (int i = 1; i <= n; ++i) {
      const int d = i + n;
      const double s = inst.service[i], tt = inst.t(i, d), L = inst.max_ride[i];
      tighten(a[d], a[i] + s + tt, true);
      tighten(b[i], b[d] - s - tt, false);
      tighten(a[i], a[d] - s - L, true);
      tighten(b[d], b[i] + s + L, false);
      if (a[i] > b[i] + 1e-9 || a[d] > b[d] + 1e-9) throw InfeasibleRequest(i, "time window emptied by tightening");
    }
    if (!changed) break;
  }
  inst.triangle_ok = check_triangle(inst);
  inst.arc_removed.assign(static_cast<std::size_t>(N) * N, 0);
  auto remove = [&](int i, int j) { inst.arc_removed[static_cast<std::size_t>(i) * N + j] = 1; };
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j || j == 0 || i == inst.sink() || (i == 0 && j == inst.sink())) remove(i, j);
      else if (a[i] + inst.service[i] + inst.t(i, j) > b[j] + 1e-9) remove(i, j);
    }
  for (int i = 1; i <= n; ++i) {
    remove(i + n, i);
    remove(0, i + n);
    remove(i, inst.sink());
  }
  if (inst.triangle_ok) {
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= 2 * n; ++j) {
        if (j == i || j == i + n) continue;
        if (inst.t(i, j) + inst.service[j] + inst.t(j, i + n) > inst.max_ride[i] + 1e-9) {
          remove(i, j);
          remove(j, i + n);
        }
      }
  }
  return inst;
}

Instance edarp_transform(const Instance& src) {
  Instance inst = src;
  inst.mode = Variant::EDARP;
  std::fill(inst.risk.begin(), inst.risk.end(), 0.0);
  inst.detour_weight.assign(inst.n + 1, 0.0);
  for (int i = 1; i <= inst.n; ++i) inst.detour_weight[i] = std::max(15.0, inst.t(i, i + inst.n));
  inst.q_max = kInf;
  return inst;
}

namespace {
double level(double v, std::initializer_list<double> allowed, const char* what) {
  for (double a : allowed)
    if (std::abs(v - a) < 1e-12) return a;
  throw ValidationError(std::string("risk component outside enumerated levels: ") + what);
}
}  // namespace

double purpose_score(const std::string& p) {
  if (p == "Personal") return 0.1;
  if (p == "Education" || p == "Employment" || p == "Workshop" || p == "Recreation" || p == "Shopping") return 0.2;
  if (p == "Dialysis" || p == "Medical" || p == "Nutrition") return 0.3;
  throw ValidationError("unknown travel purpose: " + p);
}

double age_score(const std::string& g) {
  if (g == "18-44") return 0.1;
  if (g == "44-65") return 0.2;
  if (g == "65+") return 0.3;
  throw ValidationError("unknown age group: " + g);
}

double county_score(const std::string& c) {
  if (c == "Walker") return 0.2;
  if (c == "Jefferson" || c == "Shelby") return 0.3;
  throw ValidationError("unknown county: " + c);
}

double assess_risk_score(const RiskProfile& p) {
  if (p.purpose == 0.0 && p.age == 0.0 && p.county == 0.0) return 0.0;  // risk-exempt rider
  return level(p.purpose, {0.1, 0.2, 0.3}, "purpose") + level(p.age, {0.1, 0.2, 0.3}, "age") +
         level(p.county, {0.2, 0.3}, "county");
}

Instance generate_random(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-spec.half_width, spec.half_width);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  inst.n = spec.n;
  inst.fleet = spec.fleet;
  inst.capacity = spec.capacity;
  resize_nodes(inst);
  const int n = inst.n, N = inst.nodes();
  inst.x.assign(N, 0.0);
  inst.y.assign(N, 0.0);
  for (int v = 1; v <= 2 * n; ++v) {
    inst.x[v] = coord(rng);
    inst.y[v] = coord(rng);
  }
  compute_euclidean(inst);
  const double H = spec.horizon, W = spec.window;
  inst.early[0] = inst.early[inst.sink()] = 0.0;
  inst.late[0] = inst.late[inst.sink()] = H;
  for (int i = 1; i <= n; ++i) {
    const int d = i + n;
    inst.service[i] = inst.service[d] = spec.service;
    inst.load[i] = 1;
    inst.load[d] = -1;
    inst.max_ride[i] = std::max(spec.max_ride, inst.t(i, d) + 5.0);
    const double direct = spec.service + inst.t(i, d);
    if (unit(rng) < 0.5) {  // outbound: constrained pick-up
      const double lo = inst.t(0, i), hi = H - W - direct - inst.t(d, inst.sink());
      const double e = lo + unit(rng) * std::max(0.0, hi - lo);
      inst.early[i] = e;
      inst.late[i] = e + W;
      inst.early[d] = 0.0;
      inst.late[d] = H;
    } else {  // inbound: constrained drop-off
      const double lo = inst.t(0, i) + direct, hi = H - W - spec.service - inst.t(d, inst.sink());
      const double e = lo + unit(rng) * std::max(0.0, hi - lo);
      inst.early[d] = e;
      inst.late[d] = e + W;
      inst.early[i] = 0.0;
      inst.late[i] = H;
    }
    const double r = spec.integer_risk ? 1.0 : 0.4 + 0.1 * static_cast<int>(unit(rng) * 6.0);
    inst.risk[i] = r;
    inst.risk[d] = -r;
  }
  inst.q_max = compute_qmax(inst);
  inst.triangle_ok = true;
  validate(inst);
  return inst;
}

}  // namespace rdarp
