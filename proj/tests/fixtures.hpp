#pragma once

#include <cmath>
#include <vector>

#include "rdarp/instance.hpp"

namespace fixtures {

// Wide-open instance over planar points (index = node id), one passenger of risk 1 per request.
inline rdarp::Instance planar(int n, const std::vector<std::pair<double, double>>& pts, double horizon = 1000,
                              double max_ride = 1000, int capacity = 3, int fleet = 1, double service = 0) {
  rdarp::Instance inst;
  inst.n = n;
  inst.fleet = fleet;
  inst.capacity = capacity;
  const int N = inst.nodes();
  inst.x.resize(N);
  inst.y.resize(N);
  for (int v = 0; v < N; ++v) inst.x[v] = pts[v].first, inst.y[v] = pts[v].second;
  inst.travel.assign(static_cast<std::size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) inst.t(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
  inst.service.assign(N, service);
  inst.service[0] = inst.service[N - 1] = 0;
  inst.early.assign(N, 0.0);
  inst.late.assign(N, horizon);
  inst.load.assign(N, 0);
  inst.risk.assign(N, 0.0);
  for (int i = 1; i <= n; ++i) {
    inst.load[i] = 1, inst.load[i + n] = -1;
    inst.risk[i] = 1, inst.risk[i + n] = -1;
  }
  inst.max_ride.assign(n + 1, max_ride);
  inst.q_max = rdarp::kInf;
  return inst;
}

// Every pair of distinct nodes is `t` apart (not metric-derived; triangle holds for constant t).
inline rdarp::Instance uniform(int n, double t) {
  std::vector<std::pair<double, double>> pts(2 * n + 2, {0.0, 0.0});
  rdarp::Instance inst = planar(n, pts);
  const int N = inst.nodes();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) inst.t(i, j) = i == j ? 0.0 : t;
  inst.x.clear();
  inst.y.clear();
  return inst;
}

// Interlaced path (0, i, j, i+n, k, j+n, k+n, 2n+1) with i=1, j=2, k=3; all travel 10, no service.
inline rdarp::Instance interlaced(double a_jn) {
  rdarp::Instance inst = uniform(3, 10.0);
  auto win = [&](int v, double a, double b) { inst.early[v] = a, inst.late[v] = b; };
  win(0, 0, 0);
  win(1, 10, 20);
  win(2, 20, 60);
  win(4, 20, 40);
  win(3, 40, 50);
  win(5, a_jn, 100);
  win(6, 0, 200);
  win(7, 0, 1000);
  inst.max_ride = {0, 20, 40, 40};
  return inst;
}

// Two requests on a line: sharing is much cheaper than separate trips.
inline rdarp::Instance two_requests(int fleet = 2) {
  return planar(2, {{0, 0}, {1, 0}, {2, 0}, {5, 0}, {6, 0}, {0, 0}}, 200, 100, 3, fleet, 1.0);
}

}  // namespace fixtures
