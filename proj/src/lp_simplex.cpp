#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdarp/lp.hpp"

namespace rdarp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

int LinearModel::add_var(std::string name, double lb, double ub, double obj) {
  vars.push_back({std::move(name), lb, ub, obj});
  return static_cast<int>(vars.size()) - 1;
}

int LinearModel::add_row(std::string name, std::vector<std::pair<int, double>> coefs, Sense sense, double rhs) {
  rows.push_back({std::move(name), std::move(coefs), sense, rhs});
  return static_cast<int>(rows.size()) - 1;
}

std::string LinearModel::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "VARS " << vars.size() << "\n";
  for (std::size_t j = 0; j < vars.size(); ++j)
    os << "V " << j << ' ' << vars[j].name << ' ' << vars[j].lb << ' ' << vars[j].ub << ' ' << vars[j].obj << "\n";
  os << "ROWS " << rows.size() << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << "R " << i << ' ' << r.name << ' ' << (r.sense == Sense::LE ? "<=" : r.sense == Sense::GE ? ">=" : "=")
       << ' ' << r.rhs;
    for (const auto& [j, a] : r.coefs) os << ' ' << j << ':' << a;
    os << "\n";
  }
  return os.str();
}

namespace {

constexpr double kInfD = std::numeric_limits<double>::infinity();
constexpr double kPivTol = 1e-9;

enum class At : unsigned char { Basic, Lower, Upper, Zero };

class Simplex {
 public:
  Simplex(const LinearModel& model, const LpOptions& opt) : model_(model), opt_(opt) {}

  LpSolution run() {
    LpSolution sol;
    setup();
    if (!refactor()) return fail(sol);
    if (nart_ > 0) {
      phase_cost(true);
      LpStatus st = iterate(true);
      if (st == LpStatus::NumericalFailure) return fail(sol);
      if (!refactor()) return fail(sol);
      double infeas = 0;
      for (int k = 0; k < m_; ++k)
        if (basis_[k] >= art0_) infeas += std::abs(xb_[k]);
      if (infeas > opt_.feas_tol * std::max(1.0, bnorm_)) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iters_;
        return sol;
      }
      drive_out_artificials();
    }
    for (int j = art0_; j < ncol_; ++j) lo_[j] = hi_[j] = 0.0;
    phase_cost(false);
    for (int attempt = 0;; ++attempt) {
      LpStatus st = iterate(false);
      if (st == LpStatus::Unbounded) {
        sol.status = st;
        sol.iterations = iters_;
        return sol;
      }
      if (st == LpStatus::NumericalFailure) return fail(sol);
      if (!refactor()) return fail(sol);
      if (extract(sol)) break;
      if (attempt >= 3) return fail(sol);
    }
    sol.status = LpStatus::Optimal;
    sol.iterations = iters_;
    return sol;
  }

 private:
  const LinearModel& model_;
  LpOptions opt_;
  int m_ = 0, nv_ = 0, ncol_ = 0, art0_ = 0, nart_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // original sparse columns
  std::vector<double> lo_, hi_, cost_, x_, b_;
  std::vector<At> at_;
  std::vector<int> basis_;
  std::vector<double> tab_;  // m x ncol, B^-1 [A | I | Art]
  std::vector<double> xb_, d_;
  double bnorm_ = 0;
  int iters_ = 0;

  double& T(int i, int j) { return tab_[static_cast<std::size_t>(i) * ncol_ + j]; }

  LpSolution& fail(LpSolution& s) {
    s.status = LpStatus::NumericalFailure;
    s.iterations = iters_;
    return s;
  }

  void setup() {
    m_ = static_cast<int>(model_.rows.size());
    nv_ = static_cast<int>(model_.vars.size());
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      b_[i] = model_.rows[i].rhs;
      bnorm_ = std::max(bnorm_, std::abs(b_[i]));
    }
    cols_.assign(nv_ + m_, {});
    lo_.assign(nv_ + m_, 0.0);
    hi_.assign(nv_ + m_, 0.0);
    for (int j = 0; j < nv_; ++j) {
      lo_[j] = model_.vars[j].lb;
      hi_[j] = model_.vars[j].ub;
    }
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : model_.rows[i].coefs)
        if (a != 0.0) cols_[j].push_back({i, a});
      cols_[nv_ + i].push_back({i, 1.0});
      switch (model_.rows[i].sense) {
        case Sense::LE: lo_[nv_ + i] = 0.0, hi_[nv_ + i] = kInfD; break;
        case Sense::GE: lo_[nv_ + i] = -kInfD, hi_[nv_ + i] = 0.0; break;
        case Sense::EQ: lo_[nv_ + i] = hi_[nv_ + i] = 0.0; break;
      }
    }
    // merge duplicate coefficients in a column
    for (int j = 0; j < nv_; ++j) {
      auto& c = cols_[j];
      std::sort(c.begin(), c.end());
      std::vector<std::pair<int, double>> merged;
      for (const auto& e : c) {
        if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
        else merged.push_back(e);
      }
      c.swap(merged);
    }
    x_.assign(nv_ + m_, 0.0);
    at_.assign(nv_ + m_, At::Lower);
    for (int j = 0; j < nv_ + m_; ++j) {
      if (std::isfinite(lo_[j])) x_[j] = lo_[j], at_[j] = At::Lower;
      else if (std::isfinite(hi_[j])) x_[j] = hi_[j], at_[j] = At::Upper;
      else x_[j] = 0.0, at_[j] = At::Zero;
    }
    std::vector<double> resid = b_;
    for (int j = 0; j < nv_; ++j)
      if (x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) resid[i] -= a * x_[j];
    basis_.assign(m_, -1);
    art0_ = nv_ + m_;
    std::vector<std::pair<int, double>> arts;
    for (int i = 0; i < m_; ++i) {
      const int s = nv_ + i;
      const double tol = opt_.feas_tol * std::max(1.0, std::abs(b_[i]));
      if (resid[i] >= lo_[s] - tol && resid[i] <= hi_[s] + tol) {
        basis_[i] = s;
        at_[s] = At::Basic;
        x_[s] = resid[i];
      } else {
        arts.push_back({i, resid[i] >= 0 ? 1.0 : -1.0});
      }
    }
    nart_ = static_cast<int>(arts.size());
    ncol_ = art0_ + nart_;
    for (int k = 0; k < nart_; ++k) {
      const auto [row, sg] = arts[k];
      cols_.push_back({{row, sg}});
      lo_.push_back(0.0);
      hi_.push_back(kInfD);
      x_.push_back(std::abs(resid[row]));
      at_.push_back(At::Basic);
      basis_[row] = art0_ + k;
    }
    cost_.assign(ncol_, 0.0);
  }

  // Rebuild B^-1 from the basis columns by Gauss-Jordan, then the tableau and basic values.
  bool refactor() {
    std::vector<double> B(static_cast<std::size_t>(m_) * m_, 0.0), inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      for (const auto& [i, a] : cols_[basis_[k]]) B[static_cast<std::size_t>(i) * m_ + k] = a;
      inv[static_cast<std::size_t>(k) * m_ + k] = 1.0;
    }
    for (int c = 0; c < m_; ++c) {
      int p = -1;
      double best = 0;
      for (int r = c; r < m_; ++r) {
        const double v = std::abs(B[static_cast<std::size_t>(r) * m_ + c]);
        if (v > best) best = v, p = r;
      }
      if (p < 0 || best < 1e-12) return false;
      if (p != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(B[static_cast<std::size_t>(p) * m_ + k], B[static_cast<std::size_t>(c) * m_ + k]);
          std::swap(inv[static_cast<std::size_t>(p) * m_ + k], inv[static_cast<std::size_t>(c) * m_ + k]);
        }
      }
      const double piv = B[static_cast<std::size_t>(c) * m_ + c];
      for (int k = 0; k < m_; ++k) {
        B[static_cast<std::size_t>(c) * m_ + k] /= piv;
        inv[static_cast<std::size_t>(c) * m_ + k] /= piv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = B[static_cast<std::size_t>(r) * m_ + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          B[static_cast<std::size_t>(r) * m_ + k] -= f * B[static_cast<std::size_t>(c) * m_ + k];
          inv[static_cast<std::size_t>(r) * m_ + k] -= f * inv[static_cast<std::size_t>(c) * m_ + k];
        }
      }
    }
    // inv is B^-1 with rows indexed by basis position
    tab_.assign(static_cast<std::size_t>(m_) * ncol_, 0.0);
    for (int j = 0; j < ncol_; ++j)
      for (const auto& [i, a] : cols_[j])
        for (int k = 0; k < m_; ++k) {
          const double v = inv[static_cast<std::size_t>(k) * m_ + i];
          if (v != 0.0) T(k, j) += v * a;
        }
    std::vector<double> u = b_;
    for (int j = 0; j < ncol_; ++j)
      if (at_[j] != At::Basic && x_[j] != 0.0)
        for (const auto& [i, a] : cols_[j]) u[i] -= a * x_[j];
    xb_.assign(m_, 0.0);
    for (int k = 0; k < m_; ++k) {
      double s = 0;
      for (int i = 0; i < m_; ++i) s += inv[static_cast<std::size_t>(k) * m_ + i] * u[i];
      xb_[k] = s;
      x_[basis_[k]] = s;
    }
    recompute_reduced_costs();
    return true;
  }

  void recompute_reduced_costs() {
    d_.assign(ncol_, 0.0);
    for (int j = 0; j < ncol_; ++j) {
      double s = cost_[j];
      for (int k = 0; k < m_; ++k) s -= cost_[basis_[k]] * T(k, j);
      d_[j] = s;
    }
  }

  void phase_cost(bool phase1) {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    if (phase1) {
      for (int j = art0_; j < ncol_; ++j) cost_[j] = 1.0;
    } else {
      for (int j = 0; j < nv_; ++j) cost_[j] = model_.vars[j].obj;
    }
    recompute_reduced_costs();
  }

  void pivot(int r, int q) {
    const double p = T(r, q);
    for (int j = 0; j < ncol_; ++j) T(r, j) /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T(i, q);
      if (f == 0.0) continue;
      for (int j = 0; j < ncol_; ++j) T(i, j) -= f * T(r, j);
      T(i, q) = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int j = 0; j < ncol_; ++j) d_[j] -= f * T(r, j);
      d_[q] = 0.0;
    }
  }

  LpStatus iterate(bool phase1) {
    bool bland = false;
    int degenerate = 0, since_refactor = 0;
    const int limit = phase1 ? ncol_ : art0_;
    while (true) {
      if (iters_ >= opt_.max_iterations) return LpStatus::NumericalFailure;
      int q = -1;
      double dir = 0, best = 0;
      for (int j = 0; j < limit; ++j) {
        if (at_[j] == At::Basic || hi_[j] - lo_[j] <= 0.0) continue;
        const double dj = d_[j];
        double dj_dir = 0;
        if ((at_[j] == At::Lower || at_[j] == At::Zero) && dj < -opt_.opt_tol) dj_dir = 1;
        else if ((at_[j] == At::Upper || at_[j] == At::Zero) && dj > opt_.opt_tol) dj_dir = -1;
        if (dj_dir == 0) continue;
        if (bland) {
          q = j, dir = dj_dir;
          break;
        }
        if (std::abs(dj) > best) best = std::abs(dj), q = j, dir = dj_dir;
      }
      if (q < 0) return LpStatus::Optimal;

      const double flip = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInfD;
      int r = -1;
      double rtheta = kInfD, rbest = 0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, q);
        const int bv = basis_[i];
        double ti;
        if (alpha > kPivTol && std::isfinite(lo_[bv])) ti = (xb_[i] - lo_[bv]) / alpha;
        else if (alpha < -kPivTol && std::isfinite(hi_[bv])) ti = (hi_[bv] - xb_[i]) / -alpha;
        else continue;
        ti = std::max(ti, 0.0);
        bool take = false;
        if (r < 0 || ti < rtheta - 1e-12) take = true;
        else if (ti <= rtheta + 1e-12)
          take = bland ? basis_[i] < basis_[r] : std::abs(alpha) > rbest;
        if (take) rtheta = ti, r = i, rbest = std::abs(alpha);
      }
      double theta = rtheta;
      if (flip < rtheta) {
        theta = flip;
        r = -1;
      }
      if (!std::isfinite(theta)) return LpStatus::Unbounded;
      ++iters_;
      if (theta < 1e-12) {
        if (++degenerate > opt_.bland_after) bland = true;
      } else {
        degenerate = 0;
      }
      if (theta != 0.0) {
        x_[q] += dir * theta;
        for (int i = 0; i < m_; ++i) {
          xb_[i] -= dir * theta * T(i, q);
          x_[basis_[i]] = xb_[i];
        }
      }
      if (r < 0) {  // bound flip
        at_[q] = dir > 0 ? At::Upper : At::Lower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }
      const int leave = basis_[r];
      const double alpha = dir * T(r, q);
      if (alpha > 0) at_[leave] = At::Lower, x_[leave] = lo_[leave];
      else at_[leave] = At::Upper, x_[leave] = hi_[leave];
      pivot(r, q);
      basis_[r] = q;
      at_[q] = At::Basic;
      xb_[r] = x_[q];
      if (++since_refactor >= 100) {
        since_refactor = 0;
        if (!refactor()) return LpStatus::NumericalFailure;
      }
    }
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < art0_) continue;
      int q = -1;
      double best = 1e-7;
      for (int j = 0; j < art0_; ++j)
        if (at_[j] != At::Basic && std::abs(T(r, j)) > best) best = std::abs(T(r, j)), q = j;
      if (q < 0) continue;  // redundant row: the artificial stays basic at zero
      const int leave = basis_[r];
      at_[leave] = At::Lower;
      x_[leave] = 0.0;
      pivot(r, q);
      basis_[r] = q;
      at_[q] = At::Basic;
      xb_[r] = x_[q];
    }
    refactor();
  }

  bool extract(LpSolution& sol) {
    sol.x.assign(x_.begin(), x_.begin() + nv_);
    // y^T = c_B B^-1; column of slack i in the tableau is B^-1 e_i
    sol.dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0;
      for (int k = 0; k < m_; ++k) s += cost_[basis_[k]] * T(k, nv_ + i);
      sol.dual[i] = s;
    }
    sol.objective = 0;
    for (int j = 0; j < nv_; ++j) sol.objective += model_.vars[j].obj * sol.x[j];
    sol.reduced_cost.assign(nv_, 0.0);
    const double ptol = 1e-7 * std::max(1.0, bnorm_);
    for (int j = 0; j < nv_; ++j) {
      double dj = model_.vars[j].obj;
      for (const auto& [i, a] : cols_[j]) dj -= sol.dual[i] * a;
      sol.reduced_cost[j] = dj;
      if (sol.x[j] < lo_[j] - ptol || sol.x[j] > hi_[j] + ptol) return false;
    }
    for (int i = 0; i < m_; ++i) {
      double act = 0;
      for (const auto& [j, a] : model_.rows[i].coefs) act += a * sol.x[j];
      const double tol = 1e-7 * std::max(1.0, std::abs(b_[i]));
      const auto sense = model_.rows[i].sense;
      if ((sense != Sense::GE && act > b_[i] + tol) || (sense != Sense::LE && act < b_[i] - tol)) return false;
    }
    // dual feasibility with respect to the original data
    double scale = 1.0;
    for (int j = 0; j < nv_; ++j) scale = std::max(scale, std::abs(model_.vars[j].obj));
    const double dtol = 1e-6 * scale;
    for (int j = 0; j < nv_; ++j) {
      const double dj = sol.reduced_cost[j];
      if (at_[j] == At::Basic) {
        if (std::abs(dj) > dtol) return false;
      } else if (at_[j] == At::Lower) {
        if (dj < -dtol && hi_[j] > lo_[j]) return false;
      } else if (at_[j] == At::Upper) {
        if (dj > dtol && hi_[j] > lo_[j]) return false;
      } else if (std::abs(dj) > dtol) {
        return false;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const double y = sol.dual[i];
      const auto sense = model_.rows[i].sense;
      if ((sense == Sense::LE && y > dtol) || (sense == Sense::GE && y < -dtol)) return false;
    }
    return true;
  }
};

}  // namespace

LpSolution solve_lp(const LinearModel& model, const LpOptions& opt) {
  if (model.rows.empty()) {
    // only bounds: each variable sits at its cheaper bound
    LpSolution s;
    s.status = LpStatus::Optimal;
    for (const auto& v : model.vars) {
      double x = v.obj > 0 ? v.lb : v.obj < 0 ? v.ub : (std::isfinite(v.lb) ? v.lb : std::isfinite(v.ub) ? v.ub : 0.0);
      if (!std::isfinite(x)) {
        s.status = LpStatus::Unbounded;
        return s;
      }
      s.x.push_back(x);
      s.reduced_cost.push_back(v.obj);
      s.objective += v.obj * x;
    }
    return s;
  }
  return Simplex(model, opt).run();
}

}  // namespace rdarp
