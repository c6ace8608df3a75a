#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rdarp {

enum class Sense { LE, EQ, GE };
enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(LpStatus s);

struct LinearModel {
  struct Var {
    std::string name;
    double lb, ub, obj;
  };
  struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
    Sense sense;
    double rhs;
  };
  std::vector<Var> vars;
  std::vector<Row> rows;

  int add_var(std::string name, double lb, double ub, double obj);
  int add_row(std::string name, std::vector<std::pair<int, double>> coefs, Sense sense, double rhs);
  // Plain fixed-layout text, one variable or constraint per line.
  std::string dump() const;
};

struct LpOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  int bland_after = 1000;  // consecutive degenerate pivots before switching to Bland's rule
  int max_iterations = 1000000;
};

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;     // per variable
  std::vector<double> dual;  // per row; min problem: <= rows have dual <= 0, >= rows dual >= 0
  std::vector<double> reduced_cost;
  int iterations = 0;
};

// Bounded-variable two-phase primal simplex on a dense tableau.
LpSolution solve_lp(const LinearModel& model, const LpOptions& opt = {});

}  // namespace rdarp
