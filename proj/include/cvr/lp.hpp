#pragma once

// Dense dual simplex for covering LPs
//
//   minimize sum_j c_j  subject to  M c >= b,  c >= 0,
//
// with M >= 0 entrywise and rows appended one at a time. The all-surplus
// basis is dual feasible, and it stays dual feasible when a row is appended
// with its surplus basic, so every re-solve is warm-started.

#include <vector>

#include <Eigen/Dense>

namespace cvr {

class CoveringLP {
 public:
  enum class Status { Optimal, Infeasible, IterationLimit };

  explicit CoveringLP(Eigen::Index num_vars);

  void add_row(const Eigen::VectorXd& coeffs, double rhs);
  Status solve(int max_pivots = 200000);

  Eigen::Index num_vars() const { return n_; }
  Eigen::Index num_rows() const { return m_; }
  double objective() const;
  Eigen::VectorXd primal() const;
  /// Row multipliers y >= 0; sum_i y_i M_ij <= 1 and b^T y = objective at optimum.
  Eigen::VectorXd dual() const;
  long pivots() const { return pivots_; }

 private:
  bool is_basic(Eigen::Index var) const { return pos_[static_cast<std::size_t>(var)] >= 0; }
  Eigen::VectorXd column(Eigen::Index var) const;
  void refactor();

  Eigen::Index n_;
  Eigen::Index m_ = 0;
  Eigen::MatrixXd rows_;   // M, capacity-grown
  Eigen::VectorXd rhs_;
  Eigen::MatrixXd binv_;   // inverse of the basis matrix
  Eigen::VectorXd xb_;     // basic values
  Eigen::VectorXd d_;      // reduced costs, structural then surplus
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> pos_;  // basis position per variable or -1
  long pivots_ = 0;
  long since_refactor_ = 0;
};

}  // namespace cvr
