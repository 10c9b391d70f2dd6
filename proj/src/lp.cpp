#include "cvr/lp.hpp"

#include <Eigen/LU>

#include "cvr/error.hpp"

namespace cvr {

namespace {
constexpr double kFeasTol = 1e-10;
constexpr double kPivTol = 1e-11;
constexpr long kRefactorEvery = 512;
}  // namespace

CoveringLP::CoveringLP(Eigen::Index num_vars) : n_(num_vars), d_(Eigen::VectorXd::Ones(num_vars)) {
  if (num_vars < 1) throw Error(ErrorKind::InvalidParameter, "LP needs at least one variable");
  pos_.assign(static_cast<std::size_t>(n_), -1);
  rows_.resize(16, n_);
  rhs_.resize(16);
}

Eigen::VectorXd CoveringLP::column(Eigen::Index var) const {
  if (var < n_) return rows_.col(var).head(m_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
  e(var - n_) = -1.0;
  return e;
}

void CoveringLP::add_row(const Eigen::VectorXd& coeffs, double rhs) {
  if (coeffs.size() != n_) throw Error(ErrorKind::ShapeMismatch, "LP row length");
  if (m_ == rows_.rows()) {
    rows_.conservativeResize(2 * rows_.rows(), Eigen::NoChange);
    rhs_.conservativeResize(2 * rhs_.size());
  }
  rows_.row(m_) = coeffs.transpose();
  rhs_(m_) = rhs;
  // new row of B^{-1}: [a_B B^{-1}, -1]
  Eigen::RowVectorXd ab = Eigen::RowVectorXd::Zero(m_);
  for (Eigen::Index k = 0; k < m_; ++k) {
    const Eigen::Index v = basis_[static_cast<std::size_t>(k)];
    if (v < n_) ab(k) = coeffs(v);
  }
  Eigen::MatrixXd nb(m_ + 1, m_ + 1);
  nb.topLeftCorner(m_, m_) = binv_;
  nb.topRightCorner(m_, 1).setZero();
  nb.bottomLeftCorner(1, m_) = ab * binv_;
  nb(m_, m_) = -1.0;
  binv_ = std::move(nb);
  double s = -rhs;
  for (Eigen::Index k = 0; k < m_; ++k) {
    const Eigen::Index v = basis_[static_cast<std::size_t>(k)];
    if (v < n_) s += coeffs(v) * xb_(k);
  }
  xb_.conservativeResize(m_ + 1);
  xb_(m_) = s;
  d_.conservativeResize(n_ + m_ + 1);
  d_(n_ + m_) = 0.0;
  basis_.push_back(n_ + m_);
  pos_.push_back(m_);
  ++m_;
}

void CoveringLP::refactor() {
  Eigen::MatrixXd b(m_, m_);
  for (Eigen::Index k = 0; k < m_; ++k) b.col(k) = column(basis_[static_cast<std::size_t>(k)]);
  binv_ = b.partialPivLu().inverse();
  xb_ = binv_ * rhs_.head(m_);
  Eigen::RowVectorXd cb = Eigen::RowVectorXd::Zero(m_);
  for (Eigen::Index k = 0; k < m_; ++k)
    if (basis_[static_cast<std::size_t>(k)] < n_) cb(k) = 1.0;
  const Eigen::RowVectorXd pi = cb * binv_;
  const Eigen::RowVectorXd piM = pi * rows_.topRows(m_);
  for (Eigen::Index j = 0; j < n_; ++j) d_(j) = is_basic(j) ? 0.0 : 1.0 - piM(j);
  for (Eigen::Index i = 0; i < m_; ++i) d_(n_ + i) = is_basic(n_ + i) ? 0.0 : pi(i);
  since_refactor_ = 0;
}

CoveringLP::Status CoveringLP::solve(int max_pivots) {
  for (int it = 0; it < max_pivots; ++it) {
    // leaving row: most negative basic value
    Eigen::Index r = -1;
    double worst = -kFeasTol * std::max(1.0, rhs_.head(m_).cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < m_; ++k)
      if (xb_(k) < worst) {
        worst = xb_(k);
        r = k;
      }
    if (r < 0) {
      if (since_refactor_ > 0) {
        refactor();
        bool clean = true;
        for (Eigen::Index k = 0; k < m_; ++k)
          if (xb_(k) < -kFeasTol * std::max(1.0, rhs_.head(m_).cwiseAbs().maxCoeff())) clean = false;
        if (!clean) continue;
      }
      return Status::Optimal;
    }
    const Eigen::RowVectorXd rho = binv_.row(r);
    const Eigen::RowVectorXd alpha_s = rho * rows_.topRows(m_);
    // entering: min ratio d_j / -alpha_rj over alpha_rj < 0, lowest index on ties
    Eigen::Index q = -1;
    double best = std::numeric_limits<double>::infinity();
    double alpha_q = 0.0;
    const Eigen::Index total = n_ + m_;
    for (Eigen::Index j = 0; j < total; ++j) {
      if (is_basic(j)) continue;
      const double a = j < n_ ? alpha_s(j) : -rho(j - n_);
      if (a >= -kPivTol) continue;
      const double ratio = std::max(d_(j), 0.0) / -a;
      if (q < 0 || ratio < best - 1e-14 * std::max(1.0, best)) {
        best = ratio;
        q = j;
        alpha_q = a;
      }
    }
    if (q < 0) return Status::Infeasible;
    const Eigen::VectorXd aq = binv_ * column(q);
    const double piv = aq(r);
    (void)alpha_q;
    const double theta_p = xb_(r) / piv;
    xb_ -= theta_p * aq;
    xb_(r) = theta_p;
    const double theta_d = d_(q) / piv;
    for (Eigen::Index j = 0; j < total; ++j) {
      if (is_basic(j)) continue;
      const double a = j < n_ ? alpha_s(j) : -rho(j - n_);
      d_(j) -= theta_d * a;
    }
    const Eigen::Index leaving = basis_[static_cast<std::size_t>(r)];
    d_(q) = 0.0;
    d_(leaving) = -theta_d;
    const Eigen::RowVectorXd prow = binv_.row(r) / piv;
    binv_.noalias() -= aq * prow;
    binv_.row(r) = prow;
    basis_[static_cast<std::size_t>(r)] = q;
    pos_[static_cast<std::size_t>(leaving)] = -1;
    pos_[static_cast<std::size_t>(q)] = r;
    ++pivots_;
    if (++since_refactor_ >= kRefactorEvery) refactor();
  }
  return Status::IterationLimit;
}

double CoveringLP::objective() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < m_; ++k)
    if (basis_[static_cast<std::size_t>(k)] < n_) s += xb_(k);
  return s;
}

Eigen::VectorXd CoveringLP::primal() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_);
  for (Eigen::Index k = 0; k < m_; ++k) {
    const Eigen::Index v = basis_[static_cast<std::size_t>(k)];
    if (v < n_) c(v) = std::max(xb_(k), 0.0);
  }
  return c;
}

Eigen::VectorXd CoveringLP::dual() const {
  Eigen::VectorXd y(m_);
  for (Eigen::Index i = 0; i < m_; ++i) y(i) = is_basic(n_ + i) ? 0.0 : std::max(d_(n_ + i), 0.0);
  return y;
}

}  // namespace cvr
