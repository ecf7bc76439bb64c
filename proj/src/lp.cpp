#include "fiberot/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace fiberot::lp {

int Problem::add_column(double cost, const std::vector<std::pair<int, double>>& entries) {
  c.push_back(cost);
  for (const auto& [row, v] : entries) {
    row_index.push_back(row);
    value.push_back(v);
  }
  col_start.push_back(static_cast<int>(row_index.size()));
  return cols() - 1;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

class RevisedSimplex {
 public:
  RevisedSimplex(const Problem& p, const Options& o) : p_(p), opt_(o) {
    m_ = p.rows;
    n_ = p.cols();
    sign_.assign(m_, 1.0);
    b_ = Eigen::VectorXd(m_);
    for (int i = 0; i < m_; ++i) {
      if (p.b[i] < 0.0) sign_[i] = -1.0;
      b_(i) = sign_[i] * p.b[i];
    }
    basis_.resize(m_);
    position_.assign(n_ + m_, -1);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      position_[n_ + i] = i;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    x_ = b_;
    double cmax = 0.0;
    for (double v : p.c) cmax = std::max(cmax, std::abs(v));
    cost_scale_ = std::max(1.0, cmax);
  }

  Solution run() {
    Solution sol;
    // Phase I: drive the artificials out.
    cost_.assign(n_ + m_, 0.0);
    for (int i = 0; i < m_; ++i) cost_[n_ + i] = 1.0;
    phase_two_ = false;
    Status st = iterate(sol.iterations, 1.0);
    if (st == Status::IterationLimit) {
      sol.status = st;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) infeas += std::max(0.0, x_(i));
    }
    if (infeas > opt_.feasibility_tol * std::max(1.0, b_.lpNorm<1>())) {
      sol.status = Status::Infeasible;
      return sol;
    }

    cost_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = p_.c[j];
    phase_two_ = true;
    st = iterate(sol.iterations, cost_scale_);
    sol.status = st;
    if (st != Status::Optimal) return sol;

    refactor();
    sol.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.x[basis_[i]] = std::max(0.0, x_(i));
    }
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += p_.c[j] * sol.x[j];
    const Eigen::VectorXd y = duals();
    sol.y.resize(m_);
    for (int i = 0; i < m_; ++i) sol.y[i] = sign_[i] * y(i);
    return sol;
  }

 private:
  Eigen::VectorXd duals() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    return binv_.transpose() * cb;
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return y(j - n_);
    double s = 0.0;
    for (int k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) {
      s += y(p_.row_index[k]) * sign_[p_.row_index[k]] * p_.value[k];
    }
    return s;
  }

  Eigen::VectorXd ftran(int j) const {
    if (j >= n_) return binv_.col(j - n_);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
    for (int k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) {
      const int r = p_.row_index[k];
      d.noalias() += (sign_[r] * p_.value[k]) * binv_.col(r);
    }
    return d;
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (j >= n_) {
        B(j - n_, i) = 1.0;
      } else {
        for (int k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) {
          B(p_.row_index[k], i) += sign_[p_.row_index[k]] * p_.value[k];
        }
      }
    }
    binv_ = B.partialPivLu().inverse();
    x_ = binv_ * b_;
    for (int i = 0; i < m_; ++i) {
      if (x_(i) < 0.0 && x_(i) > -opt_.feasibility_tol) x_(i) = 0.0;
    }
  }

  Status iterate(int& iterations, double scale) {
    const double rc_tol = opt_.optimality_tol * scale;
    int since_refactor = 0;
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iterations >= opt_.max_iterations) return Status::IterationLimit;
      const Eigen::VectorXd y = duals();

      int entering = -1;
      double best = -rc_tol;
      const int last = phase_two_ ? n_ : n_ + m_;
      for (int j = 0; j < last; ++j) {
        if (position_[j] >= 0) continue;
        const double rc = cost_[j] - column_dot(j, y);
        if (rc < best) {
          best = rc;
          entering = j;
          if (bland) break;
        }
      }
      if (entering < 0) return Status::Optimal;

      const Eigen::VectorXd d = ftran(entering);
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double di = d(i);
        double ratio;
        if (phase_two_ && basis_[i] >= n_) {
          // Artificials stay at zero in phase II.
          if (std::abs(di) <= opt_.pivot_tol) continue;
          ratio = 0.0;
        } else {
          if (di <= opt_.pivot_tol) continue;
          ratio = std::max(0.0, x_(i)) / di;
        }
        const bool better =
            ratio < theta - 1e-14 ||
            (ratio <= theta + 1e-14 &&
             (bland ? basis_[i] < basis_[leave] : std::abs(di) > leave_pivot));
        if (leave < 0 || better) {
          theta = ratio;
          leave = i;
          leave_pivot = std::abs(di);
        }
      }
      if (leave < 0) return Status::Unbounded;

      x_.noalias() -= theta * d;
      x_(leave) = theta;
      const double piv = d(leave);
      Eigen::RowVectorXd pivot_row = binv_.row(leave) / piv;
      binv_.noalias() -= d * pivot_row;
      binv_.row(leave) = pivot_row;

      position_[basis_[leave]] = -1;
      basis_[leave] = entering;
      position_[entering] = leave;
      ++iterations;

      if (theta == 0.0) {
        if (++degenerate_run > 4 * m_ + 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  const Problem& p_;
  Options opt_;
  int m_ = 0, n_ = 0;
  std::vector<double> sign_;
  Eigen::VectorXd b_;
  std::vector<int> basis_;
  std::vector<int> position_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd x_;
  std::vector<double> cost_;
  double cost_scale_ = 1.0;
  bool phase_two_ = false;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  RevisedSimplex simplex(problem, options);
  return simplex.run();
}

}  // namespace fiberot::lp
