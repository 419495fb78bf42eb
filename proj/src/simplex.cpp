#include "ibtree/simplex.hpp"

#include <klu.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace ibtree {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

enum class VarState { kBasic, kAtLower, kAtUpper, kFreeZero };

// Sparse LU of the basis matrix (KLU: block triangular form plus
// left-looking factorization of the diagonal blocks).
class BasisFactor {
 public:
  BasisFactor() { klu_defaults(&common_); }
  ~BasisFactor() { release(); }
  BasisFactor(const BasisFactor&) = delete;
  BasisFactor& operator=(const BasisFactor&) = delete;

  void factorize(Eigen::SparseMatrix<double>& B) {
    release();
    B.makeCompressed();
    n_ = static_cast<int>(B.rows());
    outer_.assign(B.outerIndexPtr(), B.outerIndexPtr() + B.cols() + 1);
    inner_.assign(B.innerIndexPtr(), B.innerIndexPtr() + B.nonZeros());
    values_.assign(B.valuePtr(), B.valuePtr() + B.nonZeros());
    symbolic_ = klu_analyze(n_, outer_.data(), inner_.data(), &common_);
    if (symbolic_ == nullptr) throw std::runtime_error("simplex basis analysis failed");
    numeric_ = klu_factor(outer_.data(), inner_.data(), values_.data(), symbolic_, &common_);
    if (numeric_ == nullptr || common_.status != KLU_OK) throw std::runtime_error("simplex basis is singular");
  }

  // B x = rhs, in place.
  void solve(Eigen::VectorXd& rhs) {
    if (klu_solve(symbolic_, numeric_, n_, 1, rhs.data(), &common_) != 1) {
      throw std::runtime_error("simplex basis solve failed");
    }
  }

  // B' x = rhs, in place.
  void solve_transposed(Eigen::VectorXd& rhs) {
    if (klu_tsolve(symbolic_, numeric_, n_, 1, rhs.data(), &common_) != 1) {
      throw std::runtime_error("simplex basis solve failed");
    }
  }

 private:
  void release() {
    if (numeric_ != nullptr) klu_free_numeric(&numeric_, &common_);
    if (symbolic_ != nullptr) klu_free_symbolic(&symbolic_, &common_);
  }

  klu_common common_;
  klu_symbolic* symbolic_ = nullptr;
  klu_numeric* numeric_ = nullptr;
  int n_ = 0;
  std::vector<int> outer_;
  std::vector<int> inner_;
  std::vector<double> values_;
};

// Product-form update: the basis column at `row` was replaced by one whose
// representation in the previous basis is alpha.  Only its off-pivot
// nonzeros are stored.
struct Eta {
  Eigen::Index row = 0;
  double pivot = 0.0;
  std::vector<Eigen::Index> index;
  std::vector<double> value;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& options) : opt_(options) {
    m_ = lp.A.rows();
    n_ = lp.A.cols();

    // Row equilibration and objective scaling; undone when reporting duals.
    row_scale_ = Eigen::VectorXd::Ones(m_);
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = lp.A;
    for (Eigen::Index i = 0; i < m_; ++i) {
      double big = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, i); it; ++it) {
        big = std::max(big, std::abs(it.value()));
      }
      if (big > 0.0) row_scale_(i) = 1.0 / big;
    }
    A_ = row_scale_.asDiagonal() * lp.A;
    A_.makeCompressed();
    b_ = row_scale_.cwiseProduct(lp.b);
    cost_scale_ = n_ > 0 ? lp.c.cwiseAbs().maxCoeff() : 0.0;
    if (!(cost_scale_ > 0.0)) cost_scale_ = 1.0;
    c_struct_ = lp.c / cost_scale_;

    // Column layout: structurals, one slack per row, then artificials.
    lo_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    up_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
    for (Eigen::Index j = 0; j < n_; ++j) {
      lo_[static_cast<std::size_t>(j)] = lp.lower(j);
      up_[static_cast<std::size_t>(j)] = lp.upper(j);
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto s = static_cast<std::size_t>(n_ + i);
      switch (lp.sense[static_cast<std::size_t>(i)]) {
        case RowSense::kLessEqual:
          lo_[s] = 0.0;
          up_[s] = kInf;
          break;
        case RowSense::kGreaterEqual:
          lo_[s] = -kInf;
          up_[s] = 0.0;
          break;
        case RowSense::kEqual:
          lo_[s] = 0.0;
          up_[s] = 0.0;
          break;
      }
    }
  }

  SimplexResult run() {
    SimplexResult result;
    if (!initial_basis()) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    if (!art_sign_.empty()) {
      cost_.assign(lo_.size(), 0.0);
      for (std::size_t k = 0; k < art_sign_.size(); ++k) cost_[first_art() + k] = 1.0;
      const LpStatus phase1 = iterate(result.iterations);
      if (phase1 != LpStatus::kOptimal) throw std::logic_error("simplex phase 1 did not terminate at an optimum");
      double infeasibility = 0.0;
      for (std::size_t k = 0; k < art_sign_.size(); ++k) infeasibility += x_[first_art() + k];
      if (infeasibility > opt_.feasibility_tolerance) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      // Artificials are pinned at zero from here on.
      for (std::size_t k = 0; k < art_sign_.size(); ++k) {
        const std::size_t j = first_art() + k;
        up_[j] = 0.0;
        if (state_[j] != VarState::kBasic) {
          state_[j] = VarState::kAtLower;
          x_[j] = 0.0;
        }
      }
    }
    cost_.assign(lo_.size(), 0.0);
    for (Eigen::Index j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = c_struct_(j);
    bland_ = false;
    degenerate_run_ = 0;
    result.status = iterate(result.iterations);
    if (result.status != LpStatus::kOptimal) return result;

    refactor();
    result.x.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      result.x(j) = std::clamp(x_[jj], lo_[jj], up_[jj]);
    }
    if (m_ > 0) result.y = cost_scale_ * row_scale_.cwiseProduct(btran());
    return result;
  }

 private:
  std::size_t first_art() const { return static_cast<std::size_t>(n_ + m_); }
  std::size_t num_cols() const { return lo_.size(); }
  bool fixed(std::size_t j) const { return lo_[j] == up_[j]; }

  // v += scale * column j
  void add_column(std::size_t j, double scale, Eigen::VectorXd& v) const {
    if (j < static_cast<std::size_t>(n_)) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A_, static_cast<Eigen::Index>(j)); it; ++it) {
        v(it.row()) += scale * it.value();
      }
    } else if (j < first_art()) {
      v(static_cast<Eigen::Index>(j) - n_) += scale;
    } else {
      const std::size_t k = j - first_art();
      v(art_row_[k]) += scale * art_sign_[k];
    }
  }

  double dot_column(std::size_t j, const Eigen::VectorXd& y) const {
    if (j < static_cast<std::size_t>(n_)) {
      double s = 0.0;
      for (Eigen::SparseMatrix<double>::InnerIterator it(A_, static_cast<Eigen::Index>(j)); it; ++it) {
        s += it.value() * y(it.row());
      }
      return s;
    }
    if (j < first_art()) return y(static_cast<Eigen::Index>(j) - n_);
    const std::size_t k = j - first_art();
    return art_sign_[k] * y(art_row_[k]);
  }

  bool initial_basis() {
    const std::size_t total = num_cols();
    x_.assign(total, 0.0);
    state_.assign(total, VarState::kAtLower);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (lo_[jj] > up_[jj]) return false;
      if (std::isfinite(lo_[jj])) {
        x_[jj] = lo_[jj];
        state_[jj] = VarState::kAtLower;
      } else if (std::isfinite(up_[jj])) {
        x_[jj] = up_[jj];
        state_[jj] = VarState::kAtUpper;
      } else {
        x_[jj] = 0.0;
        state_[jj] = VarState::kFreeZero;
      }
    }
    Eigen::VectorXd residual = b_;
    for (Eigen::Index j = 0; j < n_; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (x_[jj] != 0.0) add_column(jj, -x_[jj], residual);
    }
    basis_.assign(static_cast<std::size_t>(m_), 0);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto s = static_cast<std::size_t>(n_ + i);
      const double r = residual(i);
      if (r >= lo_[s] - opt_.feasibility_tolerance && r <= up_[s] + opt_.feasibility_tolerance) {
        basis_[static_cast<std::size_t>(i)] = s;
        state_[s] = VarState::kBasic;
        x_[s] = r;
        continue;
      }
      const double v = std::clamp(r, lo_[s], up_[s]);
      x_[s] = v;
      state_[s] = v == up_[s] && v != lo_[s] ? VarState::kAtUpper : VarState::kAtLower;
      art_row_.push_back(i);
      art_sign_.push_back(r - v > 0.0 ? 1.0 : -1.0);
      lo_.push_back(0.0);
      up_.push_back(kInf);
      x_.push_back(std::abs(r - v));
      state_.push_back(VarState::kBasic);
      basis_[static_cast<std::size_t>(i)] = x_.size() - 1;
    }
    refactor();
    return true;
  }

  void refactor() {
    etas_.clear();
    if (m_ == 0) return;
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const std::size_t j = basis_[static_cast<std::size_t>(r)];
      if (j < static_cast<std::size_t>(n_)) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_, static_cast<Eigen::Index>(j)); it; ++it) {
          trips.emplace_back(it.row(), r, it.value());
        }
      } else if (j < first_art()) {
        trips.emplace_back(static_cast<Eigen::Index>(j) - n_, r, 1.0);
      } else {
        const std::size_t k = j - first_art();
        trips.emplace_back(art_row_[k], r, art_sign_[k]);
      }
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.factorize(B);

    // Basic values from scratch to shed accumulated drift.
    Eigen::VectorXd rhs = b_;
    for (std::size_t j = 0; j < num_cols(); ++j) {
      if (state_[j] != VarState::kBasic && x_[j] != 0.0) add_column(j, -x_[j], rhs);
    }
    lu_.solve(rhs);
    for (Eigen::Index r = 0; r < m_; ++r) x_[basis_[static_cast<std::size_t>(r)]] = rhs(r);
  }

  Eigen::VectorXd ftran(std::size_t j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    add_column(j, 1.0, v);
    lu_.solve(v);
    for (const Eta& e : etas_) {
      const double t = v(e.row) / e.pivot;
      v(e.row) = t;
      if (t == 0.0) continue;
      for (std::size_t k = 0; k < e.index.size(); ++k) v(e.index[k]) -= e.value[k] * t;
    }
    return v;
  }

  Eigen::VectorXd btran() const {
    Eigen::VectorXd w(m_);
    for (Eigen::Index r = 0; r < m_; ++r) w(r) = cost_[basis_[static_cast<std::size_t>(r)]];
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = 0.0;
      for (std::size_t k = 0; k < it->index.size(); ++k) s += it->value[k] * w(it->index[k]);
      w(it->row) = (w(it->row) - s) / it->pivot;
    }
    lu_.solve_transposed(w);
    return w;
  }

  LpStatus iterate(long& iterations) {
    if (m_ == 0) return solve_unconstrained();
    const std::size_t total = num_cols();
    for (;;) {
      if (iterations >= opt_.max_iterations) throw std::runtime_error("simplex iteration limit reached");
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
      const Eigen::VectorXd y = btran();

      // Pricing.
      std::size_t enter = total;
      double enter_d = 0.0;
      double best_score = 0.0;
      for (std::size_t j = 0; j < total; ++j) {
        if (state_[j] == VarState::kBasic || fixed(j)) continue;
        const double d = cost_[j] - dot_column(j, y);
        bool eligible = false;
        switch (state_[j]) {
          case VarState::kAtLower:
            eligible = d < -opt_.optimality_tolerance;
            break;
          case VarState::kAtUpper:
            eligible = d > opt_.optimality_tolerance;
            break;
          case VarState::kFreeZero:
            eligible = std::abs(d) > opt_.optimality_tolerance;
            break;
          case VarState::kBasic:
            break;
        }
        if (!eligible) continue;
        if (bland_) {
          enter = j;
          enter_d = d;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          enter = j;
          enter_d = d;
        }
      }
      if (enter == total) return LpStatus::kOptimal;

      const double dir = enter_d < 0.0 ? 1.0 : -1.0;
      const Eigen::VectorXd alpha = ftran(enter);

      // Ratio test, including the entering variable's own bound flip.
      double theta = up_[enter] - lo_[enter];
      if (!std::isfinite(theta)) theta = kInf;
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      for (Eigen::Index r = 0; r < m_; ++r) {
        const double a = alpha(r);
        if (std::abs(a) <= opt_.pivot_tolerance) continue;
        const std::size_t j = basis_[static_cast<std::size_t>(r)];
        const double rate = -dir * a;
        double t;
        bool to_upper;
        if (rate < 0.0) {
          if (!std::isfinite(lo_[j])) continue;
          t = (x_[j] - lo_[j]) / -rate;
          to_upper = false;
        } else {
          if (!std::isfinite(up_[j])) continue;
          t = (up_[j] - x_[j]) / rate;
          to_upper = true;
        }
        t = std::max(t, 0.0);
        bool take = false;
        if (t < theta - kTieTolerance) {
          take = true;
        } else if (leave >= 0 && t <= theta + kTieTolerance) {
          const std::size_t current = basis_[static_cast<std::size_t>(leave)];
          take = bland_ ? j < current : std::abs(a) > std::abs(alpha(leave));
        }
        if (take) {
          theta = std::min(theta, t);
          leave = r;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return LpStatus::kUnbounded;
      ++iterations;

      if (theta <= kTieTolerance) {
        if (++degenerate_run_ > opt_.degenerate_limit) bland_ = true;
      } else {
        // Progress was made, so the stall is broken.
        degenerate_run_ = 0;
        bland_ = false;
      }

      x_[enter] += dir * theta;
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (alpha(r) != 0.0) x_[basis_[static_cast<std::size_t>(r)]] -= dir * theta * alpha(r);
      }
      if (leave < 0) {
        // Bound flip: no basis change.
        if (dir > 0.0) {
          x_[enter] = up_[enter];
          state_[enter] = VarState::kAtUpper;
        } else {
          x_[enter] = lo_[enter];
          state_[enter] = VarState::kAtLower;
        }
        continue;
      }
      const std::size_t out = basis_[static_cast<std::size_t>(leave)];
      if (leave_to_upper && !fixed(out)) {
        x_[out] = up_[out];
        state_[out] = VarState::kAtUpper;
      } else {
        x_[out] = leave_to_upper ? up_[out] : lo_[out];
        state_[out] = VarState::kAtLower;
      }
      basis_[static_cast<std::size_t>(leave)] = enter;
      state_[enter] = VarState::kBasic;
      Eta eta;
      eta.row = leave;
      eta.pivot = alpha(leave);
      for (Eigen::Index r = 0; r < m_; ++r) {
        if (r != leave && alpha(r) != 0.0) {
          eta.index.push_back(r);
          eta.value.push_back(alpha(r));
        }
      }
      etas_.push_back(std::move(eta));
    }
  }

  // No rows: each variable sits at whichever bound its cost prefers.
  LpStatus solve_unconstrained() {
    for (std::size_t j = 0; j < num_cols(); ++j) {
      const double c = cost_[j];
      if (c > 0.0) {
        if (!std::isfinite(lo_[j])) return LpStatus::kUnbounded;
        x_[j] = lo_[j];
      } else if (c < 0.0) {
        if (!std::isfinite(up_[j])) return LpStatus::kUnbounded;
        x_[j] = up_[j];
      }
    }
    return LpStatus::kOptimal;
  }

  SimplexOptions opt_;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  Eigen::SparseMatrix<double> A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_struct_;
  Eigen::VectorXd row_scale_;
  double cost_scale_ = 1.0;

  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<Eigen::Index> art_row_;
  std::vector<double> art_sign_;

  mutable BasisFactor lu_;
  std::vector<Eta> etas_;
  bool bland_ = false;
  int degenerate_run_ = 0;
};

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  if (lp.b.size() != m || static_cast<Eigen::Index>(lp.sense.size()) != m || lp.c.size() != n ||
      lp.lower.size() != n || lp.upper.size() != n) {
    throw std::invalid_argument("linear program dimensions do not agree");
  }
  RevisedSimplex solver(lp, options);
  SimplexResult result = solver.run();
  if (result.status == LpStatus::kOptimal) {
    result.objective = lp.c.dot(result.x);
    if (result.y.size() != m) result.y = Eigen::VectorXd::Zero(m);
  } else {
    result.x = Eigen::VectorXd();
    result.y = Eigen::VectorXd();
  }
  return result;
}

}  // namespace ibtree
