#include "ibtree/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "ibtree/error.hpp"

namespace ibtree {

namespace {

constexpr double kFeasibilitySlack = 1e-12;
// Largest order drawn by the sampled determinant test.
constexpr int kMaxSampledOrder = 16;

}  // namespace

int IlpModel::index_of(const NodeId& t) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
  if (it == nodes.end() || !(*it == t)) return -1;
  return static_cast<int>(it - nodes.begin());
}

Eigen::SparseMatrix<double> IlpModel::hierarchy_matrix() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * hierarchy_rows.size());
  for (std::size_t r = 0; r < hierarchy_rows.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    trips.emplace_back(row, hierarchy_rows[r].first, 1.0);
    trips.emplace_back(row, hierarchy_rows[r].second, -1.0);
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(hierarchy_rows.size()), num_vars());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::MatrixXi IlpModel::hierarchy_matrix_int() const {
  Eigen::MatrixXi A = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(hierarchy_rows.size()), num_vars());
  for (std::size_t r = 0; r < hierarchy_rows.size(); ++r) {
    A(static_cast<Eigen::Index>(r), hierarchy_rows[r].first) = 1;
    A(static_cast<Eigen::Index>(r), hierarchy_rows[r].second) = -1;
  }
  return A;
}

Eigen::VectorXd IlpModel::indicator(const TreeSelection& sel) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(num_vars());
  for (const NodeId& t : sel.expanded()) {
    const int i = index_of(t);
    if (i < 0) throw std::invalid_argument("selection node is not a model variable");
    z(i) = 1.0;
  }
  return z;
}

TreeSelection IlpModel::selection(const Eigen::VectorXd& z, double threshold) const {
  std::vector<NodeId> expanded;
  for (int i = 0; i < num_vars(); ++i) {
    if (z(i) > threshold) expanded.push_back(nodes[static_cast<std::size_t>(i)]);
  }
  return TreeSelection(std::move(expanded));
}

IlpModel build_ilp(const InfoIncrements& inc, double D) {
  IlpModel model;
  model.ell = inc.ell;
  model.D = D;
  model.nodes = interior_nodes_lexicographic(inc.ell);
  const int n = model.num_vars();
  model.delta_x.resize(n);
  model.delta_y.resize(n);
  for (int i = 0; i < n; ++i) {
    const NodeId& t = model.nodes[static_cast<std::size_t>(i)];
    model.delta_x(i) = inc.dx(t);
    model.delta_y(i) = inc.dy(t);
  }
  for (int i = 0; i < n; ++i) {
    const NodeId& t = model.nodes[static_cast<std::size_t>(i)];
    if (t.depth > inc.ell - 2) continue;
    for (int c = 0; c < kBranching; ++c) model.hierarchy_rows.emplace_back(model.index_of(t.child(c)), i);
  }
  return model;
}

IlpSolution solve_ilp_bruteforce(const IlpModel& model) {
  if (model.ell > 3) throw std::invalid_argument("brute-force ILP is limited to depth 3");
  std::optional<TreeSelection> best;
  double best_x = std::numeric_limits<double>::infinity();
  for_each_tree(model.ell, [&](const TreeSelection& sel) {
    double ix = 0.0;
    double iy = 0.0;
    for (const NodeId& t : sel.expanded()) {
      const int i = model.index_of(t);
      ix += model.delta_x(i);
      iy += model.delta_y(i);
    }
    if (iy < model.D - kFeasibilitySlack) return;
    if (ix < best_x - kFeasibilitySlack || (ix <= best_x + kFeasibilitySlack && best && sel < *best)) {
      best_x = std::min(best_x, ix);
      best = sel;
    }
  });
  if (!best) throw InfeasibleError("no tree reaches the requested relevant information");
  IlpSolution sol;
  sol.tree = *best;
  sol.z = model.indicator(sol.tree);
  sol.value = sol.z.dot(model.delta_x);
  return sol;
}

namespace {

LinearProgram hierarchy_program(const IlpModel& model, bool with_relevance_row) {
  const int n = model.num_vars();
  const auto rows = static_cast<Eigen::Index>(model.hierarchy_rows.size()) + (with_relevance_row ? 1 : 0);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < model.hierarchy_rows.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    trips.emplace_back(row, model.hierarchy_rows[r].first, 1.0);
    trips.emplace_back(row, model.hierarchy_rows[r].second, -1.0);
  }
  LinearProgram lp;
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.sense.assign(static_cast<std::size_t>(rows), RowSense::kLessEqual);
  if (with_relevance_row) {
    const Eigen::Index last = rows - 1;
    for (int i = 0; i < n; ++i) {
      if (model.delta_y(i) != 0.0) trips.emplace_back(last, i, model.delta_y(i));
    }
    lp.b(last) = model.D;
    lp.sense.back() = RowSense::kGreaterEqual;
  }
  lp.A.resize(rows, n);
  lp.A.setFromTriplets(trips.begin(), trips.end());
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Ones(n);
  return lp;
}

}  // namespace

LpSolution solve_lp_relaxation(const IlpModel& model, const SimplexOptions& options) {
  LinearProgram lp = hierarchy_program(model, true);
  lp.c = model.delta_x;
  const SimplexResult res = solve_simplex(lp, options);
  LpSolution sol;
  sol.status = res.status;
  if (res.status != LpStatus::kOptimal) return sol;
  sol.z = res.x;
  sol.objective = res.objective;
  sol.dual_beta = std::max(res.y(res.y.size() - 1), 0.0);
  return sol;
}

LpSolution solve_lp_soft(const IlpModel& model, double beta, const SimplexOptions& options) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  LinearProgram lp = hierarchy_program(model, false);
  lp.c = model.delta_x - beta * model.delta_y;
  const SimplexResult res = solve_simplex(lp, options);
  LpSolution sol;
  sol.status = res.status;
  sol.dual_beta = beta;
  if (res.status != LpStatus::kOptimal) return sol;
  sol.z = res.x;
  sol.objective = res.objective;
  return sol;
}

double lp_dual_beta(const IlpModel& model, const SimplexOptions& options) {
  const LpSolution sol = solve_lp_relaxation(model, options);
  if (sol.status != LpStatus::kOptimal) throw InfeasibleError("LP relaxation is infeasible");
  return sol.dual_beta;
}

double lp_dual_function(const IlpModel& model, double beta, const SimplexOptions& options) {
  const LpSolution sol = solve_lp_soft(model, beta, options);
  return sol.objective + beta * model.D;
}

std::int64_t integer_determinant(const Eigen::MatrixXi& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const Eigen::Index k = M.rows();
  if (k == 0) return 1;
  std::vector<__int128> a(static_cast<std::size_t>(k * k));
  auto at = [&](Eigen::Index r, Eigen::Index c) -> __int128& { return a[static_cast<std::size_t>(r * k + c)]; };
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) at(r, c) = M(r, c);
  }
  // Bareiss elimination: every intermediate is an exact minor.
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index p = 0; p < k - 1; ++p) {
    if (at(p, p) == 0) {
      Eigen::Index swap = p + 1;
      while (swap < k && at(swap, p) == 0) ++swap;
      if (swap == k) return 0;
      for (Eigen::Index c = 0; c < k; ++c) std::swap(at(p, c), at(swap, c));
      sign = -sign;
    }
    for (Eigen::Index r = p + 1; r < k; ++r) {
      for (Eigen::Index c = p + 1; c < k; ++c) at(r, c) = (at(r, c) * at(p, p) - at(r, p) * at(p, c)) / prev;
      at(r, p) = 0;
    }
    prev = at(p, p);
  }
  return static_cast<std::int64_t>(sign * at(k - 1, k - 1));
}

namespace {

bool row_witness(const Eigen::MatrixXi& A) {
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    int plus = 0;
    int minus = 0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      const int v = A(r, c);
      if (v == 1) {
        ++plus;
      } else if (v == -1) {
        ++minus;
      } else if (v != 0) {
        return false;
      }
    }
    if (plus != 1 || minus != 1) return false;
  }
  return true;
}

bool unit_determinant(std::int64_t det) { return det >= -1 && det <= 1; }

// Row subsets of size k in lexicographic order; columns are restricted to
// those touching the chosen rows since any other column zeroes the minor.
void check_exhaustive(const Eigen::MatrixXi& A, TuCheckResult& result) {
  const auto m = static_cast<int>(A.rows());
  const auto n = static_cast<int>(A.cols());
  for (int k = 1; k <= std::min(m, n); ++k) {
    std::vector<int> rows(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) rows[static_cast<std::size_t>(i)] = i;
    for (;;) {
      std::vector<int> support;
      for (int c = 0; c < n; ++c) {
        for (int r : rows) {
          if (A(r, c) != 0) {
            support.push_back(c);
            break;
          }
        }
      }
      const auto s = static_cast<int>(support.size());
      if (s >= k) {
        std::vector<int> cols(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) cols[static_cast<std::size_t>(i)] = i;
        for (;;) {
          Eigen::MatrixXi sub(k, k);
          for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
              sub(i, j) = A(rows[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])]);
            }
          }
          ++result.submatrices_checked;
          if (!unit_determinant(integer_determinant(sub))) {
            result.totally_unimodular = false;
            return;
          }
          int i = k - 1;
          while (i >= 0 && cols[static_cast<std::size_t>(i)] == s - k + i) --i;
          if (i < 0) break;
          ++cols[static_cast<std::size_t>(i)];
          for (int j = i + 1; j < k; ++j) cols[static_cast<std::size_t>(j)] = cols[static_cast<std::size_t>(j - 1)] + 1;
        }
      }
      int i = k - 1;
      while (i >= 0 && rows[static_cast<std::size_t>(i)] == m - k + i) --i;
      if (i < 0) break;
      ++rows[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) rows[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  result.totally_unimodular = true;
}

std::vector<int> sample_subset(int universe, int k, std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<std::size_t>(universe));
  for (int i = 0; i < universe; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, universe - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Random square submatrices of order up to kMaxSampledOrder.  Rows are drawn
// uniformly; columns are drawn from the support of those rows when it is
// large enough, since a column outside it forces a zero determinant.
template <typename Entry>
void check_sampled(int m, int n, const Entry& entry, const std::vector<std::vector<int>>& row_support,
                   std::uint64_t samples, std::uint64_t seed, TuCheckResult& result) {
  std::mt19937_64 rng(seed);
  const int max_order = std::min({m, n, kMaxSampledOrder});
  result.totally_unimodular = true;
  if (max_order == 0) return;
  std::uniform_int_distribution<int> order(1, max_order);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const int k = order(rng);
    const std::vector<int> rows = sample_subset(m, k, rng);
    std::vector<int> support;
    for (int r : rows) support.insert(support.end(), row_support[static_cast<std::size_t>(r)].begin(),
                                      row_support[static_cast<std::size_t>(r)].end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    std::vector<int> cols;
    if (static_cast<int>(support.size()) >= k) {
      for (int i : sample_subset(static_cast<int>(support.size()), k, rng)) cols.push_back(support[static_cast<std::size_t>(i)]);
    } else {
      cols = sample_subset(n, k, rng);
    }
    Eigen::MatrixXi sub(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sub(i, j) = entry(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    }
    ++result.submatrices_checked;
    if (!unit_determinant(integer_determinant(sub))) {
      result.totally_unimodular = false;
      return;
    }
  }
}

}  // namespace

TuCheckResult tu_check(const Eigen::MatrixXi& A, TuCheckMode mode) {
  TuCheckResult result;
  result.structural_witness = row_witness(A);
  if (mode.kind == TuCheckMode::kExhaustive) {
    if (A.rows() > 6) throw std::invalid_argument("exhaustive unimodularity check is limited to 6 rows");
    check_exhaustive(A, result);
    return result;
  }
  std::vector<std::vector<int>> support(static_cast<std::size_t>(A.rows()));
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      if (A(r, c) != 0) support[static_cast<std::size_t>(r)].push_back(static_cast<int>(c));
    }
  }
  check_sampled(static_cast<int>(A.rows()), static_cast<int>(A.cols()), [&](int r, int c) { return A(r, c); },
                support, mode.samples, mode.seed, result);
  return result;
}

TuCheckResult tu_check(const Eigen::SparseMatrix<double>& A, TuCheckMode mode) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rows = A;
  rows.makeCompressed();
  for (Eigen::Index k = 0; k < rows.nonZeros(); ++k) {
    const double v = rows.valuePtr()[k];
    if (v != std::round(v) || std::abs(v) > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("unimodularity check needs an integer matrix");
    }
  }
  if (mode.kind == TuCheckMode::kExhaustive) {
    return tu_check(Eigen::MatrixXi(A.toDense().cast<int>()), mode);
  }
  TuCheckResult result;
  result.structural_witness = true;
  std::vector<std::vector<int>> support(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    int plus = 0;
    int minus = 0;
    bool other = false;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
      if (it.value() == 0.0) continue;
      support[static_cast<std::size_t>(r)].push_back(static_cast<int>(it.col()));
      if (it.value() == 1.0) {
        ++plus;
      } else if (it.value() == -1.0) {
        ++minus;
      } else {
        other = true;
      }
    }
    if (plus != 1 || minus != 1 || other) result.structural_witness = false;
  }
  auto entry = [&](int r, int c) { return static_cast<int>(rows.coeff(r, c)); };
  check_sampled(static_cast<int>(rows.rows()), static_cast<int>(rows.cols()), entry, support, mode.samples,
                mode.seed, result);
  return result;
}

std::string ilp_to_mps(const IlpModel& model) {
  auto col_name = [&](int i) { return "z_r" + model.nodes[static_cast<std::size_t>(i)].path(); };
  std::string out = "NAME          IBTREE_L" + std::to_string(model.ell) + "\nROWS\n N  COST\n G  RELEV\n";
  for (std::size_t r = 0; r < model.hierarchy_rows.size(); ++r) out += " L  H" + std::to_string(r) + "\n";

  // Column-wise entries of the hierarchy matrix.
  std::vector<std::vector<std::pair<std::size_t, int>>> entries(static_cast<std::size_t>(model.num_vars()));
  for (std::size_t r = 0; r < model.hierarchy_rows.size(); ++r) {
    entries[static_cast<std::size_t>(model.hierarchy_rows[r].first)].emplace_back(r, 1);
    entries[static_cast<std::size_t>(model.hierarchy_rows[r].second)].emplace_back(r, -1);
  }
  char buf[160];
  out += "COLUMNS\n";
  for (int i = 0; i < model.num_vars(); ++i) {
    const std::string name = col_name(i);
    std::snprintf(buf, sizeof(buf), "    %-12s  COST      %.9g\n", name.c_str(), model.delta_x(i));
    out += buf;
    std::snprintf(buf, sizeof(buf), "    %-12s  RELEV     %.9g\n", name.c_str(), model.delta_y(i));
    out += buf;
    for (const auto& [r, v] : entries[static_cast<std::size_t>(i)]) {
      const std::string row = "H" + std::to_string(r);
      std::snprintf(buf, sizeof(buf), "    %-12s  %-8s  %d\n", name.c_str(), row.c_str(), v);
      out += buf;
    }
  }
  std::snprintf(buf, sizeof(buf), "RHS\n    RHS           RELEV     %.9g\n", model.D);
  out += buf;
  out += "BOUNDS\n";
  for (int i = 0; i < model.num_vars(); ++i) {
    std::snprintf(buf, sizeof(buf), " UP BND       %-12s  1\n", col_name(i).c_str());
    out += buf;
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace ibtree
