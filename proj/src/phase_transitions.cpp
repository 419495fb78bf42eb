#include "ibtree/phase_transitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ibtree/qsearch.hpp"

namespace ibtree {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_breakpoint(double first, double beta) {
  return beta <= first + kTransitionMergeTolerance * std::max(std::abs(first), 1.0);
}

bool entry_less(const TransitionEntry& a, const TransitionEntry& b) {
  if (a.beta != b.beta) return a.beta < b.beta;
  return a.node < b.node;
}

// [begin, end) ranges of `entries` that share a breakpoint.
std::vector<std::pair<std::size_t, std::size_t>> breakpoint_groups(const std::vector<TransitionEntry>& entries) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    while (j < entries.size() && same_breakpoint(entries[i].beta, entries[j].beta)) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  return groups;
}

}  // namespace

std::vector<NodePTRecord> node_phase_records(const InfoIncrements& inc) {
  const int ell = inc.ell;
  const std::size_t interior = interior_count(ell);
  std::vector<NodePTRecord> records(interior);

  for (std::size_t idx = interior; idx-- > 0;) {
    const NodeId t = node_at(idx);
    const double one_step = critical_beta_one_step(inc, t);
    const double own_x = inc.dx(t);
    const double own_y = inc.dy(t);

    // Candidate breakpoints from the children's subtrees (none below depth ell-1).
    std::vector<TransitionEntry> candidates;
    if (t.depth < ell - 1) {
      for (int c = 0; c < kBranching; ++c) {
        auto& child = records[4 * idx + 1 + static_cast<std::size_t>(c)].transitions;
        candidates.insert(candidates.end(), child.begin(), child.end());
      }
      std::sort(candidates.begin(), candidates.end(), entry_less);
    }

    double beta_q = one_step;
    double dx_pt = own_x;
    double dy_pt = own_y;
    std::size_t absorbed = 0;

    if (!candidates.empty() && !(one_step <= candidates.front().beta)) {
      // Scan the intervals (lb, ub] cut by the children's breakpoints.  On
      // each, Q(t; beta) = min(dX - beta dY, 0) with dX, dY summing this node
      // and every child transition already crossed.
      const auto groups = breakpoint_groups(candidates);
      double dx_run = own_x;
      double dy_run = own_y;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const double lb = candidates[groups[g].first].beta;
        const double ub = g + 1 < groups.size() ? candidates[groups[g + 1].first].beta : kInf;
        for (std::size_t e = groups[g].first; e < groups[g].second; ++e) {
          dx_run += candidates[e].dx;
          dy_run += candidates[e].dy;
        }
        const double candidate = dy_run > 0.0 ? dx_run / dy_run : kInf;
        const bool one_step_inside = lb <= one_step && one_step <= ub;
        // The line through this interval is positive at lb (no root was found
        // earlier), so only the upper end needs testing; clamp against
        // round-off at lb.
        if (candidate <= ub) {
          beta_q = std::max(candidate, lb);
          if (one_step_inside) beta_q = std::min(beta_q, one_step);
        } else if (one_step_inside) {
          beta_q = one_step;
        } else {
          continue;
        }
        dx_pt = dx_run;
        dy_pt = dy_run;
        absorbed = groups[g].second;
        break;
      }
    }

    NodePTRecord& rec = records[idx];
    rec.beta_q_cr = beta_q;
    if (std::isfinite(beta_q)) {
      rec.transitions.reserve(1 + candidates.size() - absorbed);
      rec.transitions.push_back({beta_q, dx_pt, dy_pt, t});
      rec.transitions.insert(rec.transitions.end(), candidates.begin() + static_cast<std::ptrdiff_t>(absorbed),
                             candidates.end());
    }
    // Children's lists are no longer needed once merged upward.
    if (t.depth < ell - 1) {
      for (int c = 0; c < kBranching; ++c) {
        auto& child = records[4 * idx + 1 + static_cast<std::size_t>(c)].transitions;
        child.clear();
        child.shrink_to_fit();
      }
    }
  }
  return records;
}

PhaseTransitionSet phase_set_from_records(const std::vector<NodePTRecord>& records) {
  PhaseTransitionSet pts;
  if (records.empty()) return pts;
  std::vector<TransitionEntry> entries = records.front().transitions;
  std::sort(entries.begin(), entries.end(), entry_less);
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& [begin, end] : breakpoint_groups(entries)) {
    for (std::size_t e = begin; e < end; ++e) {
      cx += entries[e].dx;
      cy += entries[e].dy;
    }
    pts.betas.push_back(entries[begin].beta);
    pts.cum_x.push_back(cx);
    pts.cum_y.push_back(cy);
  }
  return pts;
}

PhaseTransitionSet tree_phase_transitions(const InfoIncrements& inc) {
  return phase_set_from_records(node_phase_records(inc));
}

double beta_q_critical(const std::vector<NodePTRecord>& records, const NodeId& t, int ell) {
  if (t.depth >= ell) return kInf;
  return records[linear_index(t)].beta_q_cr;
}

double beta_q_critical(const InfoIncrements& inc, const NodeId& t) {
  if (t.depth >= inc.ell) return kInf;
  return beta_q_critical(node_phase_records(inc), t, inc.ell);
}

namespace {

void refine_bracket(const InfoIncrements& inc, double lo, double hi, const TreeSelection& at_lo,
                    const TreeSelection& at_hi, double width, std::vector<BetaBracket>& out) {
  if (at_lo == at_hi) return;
  if (hi - lo <= width) {
    out.push_back({lo, hi});
    return;
  }
  const double mid = 0.5 * (lo + hi);
  const TreeSelection at_mid = qtree_search(inc, mid);
  refine_bracket(inc, lo, mid, at_lo, at_mid, width, out);
  refine_bracket(inc, mid, hi, at_mid, at_hi, width, out);
}

}  // namespace

std::vector<BetaBracket> sweep_transition_oracle(const InfoIncrements& inc, std::span<const double> grid,
                                                 double width) {
  std::vector<BetaBracket> brackets;
  if (grid.size() < 2) return brackets;
  TreeSelection prev = qtree_search(inc, grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    TreeSelection next = qtree_search(inc, grid[i]);
    refine_bracket(inc, grid[i - 1], grid[i], prev, next, width, brackets);
    prev = std::move(next);
  }
  return brackets;
}

double dual_value_from_pts(const PhaseTransitionSet& pts, double D, double beta) {
  const auto j = static_cast<std::size_t>(std::lower_bound(pts.betas.begin(), pts.betas.end(), beta) - pts.betas.begin());
  if (j == 0) return beta * D;
  return pts.cum_x[j - 1] + beta * (D - pts.cum_y[j - 1]);
}

std::string phases_to_csv(const PhaseTransitionSet& pts) {
  std::string out = "index,beta,cum_x,cum_y\n";
  char buf[128];
  for (std::size_t j = 0; j < pts.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", j + 1, pts.betas[j], pts.cum_x[j], pts.cum_y[j]);
    out += buf;
  }
  return out;
}

}  // namespace ibtree
