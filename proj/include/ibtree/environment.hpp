#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>

namespace ibtree {

// 4^10 cells; the dense per-node arrays stay small below this.
inline constexpr int kMaxEnvDepth = 10;

// A 2^ell x 2^ell grid world with a prior p(x) over its finest cells and a
// binary relevance variable Y, stored as p(Y=1 | x).  Cells are indexed
// row-major with row 0 at the top.
class Environment {
 public:
  // Throws std::invalid_argument unless both vectors have 4^ell entries, the
  // prior is non-negative and sums to 1 within 1e-12, and every relevance
  // value lies in [0, 1].
  Environment(int ell, Eigen::VectorXd prior, Eigen::VectorXd relevance);

  // Uniform prior 1/4^ell.
  static Environment with_uniform_prior(int ell, Eigen::VectorXd relevance);

  int ell() const { return ell_; }
  int side() const { return 1 << ell_; }
  Eigen::Index num_cells() const { return prior_.size(); }
  const Eigen::VectorXd& prior() const { return prior_; }
  const Eigen::VectorXd& relevance() const { return relevance_; }

 private:
  int ell_;
  Eigen::VectorXd prior_;
  Eigen::VectorXd relevance_;
};

enum class EnvFormat { kPgm, kCsv };

// Picks the format from the file extension (.pgm or .csv).
EnvFormat format_from_extension(const std::filesystem::path& path);

// Loads relevance from a PGM (P2/P5, value / maxval) or CSV file.  The prior
// is uniform unless `prior_path` names a CSV of the same shape.  Throws
// FormatError for unreadable or malformed files.
Environment load_environment(const std::filesystem::path& path, EnvFormat format,
                             const std::optional<std::filesystem::path>& prior_path = std::nullopt);

// Canonical CSV text for a square grid of values (shortest round-trip
// decimal form, ',' separated, '\n' terminated rows).
std::string grid_to_csv(const Eigen::VectorXd& values, int side);
std::string relevance_to_csv(const Environment& env);

// I(X;Y) in bits.
double mutual_information_xy(const Environment& env);

}  // namespace ibtree
