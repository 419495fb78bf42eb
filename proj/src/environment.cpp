#include "ibtree/environment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ibtree/error.hpp"
#include "ibtree/information.hpp"

namespace ibtree {

namespace {

constexpr double kPriorSumTolerance = 1e-12;
// Sidecar files are typed by hand; accept their rounding and renormalize.
constexpr double kSidecarSumTolerance = 1e-9;

int depth_for_side(long side, const std::string& what) {
  if (side <= 0 || (side & (side - 1)) != 0) {
    throw FormatError(what + ": side length " + std::to_string(side) + " is not a power of two");
  }
  int ell = 0;
  while ((1L << ell) < side) ++ell;
  return ell;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double parse_double(std::string_view field, const std::string& where) {
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw FormatError(where + ": invalid number '" + std::string(field) + "'");
  }
  return value;
}

// Square CSV grid -> (side, row-major values).
std::pair<int, Eigen::VectorXd> parse_csv_grid(const std::string& text, const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), where));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  const auto side = static_cast<long>(rows.size());
  const int ell = depth_for_side(side, where);
  Eigen::VectorXd values(side * side);
  for (long r = 0; r < side; ++r) {
    if (static_cast<long>(rows[r].size()) != side) {
      throw FormatError(where + ": row " + std::to_string(r) + " has " +
                        std::to_string(rows[r].size()) + " columns, expected " + std::to_string(side));
    }
    for (long c = 0; c < side; ++c) values(r * side + c) = rows[r][c];
  }
  return {ell, values};
}

// Whitespace/comment aware token reader for PGM headers.
class PgmHeader {
 public:
  explicit PgmHeader(const std::string& data) : data_(data) {}

  long next_int(const std::string& where) {
    skip();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError(where + ": truncated or malformed PGM");
    return std::stol(data_.substr(start, pos_ - start));
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip() {
    while (pos_ < data_.size()) {
      if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  std::size_t pos_ = 0;
};

std::pair<int, Eigen::VectorXd> parse_pgm(const std::string& data, const std::string& where) {
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5')) {
    throw FormatError(where + ": not a P2/P5 PGM file");
  }
  const bool binary = data[1] == '5';
  PgmHeader header(data);
  header.advance(2);
  const long width = header.next_int(where);
  const long height = header.next_int(where);
  const long maxval = header.next_int(where);
  if (width != height) throw FormatError(where + ": PGM image is not square");
  if (maxval <= 0 || maxval > 65535) throw FormatError(where + ": maxval out of range");
  const int ell = depth_for_side(width, where);

  const long n = width * height;
  Eigen::VectorXd values(n);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    header.advance(1);
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (data.size() < header.pos() + static_cast<std::size_t>(n) * bytes_per) {
      throw FormatError(where + ": truncated PGM raster");
    }
    const auto* raster = reinterpret_cast<const unsigned char*>(data.data() + header.pos());
    for (long i = 0; i < n; ++i) {
      long v = bytes_per == 2 ? (raster[2 * i] << 8) | raster[2 * i + 1] : raster[i];
      if (v > maxval) throw FormatError(where + ": pixel value exceeds maxval");
      values(i) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    for (long i = 0; i < n; ++i) {
      const long v = header.next_int(where);
      if (v > maxval) throw FormatError(where + ": pixel value exceeds maxval");
      values(i) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return {ell, values};
}

}  // namespace

Environment::Environment(int ell, Eigen::VectorXd prior, Eigen::VectorXd relevance)
    : ell_(ell), prior_(std::move(prior)), relevance_(std::move(relevance)) {
  if (ell < 0 || ell > kMaxEnvDepth) throw std::invalid_argument("environment depth out of range");
  const Eigen::Index n = Eigen::Index{1} << (2 * ell);
  if (prior_.size() != n || relevance_.size() != n) {
    throw std::invalid_argument("environment arrays must have 4^ell entries");
  }
  if ((prior_.array() < 0.0).any() || !prior_.allFinite()) {
    throw std::invalid_argument("prior has negative or non-finite entries");
  }
  if (std::abs(prior_.sum() - 1.0) > kPriorSumTolerance) {
    throw std::invalid_argument("prior does not sum to 1");
  }
  if (!relevance_.allFinite() || (relevance_.array() < 0.0).any() || (relevance_.array() > 1.0).any()) {
    throw std::invalid_argument("relevance values must lie in [0, 1]");
  }
}

Environment Environment::with_uniform_prior(int ell, Eigen::VectorXd relevance) {
  const Eigen::Index n = Eigen::Index{1} << (2 * ell);
  return Environment(ell, Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), std::move(relevance));
}

EnvFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm") return EnvFormat::kPgm;
  if (ext == ".csv") return EnvFormat::kCsv;
  throw std::invalid_argument("cannot infer environment format from '" + path.string() + "'");
}

Environment load_environment(const std::filesystem::path& path, EnvFormat format,
                             const std::optional<std::filesystem::path>& prior_path) {
  const std::string where = path.string();
  const std::string data = read_file(path);
  auto [ell, relevance] = format == EnvFormat::kPgm ? parse_pgm(data, where) : parse_csv_grid(data, where);
  if (ell > kMaxEnvDepth) throw FormatError(where + ": grid too large");
  if ((relevance.array() < 0.0).any() || (relevance.array() > 1.0).any()) {
    throw FormatError(where + ": relevance values must lie in [0, 1]");
  }
  if (!prior_path) return Environment::with_uniform_prior(ell, std::move(relevance));

  const std::string pwhere = prior_path->string();
  auto [pell, prior] = parse_csv_grid(read_file(*prior_path), pwhere);
  if (pell != ell) throw FormatError(pwhere + ": prior shape differs from the environment");
  if ((prior.array() < 0.0).any()) throw FormatError(pwhere + ": negative prior entry");
  const double total = prior.sum();
  if (std::abs(total - 1.0) > kSidecarSumTolerance) {
    throw FormatError(pwhere + ": prior does not sum to 1");
  }
  prior /= total;
  return Environment(ell, std::move(prior), std::move(relevance));
}

std::string grid_to_csv(const Eigen::VectorXd& values, int side) {
  std::string out;
  char buf[64];
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (c > 0) out.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), values(r * side + c));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

std::string relevance_to_csv(const Environment& env) { return grid_to_csv(env.relevance(), env.side()); }

double mutual_information_xy(const Environment& env) {
  const Eigen::VectorXd& p = env.prior();
  const Eigen::VectorXd& r = env.relevance();
  const double py1 = p.dot(r);
  double conditional = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) conditional += p(i) * binary_entropy(r(i));
  return std::max(0.0, binary_entropy(py1) - conditional);
}

}  // namespace ibtree
