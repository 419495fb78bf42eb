#pragma once

#include <stdexcept>
#include <string>

namespace ibtree {

// Malformed or unreadable input files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// A request outside the problem's domain, e.g. an information level D larger
// than I(X;Y) or a degenerate environment with no relevant information.
class InfeasibleError : public std::domain_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace ibtree
