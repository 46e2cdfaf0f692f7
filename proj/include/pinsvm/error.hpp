#pragma once

#include <stdexcept>
#include <string>

namespace pinsvm {

/// Malformed input file or cell.
class parse_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The dual problem has no feasible point (empty box or unreachable equality).
class infeasible_problem : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A model file that cannot be read back.
class model_format_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace pinsvm
