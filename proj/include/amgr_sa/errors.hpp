#ifndef AMGR_SA_ERRORS_HPP
#define AMGR_SA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amgr_sa {

/// Operand shapes do not agree.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A splitting violated the diagonal-dominance constraint it was required to satisfy.
struct InfeasibleSplitting : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coarsening selected every point as coarse; no hierarchy can be formed.
struct CoarseningStalled : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace amgr_sa

#endif
