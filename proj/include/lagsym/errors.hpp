#ifndef LAGSYM_ERRORS_HPP
#define LAGSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lagsym {

// Syntax / resolution failure in a system spec.  Carries 1-based source
// location so the CLI can point at the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int col, const std::string& what)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + what),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// A phase point violated a declared guard (too close to a singular set).
class GuardViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rank decisions could not be made reliably: no clear singular-value gap,
// null-space dimension changed between nearby points, or the rank of a
// constraint matrix varies across the sample set.
class RankInstability : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Newton projection onto a constraint surface failed everywhere.
class EmptySurface : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lagsym

#endif
