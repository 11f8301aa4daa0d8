#pragma once

#include <stdexcept>
#include <string>

namespace fiberwalk {

// Invalid geometry (overlapping cores, window too small, pitch exceeding the
// circumference, ...). Distinct from std::domain_error, which is reserved for
// out-of-domain arguments such as even core counts or jitter >= 0.5.
class geometry_error : public std::runtime_error {
public:
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergent root search, eigensolver breakdown,
// spectral aliasing past the hard limit.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed config or data file. Carries a line number when one is known.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace fiberwalk
