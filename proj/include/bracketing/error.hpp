#pragma once

#include <stdexcept>
#include <string>

namespace bracketing {

enum class ErrorKind {
    domain,
    boundedness,
    argument,
    degeneracy,
    assumption,
    certificate,
    no_certificate,
    sampling,
    coverage,
    insufficient_data,
};

const char* to_string(ErrorKind kind);

// Single exception type; callers switch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

    // Coverage failures are defects in the construction rather than bad input.
    bool is_invariant_violation() const noexcept { return kind_ == ErrorKind::coverage; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace bracketing
