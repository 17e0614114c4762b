#pragma once

#include <stdexcept>
#include <string>

namespace omls {

// The integrator hit a non-finite or runaway state. Carries the first bad
// time so misconfigured units can be traced.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t_us, const std::string& what)
        : std::runtime_error(what), t_us_(t_us) {}
    double time_us() const { return t_us_; }

private:
    double t_us_;
};

// Configuration problems: unreadable file, parse error, unknown key, value
// out of range.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace omls
