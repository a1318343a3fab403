#pragma once

#include <stdexcept>
#include <string>

namespace klcell {

// Error taxonomy shared by the library and the CLI exit codes:
// Config/Domain -> usage (2), Truncation/Resource -> resource (3).
enum class ErrorKind { Config, Domain, Truncation, Resource, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg, long needed_radius = -1)
      : std::runtime_error(std::move(msg)), kind_(kind), needed_radius_(needed_radius) {}

  ErrorKind kind() const { return kind_; }

  // For truncation errors: the minimal sufficient radius, when computable.
  long needed_radius() const { return needed_radius_; }

private:
  ErrorKind kind_;
  long needed_radius_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
[[noreturn]] inline void fail_domain(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }
[[noreturn]] inline void fail_truncation(const std::string& msg, long needed = -1) {
  throw Error(ErrorKind::Truncation, msg, needed);
}
[[noreturn]] inline void fail_internal(const std::string& msg) { throw Error(ErrorKind::Internal, msg); }

}  // namespace klcell
