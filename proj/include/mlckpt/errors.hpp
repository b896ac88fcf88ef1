#pragma once

#include <stdexcept>
#include <string>

namespace mlckpt {

enum class errc {
  invalid_argument,
  infeasible_policy,
  unrecoverable_level,
  policy_diverges,
  domain_error,
  no_convergence,
  io_error,
};

/// Library-wide exception carrying a coarse error class so the C API can map
/// failures onto status codes without string matching.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace mlckpt
