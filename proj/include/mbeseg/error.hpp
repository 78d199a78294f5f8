#pragma once
#include <stdexcept>
#include <string>

namespace mbeseg {

enum class ErrorKind {
  invalid_grid,        // grid too small for the requested operation
  invalid_parameter,   // out-of-range coefficient, bad shape, size mismatch
  degenerate_init,     // initial region empty or covers the whole grid
  nonpositive_energy,  // E1 <= 0, sqrt undefined
  scheme_instability,  // FDM symbol not positive for (tau, mu, alpha)
  divergence,          // non-finite or exploding level set during stepping
  config,              // config file syntax / unknown key / constraint
  io,                  // missing file, unreadable path, write failure
  format,              // unsupported or corrupt image data
  invalid_mask,        // non-binary input where a {0,1} mask is required
  invalid_fixture,     // inconsistent fixture geometry
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

} // namespace mbeseg
