#pragma once

#include <stdexcept>
#include <string>

namespace gfd {

enum class Errc {
  domain = 1,
  structural,
  resource,
  degenerate,
  identity,
  unsupported,
  io,
  config,
  aliasing,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gfd
