#pragma once

#include <stdexcept>
#include <string>

namespace bift {

// Error categories. Blob/checkpoint decoding keeps distinct codes so callers
// can tell a corrupt header from a wrong-precision file.
enum class Err {
  BadMagic,
  BadVersion,
  BadRank,
  DtypeMismatch,
  Truncated,
  DimMismatch,
  InvalidArgument,
  Config,
  Io,
  Numeric,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

inline void check(bool ok, Err code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace bift
