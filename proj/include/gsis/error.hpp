#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsis {

enum class ErrorKind {
  InvalidArgument,
  InvalidSignal,
  DuplicatePoints,
  DuplicateNodes,
  RankDeficient,
  InsufficientSamples,
  NonRealAutocorrelation,
  NegativeModulus,
  InvalidLeadingCoefficient,
  NegativeDiscriminant,
  InconsistentData,
  ZeroSignal,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gsis
