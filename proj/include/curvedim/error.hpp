#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvedim {

enum class Errc {
  UnsupportedFamily,
  BadLevels,
  GridNotDyadic,
  NonUniformGrid,
  LayoutMismatch,
  LagTooLarge,
  NotSymmetric,
  RankRequestTooLarge,
  InvalidMethod,
  InvalidConfig,
  WindowTooLong,
  LagWindowEmpty,
  NonStationaryAR,
  ZeroCurve,
  NegativeDensity,
  DegenerateBasis,
  MalformedCsv,
  TooFewCurves,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Numerical failures map to exit code 3, everything else is a validation
/// problem (exit code 2).
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace curvedim
