#include "curvedim/error.hpp"

namespace curvedim {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::UnsupportedFamily: return "UnsupportedFamily";
    case Errc::BadLevels: return "BadLevels";
    case Errc::GridNotDyadic: return "GridNotDyadic";
    case Errc::NonUniformGrid: return "NonUniformGrid";
    case Errc::LayoutMismatch: return "LayoutMismatch";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::RankRequestTooLarge: return "RankRequestTooLarge";
    case Errc::InvalidMethod: return "InvalidMethod";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::WindowTooLong: return "WindowTooLong";
    case Errc::LagWindowEmpty: return "LagWindowEmpty";
    case Errc::NonStationaryAR: return "NonStationaryAR";
    case Errc::ZeroCurve: return "ZeroCurve";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::DegenerateBasis: return "DegenerateBasis";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::TooFewCurves: return "TooFewCurves";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(Errc code) noexcept {
  switch (code) {
    case Errc::NotSymmetric:
    case Errc::ZeroCurve:
    case Errc::DegenerateBasis:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace curvedim
