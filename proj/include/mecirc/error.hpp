#ifndef MECIRC_ERROR_HPP
#define MECIRC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mecirc {

/// Failure categories reported by the library.
enum class Errc {
  NotPositiveDefinite,
  BandTooWide,
  NonRealSpectrum,
  Unstable,
  InfeasibleStart,
  BadInput,
  AsymmetricRow,
  NoConvergence,
  RequiresFullR,
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::BandTooWide: return "BandTooWide";
    case Errc::NonRealSpectrum: return "NonRealSpectrum";
    case Errc::Unstable: return "Unstable";
    case Errc::InfeasibleStart: return "InfeasibleStart";
    case Errc::BadInput: return "BadInput";
    case Errc::AsymmetricRow: return "AsymmetricRow";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::RequiresFullR: return "RequiresFullR";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mecirc

#endif  // MECIRC_ERROR_HPP
