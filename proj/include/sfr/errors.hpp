#ifndef SFR_ERRORS_HPP
#define SFR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sfr {

enum class ErrorCode {
  NoSynchronousGeneration,
  NonPositiveParameter,
  HeterogeneousStepTiming,
  Overdamped,
  Undamped,
  NoDip,
  StepTooLarge,
  NonFinite,
  DegenerateAmplitude,
  InvalidScenario,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoSynchronousGeneration: return "NoSynchronousGeneration";
    case ErrorCode::NonPositiveParameter:    return "NonPositiveParameter";
    case ErrorCode::HeterogeneousStepTiming: return "HeterogeneousStepTiming";
    case ErrorCode::Overdamped:              return "Overdamped";
    case ErrorCode::Undamped:                return "Undamped";
    case ErrorCode::NoDip:                   return "NoDip";
    case ErrorCode::StepTooLarge:            return "StepTooLarge";
    case ErrorCode::NonFinite:               return "NonFinite";
    case ErrorCode::DegenerateAmplitude:     return "DegenerateAmplitude";
    case ErrorCode::InvalidScenario:         return "InvalidScenario";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfr

#endif  // SFR_ERRORS_HPP
