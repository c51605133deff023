#pragma once

#include <cstdint>
#include <string>

#include "coopinit/errors.hpp"

namespace coopinit {

enum class TrainStage : std::uint8_t {
  kCooperative = 0,
  kAdversarial = 1,
  kDone = 2,
};

inline const char* stage_name(TrainStage s) {
  switch (s) {
    case TrainStage::kCooperative:
      return "cooperative";
    case TrainStage::kAdversarial:
      return "adversarial";
    case TrainStage::kDone:
      return "done";
  }
  return "?";
}

inline TrainStage stage_from_name(const std::string& name) {
  if (name == "cooperative") return TrainStage::kCooperative;
  if (name == "adversarial") return TrainStage::kAdversarial;
  if (name == "done") return TrainStage::kDone;
  throw FormatError("unknown stage name: " + name);
}

}  // namespace coopinit
