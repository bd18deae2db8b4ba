#pragma once

#include "tpsim/model/formula.hpp"

#include <array>
#include <string>

namespace tpsim::model {

enum class ModelName { CICS, OICS, PICS, OIOS, PIOS, PIPS, OICS_R, PICS_R };

// A sequential imputation model: one formula per post-baseline timepoint,
// fitted separately by treatment arm (and final pattern for PIPS).
// Residual-mode models regress on centered history (R0..R2) instead of
// raw outcomes.
struct ModelSpec {
  ModelName name = ModelName::CICS;
  std::array<Formula, 3> formulas;  // timepoints 1..3
  bool by_final_pattern = false;
  bool residual_mode = false;
};

ModelSpec builtin_spec(ModelName name);

const char* to_string(ModelName name);
ModelName model_name_from_string(const std::string& text);

constexpr std::array<ModelName, 8> kAllModelNames{
    ModelName::CICS,  ModelName::OICS,   ModelName::PICS,   ModelName::OIOS,
    ModelName::PIOS,  ModelName::PIPS,   ModelName::OICS_R, ModelName::PICS_R};

}  // namespace tpsim::model
