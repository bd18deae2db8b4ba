#include "tpsim/model/spec.hpp"

#include "tpsim/common.hpp"

namespace tpsim::model {

ModelSpec builtin_spec(ModelName name) {
  ModelSpec spec;
  spec.name = name;
  auto set = [&spec](const char* f1, const char* f2, const char* f3) {
    spec.formulas = {parse_formula(f1), parse_formula(f2), parse_formula(f3)};
  };
  switch (name) {
    case ModelName::CICS:
      set("Y1 = Y0", "Y2 = Y0 Y1", "Y3 = Y0 Y1 Y2");
      break;
    case ModelName::OICS:
      set("Y1 = D1 Y0", "Y2 = D2 Y0 Y1", "Y3 = D3 Y0 Y1 Y2");
      break;
    case ModelName::PICS:
      set("Y1 = P1 Y0", "Y2 = P2 Y0 Y1", "Y3 = P3 Y0 Y1 Y2");
      break;
    case ModelName::OIOS:
      set("Y1 = D1 Y0", "Y2 = D2 Y0 Y1 D2*Y1", "Y3 = D3 Y0 Y1 D3*Y1 Y2 D3*Y2");
      break;
    case ModelName::PIOS:
      set("Y1 = P1 Y0", "Y2 = P2 Y0 Y1 D1*Y1", "Y3 = P3 Y0 Y1 D1*Y1 Y2 D2*Y2");
      break;
    case ModelName::PIPS:
      set("Y1 = Y0", "Y2 = Y0 Y1", "Y3 = Y0 Y1 Y2");
      spec.by_final_pattern = true;
      break;
    case ModelName::OICS_R:
      set("Y1 = D1 R0", "Y2 = D2 R0 R1", "Y3 = D3 R0 R1 R2");
      spec.residual_mode = true;
      break;
    case ModelName::PICS_R:
      set("Y1 = P1 R0", "Y2 = P2 R0 R1", "Y3 = P3 R0 R1 R2");
      spec.residual_mode = true;
      break;
  }
  return spec;
}

const char* to_string(ModelName name) {
  switch (name) {
    case ModelName::CICS: return "CICS";
    case ModelName::OICS: return "OICS";
    case ModelName::PICS: return "PICS";
    case ModelName::OIOS: return "OIOS";
    case ModelName::PIOS: return "PIOS";
    case ModelName::PIPS: return "PIPS";
    case ModelName::OICS_R: return "OICS-R";
    case ModelName::PICS_R: return "PICS-R";
  }
  return "?";
}

ModelName model_name_from_string(const std::string& text) {
  for (ModelName name : kAllModelNames) {
    if (text == to_string(name)) return name;
  }
  // Accept underscore spellings for the residual models.
  if (text == "OICS_R") return ModelName::OICS_R;
  if (text == "PICS_R") return ModelName::PICS_R;
  throw Error("unknown imputation model: " + text);
}

}  // namespace tpsim::model
