#include "tpsim/model/formula.hpp"
#include "tpsim/model/spec.hpp"

#include "tpsim/common.hpp"

#include <doctest.h>

using namespace tpsim::model;

TEST_CASE("parses the full sequential formula") {
  const Formula f = parse_formula("Y3 = P3 Y0 Y1 D1*Y1 Y2 D2*Y2");
  CHECK(f.response == "Y3");
  REQUIRE(f.terms.size() == 6);
  CHECK(f.terms[0].kind == Term::Kind::Class);
  CHECK(f.terms[0].name == "P3");
  CHECK(f.terms[1].kind == Term::Kind::Continuous);
  CHECK(f.terms[1].name == "Y0");
  CHECK(f.terms[3].kind == Term::Kind::Interaction);
  CHECK(f.terms[3].name == "D1");
  CHECK(f.terms[3].partner == "Y1");
  CHECK(f.terms[5].name == "D2");
  CHECK(f.terms[5].partner == "Y2");
}

TEST_CASE("minimal formula gets an implicit intercept and one slope") {
  const Formula f = parse_formula("Y1 = Y0");
  CHECK(f.response == "Y1");
  REQUIRE(f.terms.size() == 1);
  CHECK(f.terms[0].kind == Term::Kind::Continuous);
}

TEST_CASE("degenerate and malformed inputs") {
  CHECK_THROWS_AS(parse_formula("Y2 ="), tpsim::EmptyModel);
  CHECK_THROWS_AS(parse_formula("Y2 Y0"), tpsim::SyntaxError);
  CHECK_THROWS_AS(parse_formula("= Y0"), tpsim::SyntaxError);
  CHECK_THROWS_AS(parse_formula("Y2 = Y0 *"), tpsim::SyntaxError);
  CHECK_THROWS_AS(parse_formula("Y2 = Y0 + Y1"), tpsim::SyntaxError);
  CHECK_THROWS_AS(parse_formula("Y2 = Y0*Y1"), tpsim::SyntaxError);   // no class part
  CHECK_THROWS_AS(parse_formula("Y2 = D1*D2"), tpsim::SyntaxError);   // no continuous part
  CHECK_THROWS_AS(parse_formula("Y2 = Y2 Y0"), tpsim::SyntaxError);   // response reused
}

TEST_CASE("class-ness follows the D/P naming convention") {
  CHECK(is_class_variable("D1"));
  CHECK(is_class_variable("P3"));
  CHECK_FALSE(is_class_variable("Y0"));
  CHECK_FALSE(is_class_variable("R2"));
  CHECK_FALSE(is_class_variable("D"));
  CHECK_FALSE(is_class_variable("Dx"));
}

TEST_CASE("builtin catalog matches the sequential definitions") {
  const ModelSpec oios = builtin_spec(ModelName::OIOS);
  CHECK(render(oios.formulas[0]) == "Y1 = D1 Y0");
  CHECK(render(oios.formulas[1]) == "Y2 = D2 Y0 Y1 D2*Y1");
  CHECK(render(oios.formulas[2]) == "Y3 = D3 Y0 Y1 D3*Y1 Y2 D3*Y2");
  CHECK_FALSE(oios.residual_mode);
  CHECK_FALSE(oios.by_final_pattern);

  const ModelSpec cics = builtin_spec(ModelName::CICS);
  CHECK(render(cics.formulas[0]) == "Y1 = Y0");
  CHECK(render(cics.formulas[1]) == "Y2 = Y0 Y1");
  CHECK(render(cics.formulas[2]) == "Y3 = Y0 Y1 Y2");

  const ModelSpec pios = builtin_spec(ModelName::PIOS);
  CHECK(render(pios.formulas[1]) == "Y2 = P2 Y0 Y1 D1*Y1");
  CHECK(render(pios.formulas[2]) == "Y3 = P3 Y0 Y1 D1*Y1 Y2 D2*Y2");

  const ModelSpec oics_r = builtin_spec(ModelName::OICS_R);
  CHECK(oics_r.residual_mode);
  CHECK(render(oics_r.formulas[2]) == "Y3 = D3 R0 R1 R2");

  const ModelSpec pics_r = builtin_spec(ModelName::PICS_R);
  CHECK(pics_r.residual_mode);
  CHECK(render(pics_r.formulas[1]) == "Y2 = P2 R0 R1");

  const ModelSpec pips = builtin_spec(ModelName::PIPS);
  CHECK(pips.by_final_pattern);
  CHECK_FALSE(pips.residual_mode);
  CHECK(render(pips.formulas[2]) == "Y3 = Y0 Y1 Y2");
}

TEST_CASE("every builtin formula round-trips through the parser") {
  for (ModelName name : kAllModelNames) {
    const ModelSpec spec = builtin_spec(name);
    for (const Formula& formula : spec.formulas) {
      CHECK(parse_formula(render(formula)) == formula);
    }
  }
}
