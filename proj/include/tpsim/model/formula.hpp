#pragma once

#include <string>
#include <vector>

namespace tpsim::model {

// One right-hand-side term of an imputation formula. Interactions pair a
// class variable with a continuous one; class-ness follows the D*/P*
// naming convention.
struct Term {
  enum class Kind { Continuous, Class, Interaction };
  Kind kind = Kind::Continuous;
  std::string name;     // the variable; for interactions, the class part
  std::string partner;  // interactions only: the continuous part

  bool operator==(const Term&) const = default;
};

struct Formula {
  std::string response;
  std::vector<Term> terms;  // implicit intercept in front

  bool operator==(const Formula&) const = default;
};

/// True for identifiers the grammar treats as class variables (D1..D9,
/// P1..P9).
bool is_class_variable(const std::string& name);

/// Parses "RESPONSE = TERM TERM ..." where TERM is IDENT or IDENT*IDENT.
/// Throws SyntaxError on malformed input and EmptyModel when the right
/// hand side has no terms.
Formula parse_formula(const std::string& text);

/// Canonical text form; parse_formula(render(f)) == f.
std::string render(const Formula& formula);

}  // namespace tpsim::model
