#include "tpsim/model/formula.hpp"

#include "tpsim/common.hpp"

#include <cctype>
#include <sstream>

namespace tpsim::model {

namespace {

struct Token {
  enum class Kind { Ident, Equals, Star, End };
  Kind kind;
  std::string text;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '=') {
      tokens.push_back({Token::Kind::Equals, "="});
      ++i;
    } else if (c == '*') {
      tokens.push_back({Token::Kind::Star, "*"});
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        ++i;
      }
      tokens.push_back({Token::Kind::Ident, text.substr(start, i - start)});
    } else {
      throw SyntaxError("parse_formula: unexpected character '" +
                        std::string(1, c) + "'");
    }
  }
  tokens.push_back({Token::Kind::End, ""});
  return tokens;
}

}  // namespace

bool is_class_variable(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'D' && name[0] != 'P')) return false;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  }
  return true;
}

Formula parse_formula(const std::string& text) {
  const std::vector<Token> tokens = tokenize(text);
  std::size_t pos = 0;
  auto peek = [&]() -> const Token& { return tokens[pos]; };
  auto next = [&]() -> const Token& { return tokens[pos++]; };

  if (peek().kind != Token::Kind::Ident) {
    throw SyntaxError("parse_formula: expected response name");
  }
  Formula formula;
  formula.response = next().text;
  if (peek().kind != Token::Kind::Equals) {
    throw SyntaxError("parse_formula: expected '=' after response");
  }
  next();

  while (peek().kind == Token::Kind::Ident) {
    const std::string first = next().text;
    if (peek().kind == Token::Kind::Star) {
      next();
      if (peek().kind != Token::Kind::Ident) {
        throw SyntaxError("parse_formula: expected identifier after '*'");
      }
      const std::string second = next().text;
      const bool first_class = is_class_variable(first);
      const bool second_class = is_class_variable(second);
      if (first_class == second_class) {
        throw SyntaxError("parse_formula: interaction '" + first + "*" + second +
                          "' must pair a class variable with a continuous one");
      }
      Term term;
      term.kind = Term::Kind::Interaction;
      term.name = first_class ? first : second;
      term.partner = first_class ? second : first;
      formula.terms.push_back(std::move(term));
    } else {
      Term term;
      term.kind = is_class_variable(first) ? Term::Kind::Class : Term::Kind::Continuous;
      term.name = first;
      formula.terms.push_back(std::move(term));
    }
  }
  if (peek().kind != Token::Kind::End) {
    throw SyntaxError("parse_formula: unexpected token '" + peek().text + "'");
  }
  if (formula.terms.empty()) {
    throw EmptyModel("parse_formula: no terms on the right hand side of '" +
                     formula.response + "'");
  }
  for (const Term& term : formula.terms) {
    if (term.name == formula.response || term.partner == formula.response) {
      throw SyntaxError("parse_formula: response '" + formula.response +
                        "' may not appear as a term");
    }
  }
  return formula;
}

std::string render(const Formula& formula) {
  std::ostringstream out;
  out << formula.response << " =";
  for (const Term& term : formula.terms) {
    out << ' ' << term.name;
    if (term.kind == Term::Kind::Interaction) out << '*' << term.partner;
  }
  return out.str();
}

}  // namespace tpsim::model
