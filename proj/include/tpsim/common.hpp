#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tpsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base class for all tpsim exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct DegenerateVariance : Error {
  using Error::Error;
};

struct InfeasibleCounts : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  using Error::Error;
};

struct EmptyModel : Error {
  using Error::Error;
};

struct UnknownVariable : Error {
  using Error::Error;
};

struct EmptyDesign : Error {
  using Error::Error;
};

struct TooFewCopies : Error {
  using Error::Error;
};

struct EmptyReport : Error {
  using Error::Error;
};

struct IoError : Error {
  IoError(const std::string& what, const std::string& path)
      : Error(what + ": " + path), path(path) {}
  std::string path;
};

}  // namespace tpsim
