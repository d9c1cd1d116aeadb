#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "cartan/expr.hpp"

namespace cartan::expr {

/// Seed picked up by default-constructed EquivOptions (initially 0x5eed).
std::uint64_t defaultEquivSeed();
void setDefaultEquivSeed(std::uint64_t seed);

struct EquivOptions {
  int trials = 20;
  double tol = 1e-9;
  std::uint64_t seed = defaultEquivSeed();
  /// Sample points where some divisor or log argument is smaller than this
  /// are discarded and redrawn.
  double singularityFloor = 1e-8;
  int maxRetries = 200;
};

class EvaluationError : public SymbolicError {
 public:
  using SymbolicError::SymbolicError;
};

/// One random assignment: complex values for coordinates and parameters,
/// random cubic polynomials (in their arity) for functions and jet variables.
/// Derivatives of function symbols are evaluated exactly on the polynomial.
class RandomAssignment {
 public:
  explicit RandomAssignment(std::mt19937_64& rng) : rng_(&rng) {}

  std::complex<double> evaluate(const Expr& ex);
  /// Smallest |divisor| or |log argument| met since construction.
  double smallestDivisor() const { return smallest_; }

 private:
  struct Polynomial {
    std::vector<std::vector<int>> monomials;
    std::vector<std::complex<double>> coeffs;
  };

  std::complex<double> sample();
  std::complex<double> coordinate(const std::string& name);
  std::complex<double> parameter(const std::string& name);
  const Polynomial& polynomial(const Symbol& s);
  std::complex<double> evalSymbol(const Expr& ex);

  std::mt19937_64* rng_;
  std::map<std::string, std::complex<double>> values_;
  std::map<std::string, Polynomial> polys_;
  double smallest_ = std::numeric_limits<double>::infinity();
};

/// Randomized identity test: true iff lhs and rhs agree (relative tolerance,
/// absolute floor of `tol`) at `trials` random sample points. Deterministic
/// for a given seed. Throws EvaluationError if no non-singular sample can be
/// drawn within the retry budget.
bool equiv(const Expr& lhs, const Expr& rhs, const EquivOptions& options = {});
bool equiv(const Expr& lhs, const Expr& rhs, int trials, double tol, std::uint64_t seed = 0x5eed);

/// equiv(ex, 0).
bool isIdenticallyZero(const Expr& ex, const EquivOptions& options = {});

}  // namespace cartan::expr

namespace cartan::expr {

/// Numeric value of `ex` with every symbol bound by name. Throws
/// EvaluationError for unbound symbols and derivative atoms.
std::complex<double> evaluate(const Expr& ex, const std::map<std::string, std::complex<double>>& values);

}  // namespace cartan::expr
