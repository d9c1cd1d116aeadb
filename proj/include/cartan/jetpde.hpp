#pragma once

#include <string>
#include <vector>

#include "cartan/config.hpp"
#include "cartan/workspace.hpp"

namespace cartan::jetpde {

using expr::Bindings;
using expr::Expr;
using expr::SymbolRef;
using expr::Workspace;

class NonlinearityError : public expr::SymbolicError {
 public:
  using SymbolicError::SymbolicError;
};

enum class TimeCoefficient { Schrodinger, Diffusion };

/// Symbol names of the standard workspace. In one space dimension the
/// spatial symbols carry no index (x, v1, b, f); otherwise they are
/// x1..xn, v1..vn, b1..bn, f1..fn.
std::string coordinateName(int n, int i);  // i = 0 is t
std::string jetName(int i);                 // i = 0 is v
std::string indexedName(const std::string& stem, int n, int i);  // i >= 1

/// Coordinates t, x^i; jets v, v_i; functions a, b_i, e, f_i, g, V of all
/// coordinates, Weyl placeholders eps_t, eps_<x^i>, vacuum function n of the
/// spatial coordinates; parameters lambda, k, omega.
Workspace schrodingerWorkspace(int n);

/// Linear second-order equation
///   c d_t u + sum_i s_i d_i^2 u + A(u, d_i u) = 0,
/// c = i (Schrodinger) or 1 (diffusion). Expressions are text over the
/// standard workspace, with v standing for u and v_i for d_i u in A.
struct PDESpec {
  int n = 1;
  std::vector<int> signs;  ///< empty means all +1
  TimeCoefficient time = TimeCoefficient::Schrodinger;
  std::string potential = "V";
  std::string lowerOrder;  ///< empty means -potential*v

  /// Keys: dimension, signs, potential, time (schrodinger | diffusion),
  /// lower_order.
  static PDESpec fromConfig(const Config& config);
};

/// First-order equation on J^1 with the d_t-jet coordinate projected out:
///   residual = c d_t v + sum_i s_i D_i v_i + A(v, v_i).
struct JetPDE {
  Workspace ws;
  int n = 1;
  Expr timeCoefficient;
  std::vector<int> signs;
  Expr potential;
  Expr lowerOrder;
  Expr residual;
  /// (c, s_1, ..., s_n)
  std::vector<Expr> eta;

  const SymbolRef& coordinate(int i) const { return ws.coordinates()[i]; }
  const SymbolRef& jet(int i) const { return ws.jets()[i]; }
  /// c d_t v + sum_i s_i D_i v_i
  Expr leading() const;
  /// (v, v_1, ..., v_n) as expressions.
  std::vector<Expr> jetVector() const;
};

/// Throws NonlinearityError when A is not linear and homogeneous in the jet
/// variables, and SymbolicError for parse failures.
JetPDE flatten(const PDESpec& spec);

/// Coefficients of an expression that is linear and homogeneous in the given
/// jet symbols: ex = sum_k coeffs[k] * jets[k].
struct LinearSplit {
  std::vector<Expr> coeffs;
  Expr remainder;  ///< ex at jets = 0
};
LinearSplit splitLinear(const Expr& ex, const std::vector<SymbolRef>& jets);
bool containsJetDerivative(const Expr& ex);

/// {v -> u, v_i -> d_i u}. Throws KindMismatchError if u involves jets.
Bindings prolong(const JetPDE& p, const Expr& u);
Expr residualOnSection(const JetPDE& p, const Expr& u);
/// c d_t u + sum_i s_i d_i^2 u + A(u, d_i u) evaluated directly.
Expr secondOrderResidual(const JetPDE& p, const Expr& u);

}  // namespace cartan::jetpde
