#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cartan/forms.hpp"
#include "cartan/jetpde.hpp"
#include "json.hpp"

namespace cartan::connection {

using expr::Expr;
using forms::Frame;
using forms::GroupElement;
using forms::KForm;
using forms::MatrixForm;
using forms::TorsionConvention;
using jetpde::JetPDE;

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linear system for eps has fewer independent equations than unknowns.
class UnsolvableEpsilonError : public forms::FormError {
 public:
  UnsolvableEpsilonError(const std::string& what, int rank) : FormError(what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// D_i v -> v_i for every spatial direction.
Expr contactSubstitute(const JetPDE& p, const Expr& ex);

struct TransformedPDE {
  JetPDE base;
  GroupElement g;
  /// Substituted residual divided by a, after the contact substitution.
  Expr transformed;
  Expr coeffV;
  std::vector<Expr> coeffVi;

  /// leading + coeffV v + sum_i coeffVi v_i
  Expr reconstruction() const;
};

/// (v, v_i) -> (a v, b_i v + a v_i). Requires g.dimension() == p.n + 1.
TransformedPDE applyGroup(const JetPDE& p, const GroupElement& g);

enum class PolicyKind { PaperCanonical, ZeroAlphaT, Custom };

/// Fixes the freedom in alpha_t + sum_i beta_ii = coeffV. Custom(f, g) moves
/// f from the beta_ii (evenly) into alpha_t and sets the dt component of
/// every beta_i to g, starting from the paper-canonical split.
struct GaugePolicy {
  PolicyKind kind = PolicyKind::PaperCanonical;
  Expr f;
  Expr g;

  static GaugePolicy named(const std::string& name);
  static GaugePolicy custom(Expr f, Expr g) { return {PolicyKind::Custom, std::move(f), std::move(g)}; }
  std::string name() const;
};

struct GaugeChoice {
  GaugePolicy policy;
  Expr alphaT;
  Expr betaT;
  std::vector<Expr> betaDiagonal;
};

/// omega has alpha on the diagonal and beta_i in the first column.
struct ConnectionSolution {
  MatrixForm omega;
  KForm alpha;
  std::vector<KForm> beta;
  GaugeChoice gaugeChoice;
  /// Matching equations that did not reduce to zero; empty for a consistent
  /// solution.
  std::vector<Expr> residualConstraints;
};

ConnectionSolution matchConnection(const TransformedPDE& tp, const GaugePolicy& policy = {});

/// [[eps, 0], [theta, omega]] on the frame extended by the jet variables.
struct WeylConnection {
  Frame frame;
  KForm epsilon;
  MatrixForm theta;
  MatrixForm omega;
  MatrixForm matrix() const;
  WeylConnection withEpsilon(const KForm& eps) const;
};

/// eps is left symbolic: eps_t dt + sum_i eps_<x^i> dx^i.
WeylConnection embedWeyl(const ConnectionSolution& cs, const JetPDE& p);

struct PrintedConstraint {
  std::string label;
  Expr expression;
  bool equivalent = false;  ///< equiv to the derived scalar constraint
};

struct GaugeConstraints {
  Expr lambda;
  /// f_i solved from the v_i equations.
  std::vector<Expr> f;
  /// Eliminating f_i from the v equation; an expression that must vanish.
  Expr scalarConstraint;
  std::vector<PrintedConstraint> printed;
};

/// Re-derives the H0 conditions: the h-transformed leading part must match
/// lambda times the continuity equation of h^{-1}dh, coefficient by
/// coefficient in v and v_i.
GaugeConstraints gaugeSubgroupConstraints(const JetPDE& p, const Expr& lambda);

struct TorsionSolution {
  TorsionConvention convention = TorsionConvention::ScaleActsLeft;
  KForm epsilon;
  std::vector<Expr> constraints;
  int rank = 0;
  int unknowns = 0;
};

/// Solves torsion(W) = 0 for the symbolic eps of `w`. Leftover equations
/// become constraints. Throws UnsolvableEpsilonError when rank-deficient and
/// FormError when d(theta) does not vanish.
TorsionSolution torsionConstraints(const WeylConnection& w,
                                   TorsionConvention convention = TorsionConvention::ScaleActsLeft);

/// b_i -> d_i a in the summed torsion constraints, i.e. Delta(a)/a - V for
/// the Schrodinger equation.
Expr specializeProlongation(const JetPDE& p, const std::vector<Expr>& constraints);

struct BlockCheck {
  std::string block;
  bool pass = false;
  std::string detail;
};

struct ConsistencyReport {
  std::vector<BlockCheck> checks;
  bool pass() const;
};

/// Applies Ad(h^{-1}) W + h^* omega_MC to the Weyl connection and checks the
/// blocks: scale (eps + d ln e), solder (e h^{-1} theta), connection
/// (omega + h^{-1}dh) and, when lambda is given, the proportionality of the
/// v_i coefficients.
ConsistencyReport checkGaugeConsistency(const WeylConnection& w, const GroupElement& h, const JetPDE& p,
                                        const std::optional<Expr>& lambda = std::nullopt);

/// Full pipeline on the general element (a, b_i), in the shape of the
/// `construct` report.
nlohmann::ordered_json runConstruct(const JetPDE& p, const GaugePolicy& policy, const Expr& lambda,
                                    TorsionConvention convention = TorsionConvention::ScaleActsLeft);

GroupElement generalElement(const JetPDE& p);
std::string toString(TorsionConvention c);
nlohmann::ordered_json toJson(const ConsistencyReport& r);

}  // namespace cartan::connection
