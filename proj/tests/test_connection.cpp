#include "doctest.h"

#include "cartan/connection.hpp"
#include "golden.hpp"
#include "random_expr.hpp"

using namespace cartan::connection;
using cartan::expr::Bindings;
using cartan::expr::equiv;
using cartan::expr::isIdenticallyZero;
using cartan::expr::parse;
using cartan::expr::substitute;
using cartan::jetpde::flatten;
using cartan::jetpde::PDESpec;

namespace {

JetPDE schrodinger(int n, const std::string& potential = "V") {
  PDESpec s;
  s.n = n;
  s.potential = potential;
  return flatten(s);
}

std::string describe(const std::vector<cartan::testing::GoldenMismatch>& bad) {
  std::string out;
  for (const auto& m : bad) out += m.key + ": expected " + m.expected + ", got " + m.actual + "\n";
  return out;
}

}  // namespace

TEST_CASE("applying the scaling group") {
  JetPDE p = schrodinger(1);
  TransformedPDE tp = applyGroup(p, generalElement(p));
  CHECK(equiv(tp.coeffV, parse("(I*D[a,t,1] + D[b,x,1] - V*a)/a", p.ws)));
  REQUIRE(tp.coeffVi.size() == 1);
  CHECK(equiv(tp.coeffVi[0], parse("(b + D[a,x,1])/a", p.ws)));
  CHECK(equiv(tp.reconstruction(), tp.transformed));
  // the leading part keeps D_x v1, not D_x v
  CHECK(dependsOn(tp.transformed, "v1"));

  TransformedPDE id = applyGroup(p, GroupElement::identity(1));
  CHECK(id.coeffV == -p.ws["V"]);
  CHECK(id.coeffVi[0].isZero());

  CHECK_THROWS_AS(GroupElement(cartan::expr::Expr(0), {p.ws["b"]}), cartan::forms::FormError);
  CHECK_THROWS_AS(applyGroup(p, GroupElement::identity(2)), cartan::forms::DimensionError);
}

TEST_CASE("golden constructions") {
  for (auto [n, file] : {std::pair{1, "construct_1d.golden"}, {2, "construct_2d.golden"}, {3, "construct_3d.golden"}}) {
    auto bad = cartan::testing::compareGolden(file, schrodinger(n));
    CAPTURE(file);
    CHECK_MESSAGE(bad.empty(), describe(bad));
  }
}

TEST_CASE("matching reproduces the transformed equation for every policy") {
  for (int n : {1, 2}) {
    JetPDE p = schrodinger(n);
    cartan::testing::ExprGenerator gen(p.ws, 100 + n);
    if (n == 2) gen.leaves({"t", "x1", "x2", "a", "e", "V", "k"});
    for (int trial = 0; trial < 8; ++trial) {
      cartan::expr::Expr a = p.ws["a"] * cartan::expr::exp(gen(1));
      std::vector<cartan::expr::Expr> b;
      for (int i = 0; i < n; ++i) b.push_back(gen(2));
      TransformedPDE tp = applyGroup(p, GroupElement(a, b));
      for (const GaugePolicy& policy : {GaugePolicy::named("paper-canonical"), GaugePolicy::named("zero-alpha-t"),
                                        GaugePolicy::custom(gen(1), gen(1))}) {
        ConnectionSolution cs = matchConnection(tp, policy);
        CHECK(cs.residualConstraints.empty());
        auto div = cartan::forms::covariantDivergence(cs.omega, p.jetVector(), p.eta);
        CHECK(equiv(div, tp.reconstruction()));
        cartan::expr::Expr total = cs.gaugeChoice.alphaT;
        for (const auto& bd : cs.gaugeChoice.betaDiagonal) total = total + bd;
        CHECK(equiv(total, tp.coeffV));
        CHECK(cartan::forms::isZeroMatrixForm(cartan::forms::matrixWedge(cs.omega, cs.omega)));
      }
    }
  }
  CHECK_THROWS_AS(GaugePolicy::named("gauge-of-the-day"), PolicyError);
}

TEST_CASE("trivial connection and Weyl embedding") {
  JetPDE p = schrodinger(1, "0");
  ConnectionSolution cs = matchConnection(applyGroup(p, GroupElement::identity(1)));
  CHECK(cartan::forms::isZeroMatrixForm(cs.omega));
  WeylConnection w = embedWeyl(cs, p);
  MatrixForm m = w.matrix();
  CHECK(m.rows() == 3);
  CHECK(m.isWeyl());
  CHECK(m(1, 0).coefficient({w.frame.indexOf("v")}).isOne());
  CHECK(m(2, 0).coefficient({w.frame.indexOf("v1")}).isOne());
  CHECK(m(0, 1).isZero());
  CHECK(m(0, 0).component("t") == p.ws["eps_t"]);

  TorsionSolution ts = torsionConstraints(w);
  CHECK(ts.epsilon.isZero());
  CHECK(ts.constraints.empty());
  CHECK(specializeProlongation(p, ts.constraints).isZero());

  JetPDE p2 = schrodinger(2);
  WeylConnection w2 = embedWeyl(matchConnection(applyGroup(p2, generalElement(p2))), p2);
  CHECK(w2.matrix().rows() == 4);
}

TEST_CASE("torsion conventions and vanishing torsion") {
  JetPDE p = schrodinger(1);
  ConnectionSolution cs = matchConnection(applyGroup(p, generalElement(p)));
  WeylConnection w = embedWeyl(cs, p);

  TorsionSolution left = torsionConstraints(w, TorsionConvention::ScaleActsLeft);
  CHECK(cartan::forms::equivForms(left.epsilon, -cs.alpha));
  CHECK(left.rank == 2);
  REQUIRE(left.constraints.size() == 1);
  CHECK(equiv(left.constraints[0], parse("(D[b,x,1] - V*a)/a", p.ws)));

  TorsionSolution literal = torsionConstraints(w, TorsionConvention::MatrixProduct);
  CHECK(cartan::forms::equivForms(literal.epsilon, cs.alpha));
  CHECK(literal.constraints.size() == 1);

  // With eps fixed and beta removed the torsion block vanishes.
  WeylConnection fixed = w.withEpsilon(left.epsilon);
  for (std::size_t i = 1; i < fixed.omega.rows(); ++i) fixed.omega.set(i, 0, KForm(fixed.frame, 1));
  auto curv = cartan::forms::curvature(fixed.matrix());
  REQUIRE(curv.torsion.has_value());
  CHECK(cartan::forms::isZeroMatrixForm(*curv.torsion));

  WeylConnection degenerate = w;
  degenerate.theta = MatrixForm(2, 1, 1, w.frame);
  CHECK_THROWS_AS(torsionConstraints(degenerate), UnsolvableEpsilonError);

  JetPDE p2 = schrodinger(2);
  TorsionSolution t2 = torsionConstraints(embedWeyl(matchConnection(applyGroup(p2, generalElement(p2))), p2));
  CHECK(t2.constraints.size() == 2);
}

TEST_CASE("prolongation specialization") {
  JetPDE p = schrodinger(2);
  TorsionSolution ts = torsionConstraints(embedWeyl(matchConnection(applyGroup(p, generalElement(p))), p));
  cartan::expr::Expr vac = specializeProlongation(p, ts.constraints);
  CHECK(equiv(p.ws["a"] * vac, parse("D[a,x1,2] + D[a,x2,2] - V*a", p.ws)));
  // a = exp(x1 + x2) gives Delta(a)/a = 2
  cartan::expr::Expr closed = substitute(vac, {{"a", parse("exp(x1 + x2)", p.ws)}});
  CHECK(equiv(closed, parse("2 - V", p.ws)));
  CHECK(isIdenticallyZero(substitute(closed, {{"V", cartan::expr::Expr(2)}})));

  JetPDE free = schrodinger(1, "0");
  TorsionSolution t1 = torsionConstraints(embedWeyl(matchConnection(applyGroup(free, generalElement(free))), free));
  cartan::expr::Expr v1 = specializeProlongation(free, t1.constraints);
  CHECK(equiv(v1, parse("D[a,x,2]/a", free.ws)));
  CHECK(isIdenticallyZero(substitute(v1, {{"a", cartan::expr::Expr(1)}})));
}

TEST_CASE("gauge subgroup constraints") {
  JetPDE p = schrodinger(1);
  GaugeConstraints one = gaugeSubgroupConstraints(p, cartan::expr::Expr(1));
  REQUIRE(one.f.size() == 1);
  CHECK(isIdenticallyZero(one.f[0]));
  // hand derivation with f = 0: (1/e) i e_t = lambda e_t / e
  CHECK(equiv(one.scalarConstraint, parse("(I - 1)*D[ln(e),t,1]", p.ws)));
  REQUIRE(one.printed.size() == 3);
  for (const auto& pc : one.printed) CHECK_FALSE(pc.equivalent);

  GaugeConstraints gen = gaugeSubgroupConstraints(p, p.ws["lambda"]);
  CHECK(equiv(gen.f[0], parse("(lambda - 1)*D[e,x,1]", p.ws)));
  CHECK(equiv(gen.scalarConstraint,
              parse("(I - lambda)*D[ln(e),t,1] - (lambda - 1)^2*D[ln(e),x,2] + (lambda - 1)*D[ln(e),x,1]^2", p.ws)));

  GaugeConstraints constant = gaugeSubgroupConstraints(p, p.ws["lambda"]);
  Bindings ek{{"e", p.ws["k"]}};
  CHECK(isIdenticallyZero(substitute(constant.scalarConstraint, ek)));
  CHECK(isIdenticallyZero(substitute(constant.f[0], ek)));

  JetPDE p3 = schrodinger(3);
  GaugeConstraints three = gaugeSubgroupConstraints(p3, cartan::expr::Expr(1));
  for (const auto& f : three.f) CHECK(isIdenticallyZero(f));
}

TEST_CASE("gauge consistency of the Weyl connection") {
  JetPDE p = schrodinger(1);
  WeylConnection w = embedWeyl(matchConnection(applyGroup(p, generalElement(p))), p);
  CHECK(checkGaugeConsistency(w, GroupElement::identity(1), p, cartan::expr::Expr(1)).pass());

  cartan::testing::ExprGenerator gen(p.ws, 7);
  for (int trial = 0; trial < 5; ++trial) {
    cartan::expr::Expr e = p.ws["e"] * cartan::expr::exp(gen(1));
    cartan::expr::Expr lambda(std::int64_t{gen.uniform(2, 5)});
    cartan::expr::Expr f = (lambda - cartan::expr::Expr(1)) * cartan::expr::differentiate(e, p.ws.get("x"));
    ConsistencyReport r = checkGaugeConsistency(w, GroupElement(e, {f}, cartan::forms::GroupFlavor::H0Candidate), p, lambda);
    CHECK(r.pass());
    CHECK(r.checks.size() == 4);

    ConsistencyReport wrong =
        checkGaugeConsistency(w, GroupElement(e, {cartan::expr::Expr(0)}, cartan::forms::GroupFlavor::H0Candidate), p, lambda);
    CHECK_FALSE(wrong.pass());
    CHECK(wrong.checks[0].pass);
  }
}

TEST_CASE("construct report") {
  JetPDE p = schrodinger(1);
  auto j = runConstruct(p, GaugePolicy{}, cartan::expr::Expr(1));
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"transformedPDE", "connection", "gaugeChoice", "gaugeConstraints", "torsion",
                                         "vacuumResidual"});
  CHECK(j.dump() == runConstruct(p, GaugePolicy{}, cartan::expr::Expr(1)).dump());
  CHECK(j["gaugeChoice"]["policy"] == "paper-canonical");
}
