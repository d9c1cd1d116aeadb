#include "doctest.h"

#include "cartan/equiv.hpp"
#include "cartan/jetpde.hpp"
#include "random_expr.hpp"

using namespace cartan::jetpde;
using cartan::expr::equiv;
using cartan::expr::parse;

TEST_CASE("flatten the Schrodinger and diffusion equations") {
  JetPDE p1 = flatten(PDESpec{});
  CHECK(p1.residual == parse("I*D[v,t,1] + D[v1,x,1] - V*v", p1.ws));
  CHECK(p1.eta.size() == 2);

  PDESpec s2;
  s2.n = 2;
  JetPDE p2 = flatten(s2);
  CHECK(p2.residual == parse("I*D[v,t,1] + D[v1,x1,1] + D[v2,x2,1] - V*v", p2.ws));

  PDESpec diff;
  diff.time = TimeCoefficient::Diffusion;
  CHECK(flatten(diff).residual == parse("D[v,t,1] + D[v1,x,1] - V*v", flatten(diff).ws));

  PDESpec signs;
  signs.n = 2;
  signs.signs = {1, -1};
  CHECK(flatten(signs).residual == parse("I*D[v,t,1] + D[v1,x1,1] - D[v2,x2,1] - V*v", flatten(signs).ws));
}

TEST_CASE("lower-order part must be linear") {
  PDESpec s;
  s.lowerOrder = "v*v1";
  CHECK_THROWS_AS(flatten(s), NonlinearityError);
  s.lowerOrder = "v + 1";
  CHECK_THROWS_AS(flatten(s), NonlinearityError);
  s.lowerOrder = "D[v,x,1]";
  CHECK_THROWS_AS(flatten(s), NonlinearityError);
  s.lowerOrder = "x*v1 - V*v";
  CHECK_NOTHROW(flatten(s));
  s.potential = "x^2 - 1";
  s.lowerOrder = "";
  JetPDE p = flatten(s);
  CHECK(p.residual == parse("I*D[v,t,1] + D[v1,x,1] - (x^2 - 1)*v", p.ws));
}

TEST_CASE("prolongation of sections") {
  JetPDE p = flatten(PDESpec{});
  auto b = prolong(p, parse("x*t", p.ws));
  CHECK(b.at("v") == parse("x*t", p.ws));
  CHECK(b.at("v1") == p.ws["t"]);

  auto w = prolong(p, parse("exp(I*k*x)", p.ws));
  CHECK(w.at("v1") == parse("I*k*exp(I*k*x)", p.ws));

  // product rule, expanded by hand
  auto nw = prolong(p, parse("n*g", p.ws));
  CHECK(equiv(nw.at("v1"), parse("D[n,x,1]*g + n*D[g,x,1]", p.ws)));
  CHECK_THROWS_AS(prolong(p, p.ws["v"]), cartan::expr::KindMismatchError);
}

TEST_CASE("residual on sections") {
  JetPDE p = flatten(PDESpec{});
  // u = n w with n'' = V n gives n (i w_t + w_xx) + 2 n' w_x
  cartan::expr::Expr r = residualOnSection(p, parse("n*g", p.ws));
  r = cartan::expr::substitute(r, {{"V", parse("D[n,x,2]/n", p.ws)}});
  CHECK(equiv(r, parse("n*(I*D[g,t,1] + D[g,x,2]) + 2*D[n,x,1]*D[g,x,1]", p.ws)));

  PDESpec free;
  free.potential = "0";
  JetPDE pf = flatten(free);
  CHECK(residualOnSection(pf, pf.ws["x"]).isZero());

  auto plane = parse("exp(I*(k*x - omega*t))", pf.ws);
  CHECK(equiv(residualOnSection(pf, plane), parse("(omega - k^2)", pf.ws) * plane));
  auto dispersive = cartan::expr::substitute(residualOnSection(pf, plane), {{"omega", parse("k^2", pf.ws)}});
  CHECK(cartan::expr::isIdenticallyZero(dispersive));
}

TEST_CASE("flattened residual agrees with the second-order equation") {
  for (int n : {1, 2}) {
    PDESpec s;
    s.n = n;
    s.lowerOrder = n == 1 ? "x*v1 - V*v" : "x1*v2 - V*v";
    JetPDE p = flatten(s);
    cartan::testing::ExprGenerator gen(p.ws, 17 + n);
    if (n == 2) gen.leaves({"t", "x1", "x2", "a", "b1", "e", "V", "k"});
    for (int trial = 0; trial < 20; ++trial) {
      auto u = gen(2);
      CHECK(equiv(residualOnSection(p, u), secondOrderResidual(p, u)));
      auto c = cartan::expr::Expr(std::int64_t{gen.uniform(-4, 4)}) + cartan::expr::Expr::imaginaryUnit();
      CHECK(equiv(residualOnSection(p, c * u), c * residualOnSection(p, u)));
    }
  }
}

TEST_CASE("spec from config") {
  auto cfg = cartan::Config::parse("# demo\ndimension = 2\nsigns = 1, -1\ntime = diffusion\npotential = x1^2\n");
  PDESpec s = PDESpec::fromConfig(cfg);
  CHECK(s.n == 2);
  CHECK(s.signs == std::vector<int>{1, -1});
  CHECK(s.time == TimeCoefficient::Diffusion);
  CHECK(s.potential == "x1^2");
  CHECK_THROWS_AS(PDESpec::fromConfig(cartan::Config::parse("time = heat")), cartan::ConfigError);
  CHECK_THROWS_AS(PDESpec::fromConfig(cartan::Config::parse("dimension = 2\nsigns = 1")), cartan::ConfigError);
  CHECK_THROWS_AS(cartan::Config::parse("no equals sign"), cartan::ConfigError);
}
