#include "cartan/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "cartan/equiv.hpp"

namespace cartan::verify {

using connection::applyGroup;
using connection::ConnectionSolution;
using connection::embedWeyl;
using connection::generalElement;
using connection::matchConnection;
using connection::TorsionSolution;
using connection::TransformedPDE;
using connection::WeylConnection;
using expr::Expr;
using expr::toPrefix;
using forms::TorsionConvention;
using numerics::Complex;
using numerics::ComplexField;
using numerics::Grid1D;
using numerics::RealField;

namespace {

std::vector<int> resolutions(const Config& c, std::vector<int> fallback) {
  auto list = c.getIntList("resolutions");
  if (list.empty()) return fallback;
  std::vector<int> out(list.begin(), list.end());
  if (out.size() < 3) throw ConfigError("resolutions needs at least three entries");
  return out;
}

/// Complex function of (x, t) from expression text.
std::function<Complex(double, double)> compileField(const std::string& text, const Config& params) {
  auto ws = std::make_shared<expr::Workspace>(jetpde::schrodingerWorkspace(1));
  Expr e = expr::parse(text, *ws);
  for (const auto& s : expr::symbolsOf(e)) {
    if (s->name != "x" && s->name != "t" && s->name != "k" && s->name != "omega") {
      throw ConfigError("expression '" + text + "' may only use x, t, k and omega");
    }
  }
  double k = params.getDouble("k", 1.0);
  double omega = params.getDouble("omega", k * k);
  return [e, k, omega](double x, double t) {
    return expr::evaluate(e, {{"x", x}, {"t", t}, {"k", k}, {"omega", omega}});
  };
}

numerics::Stencil stencilOf(const Config& c, const std::string& key, const std::string& fallback) {
  std::string s = c.getString(key, fallback);
  if (s == "central") return numerics::Stencil::Central;
  if (s == "compact") return numerics::Stencil::Compact;
  throw ConfigError(key + " must be central or compact");
}

/// dt = T / ceil(T / (ratio dx)).
std::pair<double, int> timeStep(double T, double ratio, double dx) {
  int steps = static_cast<int>(std::ceil(T / (ratio * dx) - 1e-9));
  steps = std::max(steps, 1);
  return {T / steps, steps};
}

json orderJson(const numerics::ConvergenceTable& t) {
  json w = json::array();
  for (const auto& s : t.warnings) w.push_back(s);
  return w;
}

json lineOf(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(d);
  return a;
}

ComplexField gaussianPacket(const Grid1D& g, double sigma, double k) {
  ComplexField u = numerics::sample<Complex>(g, [&](double x) { return numerics::freeGaussian(x, 0, sigma, k); });
  u.boundary = {0.0, 0.0};
  return u;
}

}  // namespace

numerics::Potential compilePotential(const std::string& text, const Config& params) {
  auto f = compileField(text, params);
  for (double x : {-0.7, 0.3, 1.1}) {
    if (std::abs(f(x, 0.2).imag()) > 1e-12) throw ConfigError("potential '" + text + "' is not real");
  }
  return [f](double x, double t) { return f(x, t).real(); };
}

json constructReport(const jetpde::JetPDE& p, const connection::GaugePolicy& policy, const Expr& lambda,
                     TorsionConvention convention) {
  json report;
  report["spec"] = {{"dimension", p.n},
                    {"time", p.timeCoefficient == Expr(1) ? "diffusion" : "schrodinger"},
                    {"residual", toPrefix(p.residual)},
                    {"policy", policy.name()},
                    {"lambda", toPrefix(lambda)},
                    {"torsionConvention", connection::toString(convention)}};
  json constructed = connection::runConstruct(p, policy, lambda, convention);
  for (auto& [k, v] : constructed.items()) report[k] = v;

  TransformedPDE tp = applyGroup(p, generalElement(p));
  ConnectionSolution cs = matchConnection(tp, policy);
  WeylConnection w = embedWeyl(cs, p);
  json checks;
  checks["matching"] = cs.residualConstraints.empty();
  checks["roundTrip"] = expr::equiv(forms::covariantDivergence(cs.omega, p.jetVector(), p.eta), tp.reconstruction());
  checks["abelian"] = forms::isZeroMatrixForm(forms::matrixWedge(cs.omega, cs.omega));
  bool torsionFree = false;
  bool vacuum = false;
  try {
    TorsionSolution ts = connection::torsionConstraints(w, convention);
    WeylConnection fixed = w.withEpsilon(ts.epsilon);
    for (std::size_t i = 1; i < fixed.omega.rows(); ++i) fixed.omega.set(i, 0, forms::KForm(fixed.frame, 1));
    torsionFree = forms::isZeroMatrixForm(forms::torsionBlock(fixed.matrix(), convention));
    Expr vac = connection::specializeProlongation(p, ts.constraints);
    jetpde::JetPDE spatial = p;
    if (policy.kind != connection::PolicyKind::ZeroAlphaT) spatial.timeCoefficient = Expr(0);
    Expr expected = jetpde::secondOrderResidual(spatial, p.ws["a"]) / p.ws["a"];
    if (policy.kind == connection::PolicyKind::Custom) expected = expected - policy.f + Expr(std::int64_t{p.n}) * policy.g;
    vacuum = expr::equiv(vac, expected);
  } catch (const connection::UnsolvableEpsilonError&) {
  }
  checks["torsionFreeAfterFixing"] = torsionFree;
  checks["vacuumSpecialization"] = vacuum;
  bool pass = true;
  for (const auto& [k, v] : checks.items()) pass = pass && v.get<bool>();
  report["checks"] = checks;
  report["pass"] = pass;
  return report;
}

json gaugeReport(const jetpde::JetPDE& p, const Expr& lambda, std::uint64_t seed, int samples) {
  json report;
  connection::GaugeConstraints gc = connection::gaugeSubgroupConstraints(p, lambda);
  json fs = json::array();
  for (const auto& f : gc.f) fs.push_back(toPrefix(f));
  json printed = json::array();
  for (const auto& pc : gc.printed) {
    printed.push_back({{"label", pc.label}, {"expression", toPrefix(pc.expression)}, {"equivalent", pc.equivalent}});
  }
  report["constraints"] = {
      {"lambda", toPrefix(lambda)}, {"f", fs}, {"scalarConstraint", toPrefix(gc.scalarConstraint)}, {"printed", printed}};

  WeylConnection w = embedWeyl(matchConnection(applyGroup(p, generalElement(p))), p);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::uniform_int_distribution<int> lam(1, 4);
  std::map<int, connection::GaugeConstraints> byLambda;
  json rows = json::array();
  int passed = 0;
  for (int s = 0; s < samples; ++s) {
    int l = lam(rng);
    Expr q;
    for (const auto& c : p.ws.coordinates()) q = q + Expr(std::int64_t{coeff(rng)}) * Expr::symbol(c);
    Expr xs = Expr::symbol(p.coordinate(1));
    q = q + Expr(expr::Number(expr::Rational{coeff(rng), 2}, expr::Rational{0, 1})) * xs * xs;
    Expr e = p.ws["e"] * expr::exp(q);
    auto it = byLambda.find(l);
    if (it == byLambda.end()) it = byLambda.emplace(l, connection::gaugeSubgroupConstraints(p, Expr(std::int64_t{l}))).first;
    std::vector<Expr> f;
    for (const auto& fi : it->second.f) f.push_back(expr::substitute(fi, {{"e", e}}));
    forms::GroupElement h(e, f, forms::GroupFlavor::H0Candidate);
    connection::ConsistencyReport r = connection::checkGaugeConsistency(w, h, p, Expr(std::int64_t{l}));
    forms::Curvature mc = forms::curvature(forms::weylMaurerCartan(h, w.frame));
    bool structure = forms::isZeroMatrixForm(mc.omega) && mc.torsion && forms::isZeroMatrixForm(*mc.torsion);
    bool ok = r.pass() && structure;
    passed += ok ? 1 : 0;
    json row{{"sample", s}, {"lambda", l}, {"e", toPrefix(e)}};
    for (const auto& c : r.checks) row[c.block] = c.pass;
    row["structureEquation"] = structure;
    rows.push_back(row);
  }
  report["samples"] = rows;
  report["seed"] = seed;
  report["passed"] = passed;
  report["total"] = samples;
  report["pass"] = passed == samples;
  return report;
}

json torsionReport(const jetpde::JetPDE& p, const connection::GaugePolicy& policy, TorsionConvention convention) {
  json report;
  ConnectionSolution cs = matchConnection(applyGroup(p, generalElement(p)), policy);
  WeylConnection w = embedWeyl(cs, p);
  report["convention"] = connection::toString(convention);
  report["policy"] = policy.name();
  try {
    TorsionSolution ts = connection::torsionConstraints(w, convention);
    json constraints = json::array();
    for (const auto& c : ts.constraints) constraints.push_back(toPrefix(c));
    report["epsilon"] = forms::toJson(ts.epsilon);
    report["rank"] = ts.rank;
    report["unknowns"] = ts.unknowns;
    report["constraints"] = constraints;
    report["vacuumResidual"] = toPrefix(connection::specializeProlongation(p, ts.constraints));
    forms::KForm expectedEps = convention == TorsionConvention::ScaleActsLeft ? -cs.alpha : cs.alpha;
    WeylConnection fixed = w.withEpsilon(ts.epsilon);
    for (std::size_t i = 1; i < fixed.omega.rows(); ++i) fixed.omega.set(i, 0, forms::KForm(fixed.frame, 1));
    json checks;
    checks["epsilonFromAlpha"] = forms::equivForms(ts.epsilon, expectedEps);
    checks["torsionVanishesAfterFixing"] = forms::isZeroMatrixForm(forms::torsionBlock(fixed.matrix(), convention));
    checks["constraintCount"] = static_cast<int>(ts.constraints.size()) >= p.n;
    bool pass = true;
    for (const auto& [k, v] : checks.items()) pass = pass && v.get<bool>();
    report["checks"] = checks;
    report["pass"] = pass;
  } catch (const connection::UnsolvableEpsilonError& err) {
    report["error"] = err.what();
    report["rank"] = err.rank();
    report["pass"] = false;
  }
  return report;
}

json vacuumReport(const Config& c) {
  const double xmin = c.getDouble("xmin", -4);
  const double xmax = c.getDouble("xmax", 4);
  const std::string potential = c.getString("potential", "x^2 - 1");
  const std::string exact = c.getString("exact", "exp(-x^2/2)");
  const auto stencil = stencilOf(c, "stencil", "compact");
  const double minOrder = c.getDouble("min_order", 1.9);
  auto V = compilePotential(potential, c);
  auto n = compilePotential(exact, c);

  json rows = json::array();
  json warnings = json::array();
  bool positive = true;
  auto table = numerics::measureConvergence(
      [&](int N) {
        Grid1D g = Grid1D::make(xmin, xmax, N);
        auto r = numerics::solveVacuumBVP([&](double x) { return V(x, 0); }, g, {n(xmin, 0), n(xmax, 0)}, stencil);
        double err = 0;
        for (int i = 0; i < N; ++i) err = std::max(err, std::abs(r.n.values[i] - n(g.x(i), 0)));
        double minN = r.n.values.minCoeff();
        positive = positive && minN > 0;
        for (const auto& w : r.warnings) warnings.push_back("N=" + std::to_string(N) + ": " + w);
        rows.push_back({{"N", N}, {"maxError", err}, {"minN", minN}});
        return err;
      },
      resolutions(c, {128, 256, 512}));
  json report;
  report["potential"] = potential;
  report["exact"] = exact;
  report["stencil"] = c.getString("stencil", "compact");
  report["table"] = rows;
  report["order"] = table.order;
  report["minOrder"] = minOrder;
  report["positive"] = positive;
  report["warnings"] = warnings;
  report["convergenceWarnings"] = orderJson(table);
  report["pass"] = positive && table.order >= minOrder;
  return report;
}

json splitReport(const Config& c) {
  const double xmin = c.getDouble("xmin", -10);
  const double xmax = c.getDouble("xmax", 10);
  const std::string potential = c.getString("potential", "1");
  const std::string vacuumExact = c.getString("vacuum_exact", "cosh");
  const double sigma = c.getDouble("sigma", 0.5);
  const double k = c.getDouble("k", 1.0);
  const double T = c.getDouble("T", 0.25);
  const double ratio = c.getDouble("dt_per_dx", 1.0);
  const double tol = c.getDouble("tolerance", 1e-3);
  const double minOrder = c.getDouble("min_order", 1.8);
  auto V = compilePotential(potential, c);
  // Boundary values of n: cosh(x) by default, or an expression.
  std::function<double(double)> nb;
  if (vacuumExact == "cosh") {
    nb = [](double x) { return std::cosh(x); };
  } else {
    auto f = compilePotential(vacuumExact, c);
    nb = [f](double x) { return f(x, 0); };
  }

  json rows = json::array();
  auto table = numerics::measureConvergence(
      [&](int N) {
        Grid1D g = Grid1D::make(xmin, xmax, N);
        auto vac = numerics::solveVacuumBVP([&](double x) { return V(x, 0); }, g, {nb(xmin), nb(xmax)});
        if (!vac.warnings.empty()) throw numerics::NumericsError("vacuum: " + vac.warnings.front());
        ComplexField u0 = gaussianPacket(g, sigma, k);
        auto [dt, steps] = timeStep(T, ratio, g.dx());
        numerics::EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.steps = steps;
        cfg.V = V;
        ComplexField u = numerics::evolveDirect(u0, cfg).last();
        ComplexField w0 = u0;
        for (int i = 0; i < N; ++i) w0.values[i] /= vac.n.values[i];
        w0.boundary = {u0.boundary.first / nb(xmin), u0.boundary.second / nb(xmax)};
        ComplexField w = numerics::evolveSplit(w0, vac.n, cfg).last();
        Eigen::VectorXcd nw = w.values.cwiseProduct(vac.n.values.cast<Complex>());
        double rel = (nw - u.values).norm() / u.values.norm();
        rows.push_back({{"N", N}, {"dt", dt}, {"steps", steps}, {"relativeMismatch", rel}});
        return rel;
      },
      resolutions(c, {256, 512, 1024}));
  json report;
  report["potential"] = potential;
  report["T"] = T;
  report["table"] = rows;
  report["finestMismatch"] = table.error.back();
  report["tolerance"] = tol;
  report["order"] = table.order;
  report["minOrder"] = minOrder;
  report["convergenceWarnings"] = orderJson(table);
  report["pass"] = table.error.back() < tol && table.order >= minOrder;
  return report;
}

json normReport(const Config& c) {
  const double xmin = c.getDouble("xmin", -10);
  const double xmax = c.getDouble("xmax", 10);
  const int N = static_cast<int>(c.getInt("N", 512));
  const double dt = c.getDouble("dt", 1e-3);
  const int steps = static_cast<int>(c.getInt("steps", 1000));
  const double tol = c.getDouble("tolerance", 1e-12);
  std::vector<std::string> potentials;
  {
    std::stringstream ss(c.getString("potentials", "0;x^2"));
    std::string item;
    while (std::getline(ss, item, ';')) potentials.push_back(item);
  }
  Grid1D g = Grid1D::make(xmin, xmax, N);
  ComplexField u0 = gaussianPacket(g, c.getDouble("sigma", 0.5), c.getDouble("k", 1.0));
  json rows = json::array();
  bool pass = true;
  for (const auto& pot : potentials) {
    numerics::EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.steps = steps;
    cfg.V = compilePotential(pot, c);
    cfg.recordEvery = 1;
    auto series = numerics::evolveDirect(u0, cfg);
    double worst = 0;
    for (std::size_t s = 0; s + 1 < series.frames.size(); ++s) {
      double a = numerics::l2Norm(series.frames[s]);
      double b = numerics::l2Norm(series.frames[s + 1]);
      worst = std::max(worst, std::abs(b - a) / a);
    }
    double total = std::abs(numerics::l2Norm(series.last()) - numerics::l2Norm(u0)) / numerics::l2Norm(u0);
    rows.push_back({{"potential", pot}, {"maxDriftPerStep", worst}, {"totalDrift", total}});
    pass = pass && worst <= tol;
  }
  json report;
  report["N"] = N;
  report["dt"] = dt;
  report["steps"] = steps;
  report["tolerance"] = tol;
  report["table"] = rows;
  report["pass"] = pass;
  return report;
}

json continuityReport(const Config& c) {
  const double xmin = c.getDouble("xmin", -5);
  const double xmax = c.getDouble("xmax", 5);
  const std::string potential = c.getString("potential", "1");
  const double sigma = c.getDouble("sigma", 1.0);
  const double k = c.getDouble("k", 0.5);
  const double T = c.getDouble("T", 0.5);
  const double ratio = c.getDouble("dt_per_dx", 0.25);
  const double eps = c.getDouble("perturbation", 0.01);
  const double minOrder = c.getDouble("min_order", 1.8);
  const double controlRatio = c.getDouble("control_ratio", 10);
  auto V = compilePotential(potential, c);
  const double V0 = V(0, 0);
  if (std::abs(V(1.3, 0.4) - V0) > 0 || std::abs(V(-2.1, 0.1) - V0) > 0) {
    throw ConfigError("continuity scenario needs a constant potential");
  }
  if (V0 <= 0) throw ConfigError("continuity scenario needs a positive potential");
  const double r = std::sqrt(V0);

  json rows = json::array();
  std::vector<double> h, good, bad;
  for (int N : resolutions(c, {128, 256, 512})) {
    Grid1D g = Grid1D::make(xmin, xmax, N);
    auto vac = numerics::solveVacuumBVP([&](double) { return V0; }, g, {std::cosh(r * xmin), std::cosh(r * xmax)});
    RealField perturbed = vac.n;
    for (int i = 0; i < N; ++i) perturbed.values[i] *= 1 + eps * std::sin(g.x(i));
    perturbed.boundary = {vac.n.boundary.first * (1 + eps * std::sin(xmin)),
                          vac.n.boundary.second * (1 + eps * std::sin(xmax))};
    auto [dt, steps] = timeStep(T, ratio, g.dx());
    numerics::TimeSeries u;
    u.dt = dt;
    for (int s = 0; s <= steps; ++s) {
      double t = s * dt;
      Complex phase = std::exp(Complex(0, -V0 * t));
      ComplexField f = numerics::sample<Complex>(g, [&](double x) { return phase * numerics::freeGaussian(x, t, sigma, k); });
      u.steps.push_back(s);
      u.frames.push_back(f);
    }
    double rg = numerics::continuityResidual(u, vac.n);
    double rb = numerics::continuityResidual(u, perturbed);
    h.push_back(g.dx());
    good.push_back(rg);
    bad.push_back(rb);
    rows.push_back({{"N", N}, {"dt", dt}, {"compliant", rg}, {"perturbed", rb}});
  }
  std::vector<std::string> warnings;
  double order = numerics::convergenceOrder(h, good, &warnings);
  double badOrder = numerics::convergenceOrder(h, bad);
  double ratioFinest = bad.back() / good.back();
  json report;
  report["potential"] = potential;
  report["perturbation"] = eps;
  report["table"] = rows;
  report["order"] = order;
  report["perturbedOrder"] = badOrder;
  report["minOrder"] = minOrder;
  report["finestRatio"] = ratioFinest;
  report["controlRatio"] = controlRatio;
  report["pass"] = order >= minOrder && ratioFinest >= controlRatio && badOrder < 0.5;
  return report;
}

json madelungReport(const Config& c) {
  json report;
  // Plane wave, sampled exactly.
  {
    const double k = c.getDouble("k", 1.5);
    const double omega = c.getDouble("omega", k * k);
    const int N = static_cast<int>(c.getInt("plane_N", 256));
    Grid1D g = Grid1D::make(-5, 5, N);
    numerics::TimeSeries u;
    u.dt = 1e-3;
    for (int s = 0; s <= 10; ++s) {
      double t = s * u.dt;
      u.steps.push_back(s);
      u.frames.push_back(numerics::sample<Complex>(g, [&](double x) { return std::exp(Complex(0, k * x - omega * t)); }));
    }
    auto m = numerics::madelungSplit(u.frames.front());
    double rhoDev = (m.rho.values.array() - 1.0).abs().maxCoeff();
    double qMax = m.Q.values.cwiseAbs().maxCoeff();
    auto res = numerics::madelungResiduals(u, [](double, double) { return 0.0; });
    double expected = std::abs(omega - k * k);
    bool ok = rhoDev < 1e-12 && qMax < 1e-10 && res.continuity < 1e-10 && std::abs(res.hamiltonJacobi - expected) < 1e-10;
    report["planeWave"] = {{"k", k},
                           {"omega", omega},
                           {"rhoDeviation", rhoDev},
                           {"maxAbsQ", qMax},
                           {"continuityResidual", res.continuity},
                           {"hamiltonJacobiResidual", res.hamiltonJacobi},
                           {"expectedHamiltonJacobi", expected},
                           {"pass", ok}};
  }
  // Harmonic ground state evolved directly.
  {
    const double L = c.getDouble("harmonic_xmax", 6);
    const double window = c.getDouble("window", 3);
    const double T = c.getDouble("T", 0.5);
    const double ratio = c.getDouble("dt_per_dx", 0.5);
    const double minOrder = c.getDouble("min_order", 1.8);
    std::vector<double> h, cont, hj;
    json rows = json::array();
    for (int N : resolutions(c, {128, 256, 512})) {
      Grid1D g = Grid1D::make(-L, L, N);
      ComplexField u0 = numerics::sample<Complex>(g, [](double x) { return Complex(std::exp(-x * x / 2), 0); });
      u0.boundary = {0.0, 0.0};
      auto [dt, steps] = timeStep(T, ratio, g.dx());
      numerics::EvolutionConfig cfg;
      cfg.dt = dt;
      cfg.steps = steps;
      cfg.V = [](double x, double) { return x * x; };
      cfg.recordEvery = 1;
      auto series = numerics::evolveDirect(u0, cfg);
      auto res = numerics::madelungResiduals(series, cfg.V, std::pair{-window, window});
      h.push_back(g.dx());
      cont.push_back(res.continuity);
      hj.push_back(res.hamiltonJacobi);
      rows.push_back({{"N", N}, {"dt", dt}, {"continuity", res.continuity}, {"hamiltonJacobi", res.hamiltonJacobi}});
    }
    double oc = numerics::convergenceOrder(h, cont);
    double oh = numerics::convergenceOrder(h, hj);
    report["harmonic"] = {{"window", lineOf({-window, window})},
                          {"table", rows},
                          {"continuityOrder", oc},
                          {"hamiltonJacobiOrder", oh},
                          {"minOrder", minOrder},
                          {"pass", oc >= minOrder && oh >= minOrder}};
  }
  report["pass"] = report["planeWave"]["pass"].get<bool>() && report["harmonic"]["pass"].get<bool>();
  return report;
}

}  // namespace cartan::verify
