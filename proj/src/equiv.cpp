#include "cartan/equiv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace cartan::expr {
namespace {

constexpr int kPolyDegree = 3;

void enumerateMonomials(int vars, int maxDegree, std::vector<int>& current, int index,
                        std::vector<std::vector<int>>& out) {
  if (index == vars) {
    out.push_back(current);
    return;
  }
  int used = 0;
  for (int i = 0; i < index; ++i) used += current[static_cast<std::size_t>(i)];
  for (int d = 0; d + used <= maxDegree; ++d) {
    current[static_cast<std::size_t>(index)] = d;
    enumerateMonomials(vars, maxDegree, current, index + 1, out);
  }
  current[static_cast<std::size_t>(index)] = 0;
}

}  // namespace

std::complex<double> RandomAssignment::sample() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double re = u(*rng_);
  double im = u(*rng_);
  return {re, im};
}

std::complex<double> RandomAssignment::coordinate(const std::string& name) {
  auto it = values_.find(name);
  if (it != values_.end()) return it->second;
  return values_.emplace(name, sample()).first->second;
}

std::complex<double> RandomAssignment::parameter(const std::string& name) { return coordinate("$" + name); }

const RandomAssignment::Polynomial& RandomAssignment::polynomial(const Symbol& s) {
  auto it = polys_.find(s.name);
  if (it != polys_.end()) return it->second;
  Polynomial p;
  std::vector<int> current(s.arity.size(), 0);
  enumerateMonomials(static_cast<int>(s.arity.size()), kPolyDegree, current, 0, p.monomials);
  for (std::size_t i = 0; i < p.monomials.size(); ++i) p.coeffs.push_back(sample());
  return polys_.emplace(s.name, std::move(p)).first->second;
}

std::complex<double> RandomAssignment::evalSymbol(const Expr& ex) {
  const Symbol& s = *ex.sym();
  switch (s.kind) {
    case SymbolKind::Coordinate:
      return coordinate(s.name);
    case SymbolKind::Parameter:
      return parameter(s.name);
    case SymbolKind::Function:
    case SymbolKind::Jet:
      break;
  }
  const Polynomial& p = polynomial(s);
  std::vector<std::complex<double>> point;
  for (const auto& a : s.arity) point.push_back(coordinate(a));
  std::vector<int> orders = ex.orders();
  orders.resize(s.arity.size(), 0);

  std::complex<double> total = 0.0;
  for (std::size_t m = 0; m < p.monomials.size(); ++m) {
    std::complex<double> term = p.coeffs[m];
    for (std::size_t v = 0; v < point.size(); ++v) {
      int power = p.monomials[m][v];
      int order = orders[v];
      if (order > power) {
        term = 0.0;
        break;
      }
      double falling = 1.0;
      for (int k = 0; k < order; ++k) falling *= power - k;
      term *= falling * std::pow(point[v], power - order);
    }
    total += term;
  }
  return total;
}

namespace {
std::atomic<std::uint64_t> gDefaultSeed{0x5eed};
}  // namespace

std::uint64_t defaultEquivSeed() { return gDefaultSeed.load(); }
void setDefaultEquivSeed(std::uint64_t seed) { gDefaultSeed.store(seed); }

std::complex<double> RandomAssignment::evaluate(const Expr& ex) {
  switch (ex.op()) {
    case Op::Number:
      return ex.number().value();
    case Op::Symbol:
      return evalSymbol(ex);
    case Op::Add: {
      std::complex<double> s = 0.0;
      for (const auto& a : ex.args()) s += evaluate(a);
      return s;
    }
    case Op::Mul: {
      std::complex<double> p = 1.0;
      for (const auto& a : ex.args()) p *= evaluate(a);
      return p;
    }
    case Op::Pow: {
      std::complex<double> b = evaluate(ex.args().front());
      if (ex.exponent() < 0) smallest_ = std::min(smallest_, std::abs(b));
      if (b == 0.0) return std::numeric_limits<double>::infinity();
      std::complex<double> r = 1.0;
      int k = std::abs(ex.exponent());
      for (int i = 0; i < k; ++i) r *= b;
      return ex.exponent() < 0 ? 1.0 / r : r;
    }
    case Op::Ln: {
      std::complex<double> a = evaluate(ex.args().front());
      smallest_ = std::min(smallest_, std::abs(a));
      return std::log(a);
    }
    case Op::Exp:
      return std::exp(evaluate(ex.args().front()));
  }
  return 0.0;
}

bool equiv(const Expr& lhs, const Expr& rhs, const EquivOptions& options) {
  if (lhs == rhs) return true;
  std::mt19937_64 rng(options.seed);
  int accepted = 0;
  int attempts = 0;
  while (accepted < options.trials) {
    if (attempts++ > options.trials + options.maxRetries) {
      throw EvaluationError("equiv: could not draw a non-singular sample point");
    }
    RandomAssignment point(rng);
    std::complex<double> l = point.evaluate(lhs);
    std::complex<double> r = point.evaluate(rhs);
    if (point.smallestDivisor() < options.singularityFloor) continue;
    if (!std::isfinite(std::abs(l)) || !std::isfinite(std::abs(r))) continue;
    double scale = std::max({1.0, std::abs(l), std::abs(r)});
    if (std::abs(l - r) > options.tol * scale) return false;
    ++accepted;
  }
  return true;
}

bool equiv(const Expr& lhs, const Expr& rhs, int trials, double tol, std::uint64_t seed) {
  EquivOptions o;
  o.trials = trials;
  o.tol = tol;
  o.seed = seed;
  return equiv(lhs, rhs, o);
}

bool isIdenticallyZero(const Expr& ex, const EquivOptions& options) { return equiv(ex, Expr(0), options); }

}  // namespace cartan::expr

namespace cartan::expr {

std::complex<double> evaluate(const Expr& ex, const std::map<std::string, std::complex<double>>& values) {
  switch (ex.op()) {
    case Op::Number:
      return ex.number().value();
    case Op::Symbol: {
      if (ex.isDerivative()) throw EvaluationError("cannot evaluate derivative of " + ex.sym()->name);
      auto it = values.find(ex.sym()->name);
      if (it == values.end()) throw EvaluationError("no value for symbol '" + ex.sym()->name + "'");
      return it->second;
    }
    case Op::Add: {
      std::complex<double> s = 0.0;
      for (const auto& a : ex.args()) s += evaluate(a, values);
      return s;
    }
    case Op::Mul: {
      std::complex<double> p = 1.0;
      for (const auto& a : ex.args()) p *= evaluate(a, values);
      return p;
    }
    case Op::Pow: {
      std::complex<double> b = evaluate(ex.args().front(), values);
      if (ex.exponent() < 0 && b == 0.0) throw EvaluationError("division by zero during evaluation");
      std::complex<double> r = 1.0;
      for (int i = 0; i < std::abs(ex.exponent()); ++i) r *= b;
      return ex.exponent() < 0 ? 1.0 / r : r;
    }
    case Op::Ln:
      return std::log(evaluate(ex.args().front(), values));
    case Op::Exp:
      return std::exp(evaluate(ex.args().front(), values));
  }
  return 0.0;
}

}  // namespace cartan::expr
