#pragma once

// Test-only generator of random expression trees over a small workspace.

#include <random>
#include <string>
#include <vector>

#include "cartan/workspace.hpp"

namespace cartan::testing {

inline expr::Workspace smallWorkspace() {
  expr::Workspace ws;
  ws.declareCoordinate("t");
  ws.declareCoordinate("x");
  ws.declareJet("v");
  ws.declareJet("v1");
  for (const char* f : {"a", "b", "e", "f", "g"}) ws.declareFunction(f);
  ws.declareFunction("V");
  ws.declareFunction("n", {"x"});
  ws.declareParameter("lambda");
  ws.declareParameter("k");
  return ws;
}

class ExprGenerator {
 public:
  ExprGenerator(const expr::Workspace& ws, std::uint64_t seed, bool withJets = false)
      : ws_(ws), rng_(seed), withJets_(withJets) {}

  /// Replaces the default leaf symbols (t, x, a, b, e, V, k).
  ExprGenerator& leaves(std::vector<std::string> names) {
    names_ = std::move(names);
    return *this;
  }

  expr::Expr leaf() {
    std::vector<std::string> names = names_;
    if (withJets_) {
      names.push_back("v");
      names.push_back("v1");
    }
    std::uniform_int_distribution<int> pick(0, static_cast<int>(names.size()) + 1);
    int i = pick(rng_);
    if (i == static_cast<int>(names.size())) {
      std::uniform_int_distribution<int> c(-3, 3);
      return expr::Expr(std::int64_t{c(rng_)});
    }
    if (i == static_cast<int>(names.size()) + 1) return expr::Expr::imaginaryUnit();
    expr::Expr e = ws_[names[static_cast<std::size_t>(i)]];
    if (e.sym()->kind == expr::SymbolKind::Function && coin()) {
      const auto& coords = ws_.coordinates();
      std::uniform_int_distribution<int> c(0, static_cast<int>(coords.size()) - 1);
      return expr::totalDerivative(e, coords[static_cast<std::size_t>(c(rng_))]);
    }
    return e;
  }

  expr::Expr operator()(int depth = 3) {
    if (depth == 0) return leaf();
    std::uniform_int_distribution<int> pick(0, 6);
    switch (pick(rng_)) {
      case 0:
        return (*this)(depth - 1) + (*this)(depth - 1);
      case 1:
        return (*this)(depth - 1) - (*this)(depth - 1);
      case 2:
      case 3:
        return (*this)(depth - 1) * (*this)(depth - 1);
      case 4: {
        // Denominator drawn from named functions so it is never syntactically zero.
        return (*this)(depth - 1) / ws_[coin() ? "a" : "e"];
      }
      case 5:
        return expr::pow((*this)(depth - 1), 2);
      default:
        return expr::exp(expr::Expr::symbol(ws_.coordinates().back()) * expr::Expr(std::int64_t{uniform(-2, 2)}));
    }
  }

  int uniform(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng_);
  }

  bool coin() {
    std::bernoulli_distribution b(0.5);
    return b(rng_);
  }

 private:
  const expr::Workspace& ws_;
  std::mt19937_64 rng_;
  bool withJets_;
  std::vector<std::string> names_{"t", "x", "a", "b", "e", "V", "k"};
};

}  // namespace cartan::testing
