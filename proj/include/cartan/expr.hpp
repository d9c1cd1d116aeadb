#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/number.hpp"

namespace cartan::expr {

enum class SymbolKind {
  Coordinate,  ///< base coordinate: t, x, x1 ... xn
  Jet,         ///< jet variable: v, v1 ... vn (independent coordinate on J^1)
  Function,    ///< named function of a fixed list of base coordinates
  Parameter,   ///< constant symbol (lambda, k, ...); differentiates to zero
};

std::string_view toString(SymbolKind kind);

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Coordinate;
  /// Base coordinates the symbol depends on. Functions and jet variables only;
  /// for jet variables this is the coordinate list of a section.
  std::vector<std::string> arity;
};

using SymbolRef = std::shared_ptr<const Symbol>;

enum class Op { Number, Symbol, Pow, Mul, Add, Ln, Exp };

class Expr;
struct Node;

class SymbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by an expression that simplifies to the zero constant.
class DivisionByZeroError : public SymbolicError {
 public:
  DivisionByZeroError() : SymbolicError("division by syntactic zero") {}
};

class KindMismatchError : public SymbolicError {
 public:
  using SymbolicError::SymbolicError;
};

/// Immutable expression handle. Every Expr produced through the public
/// builders is in canonical (simplified) form; equality is structural.
class Expr {
 public:
  Expr();  // zero
  Expr(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Expr(const Number& value);  // NOLINT(google-explicit-constructor)

  static Expr symbol(SymbolRef sym);
  /// Partial derivative of a function or jet symbol; `orders[k]` is the
  /// derivative order in `sym->arity[k]`.
  static Expr derivative(SymbolRef sym, std::vector<int> orders);
  static Expr imaginaryUnit() { return Expr(Number::imaginaryUnit()); }

  Op op() const;
  const Number& number() const;               // Op::Number
  const SymbolRef& sym() const;               // Op::Symbol
  const std::vector<int>& orders() const;     // Op::Symbol
  const std::vector<Expr>& args() const;      // Add, Mul: terms; Pow, Ln, Exp: one
  int exponent() const;                       // Op::Pow
  std::size_t hash() const;

  bool isZero() const;
  bool isOne() const;
  bool isNumber() const { return op() == Op::Number; }
  bool isDerivative() const;  // symbol node with a nonzero order

  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  const Node* raw() const { return node_.get(); }

 private:
  friend struct Builder;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Number;
  Number num;
  SymbolRef sym;
  std::vector<int> orders;
  std::vector<Expr> args;
  int exponent = 0;
  std::size_t hash = 0;
};

/// Total structural order; canonical sums and products are sorted by it.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr pow(const Expr& base, int exponent);
Expr ln(const Expr& arg);
Expr exp(const Expr& arg);
Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);

/// Rebuilds the tree through the canonicalizing builders. Public builders
/// already return canonical trees, so this is idempotent and mostly useful
/// for trees assembled by hand through `Builder`.
Expr simplify(const Expr& ex);

/// d/d(coord). Jet variables are independent coordinates of J^1 and are
/// constant along base directions.
Expr differentiate(const Expr& ex, const SymbolRef& coord);
Expr differentiate(const Expr& ex, const SymbolRef& coord, int order);

/// Total derivative along a section: jet variables are treated as functions
/// of their arity, so D_x(v) is the atom D[v,x,1].
Expr totalDerivative(const Expr& ex, const SymbolRef& coord);

using Bindings = std::map<std::string, Expr>;

/// Simultaneous substitution keyed by symbol name. A bound function or jet
/// symbol carries its derivatives with it: D[b,x,1] under {b -> e} becomes
/// the total derivative of e. Throws KindMismatchError when a binding does
/// not respect the symbol kind.
Expr substitute(const Expr& ex, const Bindings& bindings);

/// Generic bottom-up rewrite of symbol nodes (derivative atoms included).
/// The callback returns the replacement or nullptr-like empty optional to
/// keep the node.
template <typename F>
Expr mapSymbols(const Expr& ex, F&& fn);

bool dependsOn(const Expr& ex, std::string_view symbolName);
bool containsKind(const Expr& ex, SymbolKind kind);
/// Distinct symbols (not derivative atoms) referenced by `ex`.
std::vector<SymbolRef> symbolsOf(const Expr& ex);

/// Infix text accepted by `parse`.
std::string render(const Expr& ex);
/// Canonical prefix text used in reports and golden files.
std::string toPrefix(const Expr& ex);

// ---------------------------------------------------------------------------

struct Builder {
  static Expr make(Node node);
  static Expr addRaw(std::vector<Expr> terms);
  static Expr mulRaw(std::vector<Expr> factors);
  static Expr powRaw(Expr base, int exponent);
};

Expr rebuild(const Expr& ex, std::vector<Expr> args);

template <typename F>
Expr mapSymbols(const Expr& ex, F&& fn) {
  switch (ex.op()) {
    case Op::Number:
      return ex;
    case Op::Symbol: {
      auto r = fn(ex);
      return r ? *r : ex;
    }
    default: {
      std::vector<Expr> args;
      args.reserve(ex.args().size());
      for (const auto& a : ex.args()) args.push_back(mapSymbols(a, fn));
      return rebuild(ex, std::move(args));
    }
  }
}

}  // namespace cartan::expr
