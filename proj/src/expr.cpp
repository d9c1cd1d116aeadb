#include "cartan/expr.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <utility>

namespace cartan::expr {
namespace {

int opRank(Op op) { return static_cast<int>(op); }

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t computeHash(const Node& n) {
  std::size_t h = std::hash<int>{}(opRank(n.op));
  switch (n.op) {
    case Op::Number:
      return mix(h, n.num.hash());
    case Op::Symbol:
      h = mix(h, std::hash<std::string>{}(n.sym->name));
      for (int o : n.orders) h = mix(h, std::hash<int>{}(o));
      return h;
    default:
      h = mix(h, std::hash<int>{}(n.exponent));
      for (const auto& a : n.args) h = mix(h, a.hash());
      return h;
  }
}

const Expr& zeroExpr() {
  static const Expr z{std::int64_t{0}};
  return z;
}

/// Splits a canonical term into numeric coefficient and remaining factor.
std::pair<Number, Expr> splitCoefficient(const Expr& term) {
  if (term.op() == Op::Number) return {term.number(), Expr(1)};
  if (term.op() == Op::Mul && term.args().front().op() == Op::Number) {
    const auto& args = term.args();
    std::vector<Expr> rest(args.begin() + 1, args.end());
    if (rest.size() == 1) return {args.front().number(), rest.front()};
    return {args.front().number(), Builder::mulRaw(std::move(rest))};
  }
  return {Number(1), term};
}

Expr withCoefficient(const Number& c, const Expr& rest) {
  if (c.isZero()) return zeroExpr();
  if (rest.isOne()) return Expr(c);
  if (c.isOne()) return rest;
  std::vector<Expr> f{Expr(c)};
  if (rest.op() == Op::Mul) {
    f.insert(f.end(), rest.args().begin(), rest.args().end());
  } else {
    f.push_back(rest);
  }
  return Builder::mulRaw(std::move(f));
}

Expr makeAdd(const std::vector<Expr>& input) {
  std::map<Expr, Number, ExprLess> collected;
  Number constant(0);
  std::function<void(const Expr&)> absorb = [&](const Expr& t) {
    if (t.op() == Op::Add) {
      for (const auto& a : t.args()) absorb(a);
      return;
    }
    if (t.op() == Op::Number) {
      constant = constant + t.number();
      return;
    }
    auto [c, rest] = splitCoefficient(t);
    auto it = collected.find(rest);
    if (it == collected.end()) {
      collected.emplace(rest, c);
    } else {
      it->second = it->second + c;
    }
  };
  for (const auto& t : input) absorb(t);

  std::vector<Expr> terms;
  if (!constant.isZero()) terms.emplace_back(constant);
  for (const auto& [rest, c] : collected) {
    if (!c.isZero()) terms.push_back(withCoefficient(c, rest));
  }
  if (terms.empty()) return zeroExpr();
  if (terms.size() == 1) return terms.front();
  return Builder::addRaw(std::move(terms));
}

Expr makePow(const Expr& base, int k);

Expr makeMul(const std::vector<Expr>& input) {
  Number coeff(1);
  std::map<Expr, int, ExprLess> powers;
  Expr expArg = zeroExpr();
  bool hasExp = false;

  std::function<void(const Expr&, int)> absorb = [&](const Expr& f, int k) {
    switch (f.op()) {
      case Op::Number:
        coeff = coeff * f.number().pow(k);
        return;
      case Op::Mul:
        for (const auto& a : f.args()) absorb(a, k);
        return;
      case Op::Pow:
        absorb(f.args().front(), f.exponent() * k);
        return;
      case Op::Exp:
        hasExp = true;
        expArg = makeAdd({expArg, makeMul({Expr(std::int64_t{k}), f.args().front()})});
        return;
      default:
        powers[f] += k;
    }
  };
  for (const auto& f : input) absorb(f, 1);

  if (coeff.isZero()) return zeroExpr();

  for (auto it = powers.begin(); it != powers.end();) {
    it = it->second == 0 ? powers.erase(it) : std::next(it);
  }

  // Distribute over the first sum appearing with a positive power.
  for (auto it = powers.begin(); it != powers.end(); ++it) {
    if (it->first.op() != Op::Add || it->second <= 0) continue;
    Expr sumBase = it->first;
    std::vector<Expr> others{Expr(coeff)};
    for (const auto& [b, k] : powers) {
      if (b == sumBase) {
        if (k > 1) others.push_back(Builder::powRaw(b, k - 1));
      } else {
        others.push_back(k == 1 ? b : Builder::powRaw(b, k));
      }
    }
    if (hasExp) others.push_back(exp(expArg));
    std::vector<Expr> terms;
    for (const auto& t : sumBase.args()) {
      auto f = others;
      f.push_back(t);
      terms.push_back(makeMul(f));
    }
    return makeAdd(terms);
  }

  std::vector<Expr> factors;
  for (const auto& [b, k] : powers) factors.push_back(k == 1 ? b : Builder::powRaw(b, k));
  if (hasExp && !expArg.isZero()) {
    factors.push_back(exp(expArg));
    std::sort(factors.begin(), factors.end(), ExprLess{});
  }
  if (factors.empty()) return Expr(coeff);
  if (factors.size() == 1 && coeff.isOne()) return factors.front();
  std::vector<Expr> all;
  if (!coeff.isOne()) all.emplace_back(coeff);
  all.insert(all.end(), factors.begin(), factors.end());
  return Builder::mulRaw(std::move(all));
}

Expr makePow(const Expr& base, int k) {
  if (k < 0 && base.isZero()) throw DivisionByZeroError();
  if (k == 0) return Expr(1);
  if (k == 1) return base;
  switch (base.op()) {
    case Op::Number:
      return Expr(base.number().pow(k));
    case Op::Pow:
      return makePow(base.args().front(), base.exponent() * k);
    case Op::Mul: {
      std::vector<Expr> f;
      for (const auto& a : base.args()) f.push_back(makePow(a, k));
      return makeMul(f);
    }
    case Op::Exp:
      return exp(makeMul({Expr(std::int64_t{k}), base.args().front()}));
    case Op::Add:
      if (k > 0) return makeMul(std::vector<Expr>(static_cast<std::size_t>(k), base));
      [[fallthrough]];
    default:
      return Builder::powRaw(base, k);
  }
}

bool inArity(const Symbol& s, const std::string& coord, std::size_t* index) {
  for (std::size_t i = 0; i < s.arity.size(); ++i) {
    if (s.arity[i] == coord) {
      *index = i;
      return true;
    }
  }
  return false;
}

Expr diff(const Expr& ex, const SymbolRef& coord, bool total) {
  switch (ex.op()) {
    case Op::Number:
      return zeroExpr();
    case Op::Symbol: {
      const Symbol& s = *ex.sym();
      switch (s.kind) {
        case SymbolKind::Coordinate:
          return Expr(s.name == coord->name ? 1 : 0);
        case SymbolKind::Parameter:
          return zeroExpr();
        case SymbolKind::Jet:
          if (!total) return zeroExpr();
          [[fallthrough]];
        case SymbolKind::Function: {
          std::size_t idx = 0;
          if (!inArity(s, coord->name, &idx)) return zeroExpr();
          std::vector<int> orders = ex.orders();
          orders.resize(s.arity.size(), 0);
          ++orders[idx];
          return Expr::derivative(ex.sym(), std::move(orders));
        }
      }
      return zeroExpr();
    }
    case Op::Add: {
      std::vector<Expr> terms;
      for (const auto& a : ex.args()) terms.push_back(diff(a, coord, total));
      return makeAdd(terms);
    }
    case Op::Mul: {
      const auto& f = ex.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr di = diff(f[i], coord, total);
        if (di.isZero()) continue;
        std::vector<Expr> prod{di};
        for (std::size_t j = 0; j < f.size(); ++j) {
          if (j != i) prod.push_back(f[j]);
        }
        terms.push_back(makeMul(prod));
      }
      return makeAdd(terms);
    }
    case Op::Pow: {
      const Expr& b = ex.args().front();
      int k = ex.exponent();
      return makeMul({Expr(std::int64_t{k}), makePow(b, k - 1), diff(b, coord, total)});
    }
    case Op::Ln: {
      const Expr& u = ex.args().front();
      return makeMul({diff(u, coord, total), makePow(u, -1)});
    }
    case Op::Exp:
      return makeMul({ex, diff(ex.args().front(), coord, total)});
  }
  return zeroExpr();
}

void requireCoordinate(const SymbolRef& coord) {
  if (!coord || coord->kind != SymbolKind::Coordinate) {
    throw KindMismatchError("differentiation variable must be a base coordinate");
  }
}

void collectSymbols(const Expr& ex, std::map<std::string, SymbolRef>& out) {
  if (ex.op() == Op::Symbol) {
    out.emplace(ex.sym()->name, ex.sym());
    return;
  }
  for (const auto& a : ex.args()) collectSymbols(a, out);
}

bool needsParensAsFactor(const Expr& e) {
  if (e.op() == Op::Add) return true;
  if (e.op() == Op::Number) return !e.number().isReal() || e.number().isNegativeReal();
  return false;
}


std::string renderFactor(const Expr& e) {
  std::string s = render(e);
  return needsParensAsFactor(e) ? "(" + s + ")" : s;
}

std::string renderPowBase(const Expr& e) {
  if (e.op() == Op::Symbol || e.op() == Op::Ln || e.op() == Op::Exp) return render(e);
  if (e.op() == Op::Number && e.number().isReal() && !e.number().isNegativeReal() &&
      e.number().isExact() && e.number().re().den == 1) {
    return render(e);
  }
  return "(" + render(e) + ")";
}

std::string renderSymbol(const Expr& e) {
  const Symbol& s = *e.sym();
  std::string out = s.name;
  const auto& orders = e.orders();
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] == 0) continue;
    out = "D[" + out + "," + s.arity[i] + "," + std::to_string(orders[i]) + "]";
  }
  return out;
}

std::string renderMul(const Expr& e) {
  Number coeff(1);
  std::vector<Expr> num;
  std::vector<Expr> den;
  for (const auto& f : e.args()) {
    if (f.op() == Op::Number) {
      coeff = f.number();
    } else if (f.op() == Op::Pow && f.exponent() < 0) {
      den.push_back(makePow(f.args().front(), -f.exponent()));
    } else {
      num.push_back(f);
    }
  }
  std::string out;
  if (coeff.isOne()) {
    // nothing
  } else if (coeff == Number(-1)) {
    out = "-";
  } else {
    out = coeff.toString();
    if (!num.empty()) out += "*";
  }
  if (num.empty()) {
    if (out.empty() || out == "-") out += "1";
  } else {
    for (std::size_t i = 0; i < num.size(); ++i) {
      if (i != 0) out += "*";
      out += renderFactor(num[i]);
    }
  }
  if (!den.empty()) {
    out += "/";
    if (den.size() == 1 && den.front().op() != Op::Add && den.front().op() != Op::Number) {
      out += render(den.front());
    } else {
      out += "(";
      for (std::size_t i = 0; i < den.size(); ++i) {
        if (i != 0) out += "*";
        out += renderFactor(den[i]);
      }
      out += ")";
    }
  }
  return out;
}

bool hasNegativeLead(const Expr& term) {
  auto [c, rest] = splitCoefficient(term);
  return c.isNegativeReal();
}

}  // namespace

std::string_view toString(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Coordinate:
      return "base-coordinate";
    case SymbolKind::Jet:
      return "jet-variable";
    case SymbolKind::Function:
      return "function-name";
    case SymbolKind::Parameter:
      return "parameter";
  }
  return "?";
}

// --- Builder ---------------------------------------------------------------

Expr Builder::make(Node node) {
  node.hash = computeHash(node);
  return Expr(std::make_shared<const Node>(std::move(node)));
}

Expr Builder::addRaw(std::vector<Expr> terms) {
  Node n;
  n.op = Op::Add;
  n.args = std::move(terms);
  return make(std::move(n));
}

Expr Builder::mulRaw(std::vector<Expr> factors) {
  Node n;
  n.op = Op::Mul;
  n.args = std::move(factors);
  return make(std::move(n));
}

Expr Builder::powRaw(Expr base, int exponent) {
  Node n;
  n.op = Op::Pow;
  n.args = {std::move(base)};
  n.exponent = exponent;
  return make(std::move(n));
}

// --- Expr ------------------------------------------------------------------

Expr::Expr() : Expr(std::int64_t{0}) {}

Expr::Expr(std::int64_t value) : Expr(Number(value)) {}

Expr::Expr(const Number& value) {
  Node n;
  n.op = Op::Number;
  n.num = value;
  n.hash = computeHash(n);
  node_ = std::make_shared<const Node>(std::move(n));
}

Expr Expr::symbol(SymbolRef sym) {
  Node n;
  n.op = Op::Symbol;
  n.sym = std::move(sym);
  return Builder::make(std::move(n));
}

Expr Expr::derivative(SymbolRef sym, std::vector<int> orders) {
  if (std::all_of(orders.begin(), orders.end(), [](int o) { return o == 0; })) {
    orders.clear();
  } else if (orders.size() != sym->arity.size()) {
    throw SymbolicError("derivative order vector does not match arity of " + sym->name);
  }
  Node n;
  n.op = Op::Symbol;
  n.sym = std::move(sym);
  n.orders = std::move(orders);
  return Builder::make(std::move(n));
}

Op Expr::op() const { return node_->op; }
const Number& Expr::number() const { return node_->num; }
const SymbolRef& Expr::sym() const { return node_->sym; }
const std::vector<int>& Expr::orders() const { return node_->orders; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
int Expr::exponent() const { return node_->exponent; }
std::size_t Expr::hash() const { return node_->hash; }
bool Expr::isZero() const { return op() == Op::Number && number().isZero(); }
bool Expr::isOne() const { return op() == Op::Number && number().isOne(); }
bool Expr::isDerivative() const { return op() == Op::Symbol && !orders().empty(); }

bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (hash() != o.hash()) return false;
  return compare(*this, o) == 0;
}

Expr operator+(const Expr& a, const Expr& b) { return makeAdd({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return makeAdd({a, makeMul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return makeMul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return makeMul({a, makePow(b, -1)}); }
Expr operator-(const Expr& a) { return makeMul({Expr(-1), a}); }

int compare(const Expr& a, const Expr& b) {
  if (a.raw() == b.raw()) return 0;
  if (a.op() != b.op()) return opRank(a.op()) < opRank(b.op()) ? -1 : 1;
  switch (a.op()) {
    case Op::Number:
      return a.number().compare(b.number());
    case Op::Symbol: {
      if (int c = a.sym()->name.compare(b.sym()->name)) return c < 0 ? -1 : 1;
      const auto& oa = a.orders();
      const auto& ob = b.orders();
      if (oa.size() != ob.size()) return oa.size() < ob.size() ? -1 : 1;
      for (std::size_t i = 0; i < oa.size(); ++i) {
        if (oa[i] != ob[i]) return oa[i] < ob[i] ? -1 : 1;
      }
      return 0;
    }
    case Op::Pow:
      if (int c = compare(a.args().front(), b.args().front())) return c;
      if (a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
      return 0;
    default: {
      const auto& x = a.args();
      const auto& y = b.args();
      std::size_t n = std::min(x.size(), y.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(x[i], y[i])) return c;
      }
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      return 0;
    }
  }
}

Expr pow(const Expr& base, int exponent) { return makePow(base, exponent); }

Expr ln(const Expr& arg) {
  if (arg.isZero()) throw DivisionByZeroError();
  if (arg.isOne()) return Expr(0);
  if (arg.op() == Op::Exp) return arg.args().front();
  Node n;
  n.op = Op::Ln;
  n.args = {arg};
  return Builder::make(std::move(n));
}

Expr exp(const Expr& arg) {
  if (arg.isZero()) return Expr(1);
  if (arg.op() == Op::Ln) return arg.args().front();
  Node n;
  n.op = Op::Exp;
  n.args = {arg};
  return Builder::make(std::move(n));
}

Expr sum(const std::vector<Expr>& terms) { return makeAdd(terms); }
Expr product(const std::vector<Expr>& factors) { return makeMul(factors); }

Expr rebuild(const Expr& ex, std::vector<Expr> args) {
  switch (ex.op()) {
    case Op::Add:
      return makeAdd(args);
    case Op::Mul:
      return makeMul(args);
    case Op::Pow:
      return makePow(args.front(), ex.exponent());
    case Op::Ln:
      return ln(args.front());
    case Op::Exp:
      return exp(args.front());
    default:
      return ex;
  }
}

Expr simplify(const Expr& ex) {
  if (ex.op() == Op::Number || ex.op() == Op::Symbol) return ex;
  std::vector<Expr> args;
  for (const auto& a : ex.args()) args.push_back(simplify(a));
  return rebuild(ex, std::move(args));
}

Expr differentiate(const Expr& ex, const SymbolRef& coord) {
  requireCoordinate(coord);
  return diff(ex, coord, false);
}

Expr differentiate(const Expr& ex, const SymbolRef& coord, int order) {
  Expr out = ex;
  for (int i = 0; i < order; ++i) out = differentiate(out, coord);
  return out;
}

Expr totalDerivative(const Expr& ex, const SymbolRef& coord) {
  requireCoordinate(coord);
  return diff(ex, coord, true);
}

Expr substitute(const Expr& ex, const Bindings& bindings) {
  if (bindings.empty()) return ex;
  return mapSymbols(ex, [&](const Expr& node) -> std::optional<Expr> {
    const Symbol& s = *node.sym();
    auto it = bindings.find(s.name);
    if (it == bindings.end()) return std::nullopt;
    const Expr& value = it->second;
    switch (s.kind) {
      case SymbolKind::Coordinate:
        throw KindMismatchError("cannot substitute base coordinate '" + s.name + "'");
      case SymbolKind::Parameter:
        if (containsKind(value, SymbolKind::Coordinate) || containsKind(value, SymbolKind::Function) ||
            containsKind(value, SymbolKind::Jet)) {
          throw KindMismatchError("parameter '" + s.name + "' must be bound to a constant expression");
        }
        return value;
      case SymbolKind::Function:
        if (containsKind(value, SymbolKind::Jet)) {
          throw KindMismatchError("function '" + s.name + "' cannot be bound to a jet expression");
        }
        break;
      case SymbolKind::Jet:
        break;
    }
    Expr out = value;
    const auto& orders = node.orders();
    for (std::size_t i = 0; i < orders.size(); ++i) {
      auto coord = std::make_shared<const Symbol>(Symbol{s.arity[i], SymbolKind::Coordinate, {}});
      for (int k = 0; k < orders[i]; ++k) out = totalDerivative(out, coord);
    }
    return out;
  });
}

bool dependsOn(const Expr& ex, std::string_view symbolName) {
  if (ex.op() == Op::Symbol) return ex.sym()->name == symbolName;
  return std::any_of(ex.args().begin(), ex.args().end(),
                     [&](const Expr& a) { return dependsOn(a, symbolName); });
}

bool containsKind(const Expr& ex, SymbolKind kind) {
  if (ex.op() == Op::Symbol) return ex.sym()->kind == kind;
  return std::any_of(ex.args().begin(), ex.args().end(),
                     [&](const Expr& a) { return containsKind(a, kind); });
}

std::vector<SymbolRef> symbolsOf(const Expr& ex) {
  std::map<std::string, SymbolRef> found;
  collectSymbols(ex, found);
  std::vector<SymbolRef> out;
  for (auto& [name, s] : found) out.push_back(s);
  return out;
}

std::string render(const Expr& ex) {
  switch (ex.op()) {
    case Op::Number:
      return ex.number().toString();
    case Op::Symbol:
      return renderSymbol(ex);
    case Op::Add: {
      std::string out;
      bool first = true;
      for (const auto& t : ex.args()) {
        if (first) {
          out = render(t);
          first = false;
        } else if (hasNegativeLead(t)) {
          out += " - " + render(-t);
        } else {
          out += " + " + render(t);
        }
      }
      return out;
    }
    case Op::Mul:
      return renderMul(ex);
    case Op::Pow:
      if (ex.exponent() < 0) return renderMul(Builder::mulRaw({ex}));
      return renderPowBase(ex.args().front()) + "^" + std::to_string(ex.exponent());
    case Op::Ln:
      return "ln(" + render(ex.args().front()) + ")";
    case Op::Exp:
      return "exp(" + render(ex.args().front()) + ")";
  }
  return "?";
}

std::string toPrefix(const Expr& ex) {
  switch (ex.op()) {
    case Op::Number:
      return ex.number().toPrefix();
    case Op::Symbol: {
      if (ex.orders().empty()) return ex.sym()->name;
      std::string out = "(D " + ex.sym()->name;
      for (std::size_t i = 0; i < ex.orders().size(); ++i) {
        if (ex.orders()[i] != 0) out += " " + ex.sym()->arity[i] + " " + std::to_string(ex.orders()[i]);
      }
      return out + ")";
    }
    case Op::Pow:
      return "(^ " + toPrefix(ex.args().front()) + " " + std::to_string(ex.exponent()) + ")";
    default: {
      std::string head = ex.op() == Op::Add ? "+" : ex.op() == Op::Mul ? "*" : ex.op() == Op::Ln ? "ln" : "exp";
      std::string out = "(" + head;
      for (const auto& a : ex.args()) out += " " + toPrefix(a);
      return out + ")";
    }
  }
}

}  // namespace cartan::expr
