#include <cctype>
#include <cerrno>
#include <cstdlib>

#include "cartan/workspace.hpp"

namespace cartan::expr {
namespace {

bool isReserved(std::string_view name) {
  return name == "I" || name == "D" || name == "ln" || name == "exp";
}

bool validIdentifier(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name.front())) || name.front() == '_')) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, const Workspace& ws) : text_(text), ws_(ws) {}

  Expr run() {
    Expr e = expression();
    skipSpace();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expression() {
    Expr acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (d.isZero()) throw ParseError(at, "division by zero");
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    bool paren = accept('(');
    bool negative = accept('-');
    skipSpace();
    std::size_t at = pos_;
    long k = integer();
    if (paren) expect(')');
    int exponent = static_cast<int>(negative ? -k : k);
    if (exponent < 0 && base.isZero()) throw ParseError(at, "division by zero");
    return pow(base, exponent);
  }

  long integer() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::strtol(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr, 10);
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    bool decimal = false;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        decimal = true;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lexeme(text_.substr(start, pos_ - start));
    if (decimal) return Expr(Number::inexact(std::strtod(lexeme.c_str(), nullptr)));
    errno = 0;
    long long v = std::strtoll(lexeme.c_str(), nullptr, 10);
    if (errno == ERANGE) return Expr(Number::inexact(std::strtod(lexeme.c_str(), nullptr)));
    return Expr(static_cast<std::int64_t>(v));
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr primary() {
    skipSpace();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected '") + c + "'");

    std::size_t start = pos_;
    std::string name = identifier();
    if (name == "I") return Expr::imaginaryUnit();
    if (name == "ln" || name == "exp") {
      expect('(');
      std::size_t at = pos_;
      Expr arg = expression();
      expect(')');
      if (name == "ln") {
        if (arg.isZero()) throw ParseError(at, "logarithm of zero");
        return ln(arg);
      }
      return exp(arg);
    }
    if (name == "D") {
      expect('[');
      Expr target = expression();
      expect(',');
      skipSpace();
      std::size_t at = pos_;
      std::string coordName = identifier();
      if (coordName.empty()) fail("expected coordinate name");
      const SymbolRef* coord = ws_.find(coordName);
      if (coord == nullptr) throw UnknownSymbolError(coordName);
      if ((*coord)->kind != SymbolKind::Coordinate) {
        throw ParseError(at, "'" + coordName + "' is not a base coordinate");
      }
      expect(',');
      long k = integer();
      expect(']');
      for (long i = 0; i < k; ++i) target = totalDerivative(target, *coord);
      return target;
    }
    const SymbolRef* sym = ws_.find(name);
    if (sym == nullptr) {
      pos_ = start;
      throw UnknownSymbolError(name);
    }
    return Expr::symbol(*sym);
  }

  std::string_view text_;
  const Workspace& ws_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolRef Workspace::declare(Symbol s) {
  if (!validIdentifier(s.name) || isReserved(s.name)) {
    throw SymbolicError("invalid symbol name '" + s.name + "'");
  }
  if (auto it = table_.find(s.name); it != table_.end()) {
    if (it->second->kind != s.kind) {
      throw KindMismatchError("symbol '" + s.name + "' already declared as " +
                              std::string(toString(it->second->kind)));
    }
    return it->second;
  }
  auto ref = std::make_shared<const Symbol>(std::move(s));
  table_.emplace(ref->name, ref);
  return ref;
}

SymbolRef Workspace::declareCoordinate(const std::string& name) {
  bool fresh = find(name) == nullptr;
  auto ref = declare(Symbol{name, SymbolKind::Coordinate, {}});
  if (fresh) coordinates_.push_back(ref);
  return ref;
}

SymbolRef Workspace::declareJet(const std::string& name) {
  bool fresh = find(name) == nullptr;
  auto ref = declare(Symbol{name, SymbolKind::Jet, coordinateNames()});
  if (fresh) jets_.push_back(ref);
  return ref;
}

SymbolRef Workspace::declareFunction(const std::string& name, std::vector<std::string> arity) {
  if (arity.empty()) arity = coordinateNames();
  for (const auto& a : arity) {
    const SymbolRef* c = find(a);
    if (c == nullptr || (*c)->kind != SymbolKind::Coordinate) {
      throw SymbolicError("function '" + name + "' depends on undeclared coordinate '" + a + "'");
    }
  }
  return declare(Symbol{name, SymbolKind::Function, std::move(arity)});
}

SymbolRef Workspace::declareParameter(const std::string& name) {
  return declare(Symbol{name, SymbolKind::Parameter, {}});
}

const SymbolRef* Workspace::find(std::string_view name) const {
  auto it = table_.find(name);
  return it == table_.end() ? nullptr : &it->second;
}

const SymbolRef& Workspace::get(std::string_view name) const {
  const SymbolRef* s = find(name);
  if (s == nullptr) throw UnknownSymbolError(std::string(name));
  return *s;
}

std::vector<std::string> Workspace::coordinateNames() const {
  std::vector<std::string> names;
  for (const auto& c : coordinates_) names.push_back(c->name);
  return names;
}

Expr parse(std::string_view text, const Workspace& ws) { return Parser(text, ws).run(); }

}  // namespace cartan::expr
