#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/expr.hpp"

namespace cartan::expr {

class UnknownSymbolError : public SymbolicError {
 public:
  explicit UnknownSymbolError(std::string name)
      : SymbolicError("unknown symbol '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ParseError : public SymbolicError {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : SymbolicError("syntax error at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Symbol table. Names are unique and a symbol's kind never changes; a
/// workspace is owned by a single task.
class Workspace {
 public:
  SymbolRef declareCoordinate(const std::string& name);
  /// Jet variables depend (on sections) on every base coordinate declared
  /// so far.
  SymbolRef declareJet(const std::string& name);
  /// Empty `arity` means "all base coordinates declared so far".
  SymbolRef declareFunction(const std::string& name, std::vector<std::string> arity = {});
  SymbolRef declareParameter(const std::string& name);

  const SymbolRef* find(std::string_view name) const;
  const SymbolRef& get(std::string_view name) const;  // throws UnknownSymbolError
  Expr operator[](std::string_view name) const { return Expr::symbol(get(name)); }

  const std::vector<SymbolRef>& coordinates() const { return coordinates_; }
  const std::vector<SymbolRef>& jets() const { return jets_; }
  std::vector<std::string> coordinateNames() const;

 private:
  SymbolRef declare(Symbol s);
  std::map<std::string, SymbolRef, std::less<>> table_;
  std::vector<SymbolRef> coordinates_;
  std::vector<SymbolRef> jets_;
};

/// Parses the infix grammar
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' ['-'] integer)?
///   primary := number | 'I' | name | ('ln' | 'exp') '(' expr ')'
///            | 'D' '[' expr ',' coordinate ',' integer ']' | '(' expr ')'
///
/// `D[f,x,k]` is the k-th total derivative in x. Throws ParseError with the
/// byte offset of the failure or UnknownSymbolError.
Expr parse(std::string_view text, const Workspace& ws);

}  // namespace cartan::expr
