#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/equiv.hpp"
#include "cartan/workspace.hpp"
#include "json.hpp"

namespace cartan::forms {

using expr::Expr;
using expr::SymbolRef;

class FormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public FormError {
 public:
  using FormError::FormError;
};

/// exteriorDerivative was asked to differentiate a coefficient that depends
/// on a jet variable.
class JetDependenceError : public FormError {
 public:
  using FormError::FormError;
};

/// Ordered coordinate set of a form. Base coordinates come first; the set may
/// be extended by jet variables so that dv, dv_i are literal basis one-forms.
class Frame {
 public:
  Frame() = default;
  explicit Frame(std::vector<SymbolRef> coords);
  static Frame base(const expr::Workspace& ws);
  static Frame extended(const expr::Workspace& ws);

  std::size_t size() const { return coords_.size(); }
  const SymbolRef& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<SymbolRef>& coords() const { return coords_; }
  /// -1 when absent.
  int indexOf(std::string_view name) const;
  /// Number of leading base coordinates.
  std::size_t baseCount() const;
  /// True when `other` is a prefix of this frame.
  bool extends(const Frame& other) const;
  bool operator==(const Frame& other) const;

 private:
  std::vector<SymbolRef> coords_;
};

/// Strictly increasing coordinate indices.
using MultiIndex = std::vector<int>;

class KForm {
 public:
  KForm() = default;
  KForm(Frame frame, int degree);

  static KForm zero(const Frame& frame, int degree) { return KForm(frame, degree); }
  static KForm scalar(const Frame& frame, const Expr& f);
  /// d(coord) for a coordinate of the frame.
  static KForm differential(const Frame& frame, std::string_view coord);
  /// Sum_k coeffs[k] d(frame[k]); missing trailing entries are zero.
  static KForm oneForm(const Frame& frame, const std::vector<Expr>& coeffs);

  int degree() const { return degree_; }
  const Frame& frame() const { return frame_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }

  Expr coefficient(const MultiIndex& index) const;
  /// Coefficient of d(coord) in a one-form (the form evaluated on d/d coord).
  Expr component(std::string_view coord) const;
  /// Scalar value of a 0-form.
  Expr value() const { return coefficient({}); }

  /// Adds c * d(index) after sorting the index; repeated indices vanish.
  void add(MultiIndex index, const Expr& c);

  KForm promoted(const Frame& wider) const;
  template <typename F>
  KForm mapCoefficients(F&& fn) const {
    KForm out(frame_, degree_);
    for (const auto& [i, c] : terms_) out.add(i, fn(c));
    return out;
  }

  KForm operator+(const KForm& o) const;
  KForm operator-(const KForm& o) const;
  KForm operator-() const;
  friend KForm operator*(const Expr& f, const KForm& p);

 private:
  Frame frame_;
  int degree_ = 0;
  std::map<MultiIndex, Expr> terms_;
};

KForm wedge(const KForm& p, const KForm& q);
KForm exteriorDerivative(const KForm& p);
/// Coefficient-wise equiv.
bool equivForms(const KForm& p, const KForm& q, const expr::EquivOptions& options = {});
bool isZeroForm(const KForm& p, const expr::EquivOptions& options = {});

/// Block labels of a Weyl connection [[eps, 0], [theta, omega]].
struct WeylLayout {};

class MatrixForm {
 public:
  MatrixForm() = default;
  MatrixForm(std::size_t rows, std::size_t cols, int degree, const Frame& frame);
  static MatrixForm fromScalars(const std::vector<std::vector<Expr>>& entries, const Frame& frame);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int degree() const { return degree_; }
  const Frame& frame() const { return frame_; }

  const KForm& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  /// Replaces an entry; the degree must match the matrix degree.
  void set(std::size_t r, std::size_t c, KForm value);

  bool isWeyl() const { return weyl_.has_value(); }
  void markWeyl() { weyl_ = WeylLayout{}; }

  MatrixForm block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  MatrixForm promoted(const Frame& wider) const;

  MatrixForm operator+(const MatrixForm& o) const;
  MatrixForm operator-(const MatrixForm& o) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int degree_ = 0;
  Frame frame_;
  std::vector<KForm> entries_;
  std::optional<WeylLayout> weyl_;
};

/// Matrix product with wedge as the scalar multiplication.
MatrixForm matrixWedge(const MatrixForm& p, const MatrixForm& q);
MatrixForm exteriorDerivative(const MatrixForm& p);
bool equivMatrixForms(const MatrixForm& p, const MatrixForm& q, const expr::EquivOptions& options = {});
bool isZeroMatrixForm(const MatrixForm& p, const expr::EquivOptions& options = {});

enum class GroupFlavor { General, H0Candidate, Prolongation };

/// Lower-triangular element with constant diagonal `a` and first column `b`:
///
///   [ a   0  ...  0 ]
///   [ b1  a       0 ]
///   [ ...    ...    ]
///   [ bn  0  ...  a ]
class GroupElement {
 public:
  /// Throws FormError when `a` is the zero expression.
  GroupElement(Expr a, std::vector<Expr> b, GroupFlavor flavor = GroupFlavor::General);
  static GroupElement identity(std::size_t n);
  /// b_i = d_i a for the spatial coordinates x^i (frame entries 1..n).
  static GroupElement prolongation(const Expr& a, const expr::Workspace& ws);

  std::size_t n() const { return b_.size(); }
  std::size_t dimension() const { return b_.size() + 1; }
  const Expr& a() const { return a_; }
  const std::vector<Expr>& b() const { return b_; }
  GroupFlavor flavor() const { return flavor_; }

  MatrixForm matrix(const Frame& frame) const;
  MatrixForm inverse(const Frame& frame) const;
  /// Embedding g -> diag(a, g) into the Weyl group.
  MatrixForm weylMatrix(const Frame& frame) const;
  MatrixForm weylInverse(const Frame& frame) const;

 private:
  Expr a_;
  std::vector<Expr> b_;
  GroupFlavor flavor_;
};

/// h^{-1} dh, computed by matrix algebra on the realization of h.
MatrixForm maurerCartan(const GroupElement& h, const Frame& frame);
/// Maurer-Cartan form of the Weyl embedding diag(e, h).
MatrixForm weylMaurerCartan(const GroupElement& h, const Frame& frame);

/// h^{-1} W h. W must be (n+1)x(n+1) (plain connection) or (n+2)x(n+2)
/// (Weyl connection, conjugated by the embedding diag(e, h)).
MatrixForm adConjugate(const GroupElement& h, const MatrixForm& w);

/// Ordering of the scale block inside the Weyl torsion. `ScaleActsLeft`
/// evaluates the torsion as d(theta) + eps^theta + omega^theta, which is the
/// convention under which torsion-freeness gives eps = -alpha.
/// `MatrixProduct` is the literal (2,1) block of dW + W^W, i.e.
/// d(theta) + theta^eps + omega^theta.
enum class TorsionConvention { ScaleActsLeft, MatrixProduct };

struct Curvature {
  MatrixForm omega;                   ///< dW + W^W
  std::optional<MatrixForm> torsion;  ///< column block, Weyl layouts only
};

Curvature curvature(const MatrixForm& w, TorsionConvention convention = TorsionConvention::ScaleActsLeft);
MatrixForm torsionBlock(const MatrixForm& w, TorsionConvention convention = TorsionConvention::ScaleActsLeft);

/// Sum_i eta[i] D_i u_i + Sum_{i,j} W^i_j(d/d x^i) u_j, where x^i is the
/// i-th coordinate of the frame (t, x^1, ..., x^n). Derivatives of u are
/// total derivatives along a section.
Expr covariantDivergence(const MatrixForm& w, const std::vector<Expr>& u, const std::vector<Expr>& eta);

nlohmann::ordered_json toJson(const KForm& p);
/// {rows, cols, degree, entries: [[ [[coords...], "prefix"], ... ]]}.
nlohmann::ordered_json toJson(const MatrixForm& m);

}  // namespace cartan::forms
