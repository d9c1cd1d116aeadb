#include "cartan/forms.hpp"

#include <algorithm>

namespace cartan::forms {
namespace {

using expr::SymbolKind;

/// Sorts `index` in place and returns the permutation sign, or 0 when an
/// index repeats.
int sortWithSign(MultiIndex& index) {
  int sign = 1;
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j + 1 < index.size() - i; ++j) {
      if (index[j] > index[j + 1]) {
        std::swap(index[j], index[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < index.size(); ++i) {
    if (index[i] == index[i + 1]) return 0;
  }
  return sign;
}

/// Brings two forms onto a common frame (the wider one).
std::pair<KForm, KForm> align(const KForm& p, const KForm& q) {
  if (p.frame() == q.frame()) return {p, q};
  if (p.frame().extends(q.frame())) return {p, q.promoted(p.frame())};
  if (q.frame().extends(p.frame())) return {p.promoted(q.frame()), q};
  throw DimensionError("forms live on incompatible coordinate frames");
}

const Frame& widerFrame(const Frame& a, const Frame& b) {
  if (a == b || a.extends(b)) return a;
  if (b.extends(a)) return b;
  throw DimensionError("matrix forms live on incompatible coordinate frames");
}

}  // namespace

// --- Frame -----------------------------------------------------------------

Frame::Frame(std::vector<SymbolRef> coords) : coords_(std::move(coords)) {}

Frame Frame::base(const expr::Workspace& ws) { return Frame(ws.coordinates()); }

Frame Frame::extended(const expr::Workspace& ws) {
  auto c = ws.coordinates();
  c.insert(c.end(), ws.jets().begin(), ws.jets().end());
  return Frame(std::move(c));
}

int Frame::indexOf(std::string_view name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i]->name == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Frame::baseCount() const {
  std::size_t n = 0;
  while (n < coords_.size() && coords_[n]->kind == SymbolKind::Coordinate) ++n;
  return n;
}

bool Frame::extends(const Frame& other) const {
  if (other.size() > size()) return false;
  for (std::size_t i = 0; i < other.size(); ++i) {
    if (coords_[i]->name != other.coords_[i]->name) return false;
  }
  return true;
}

bool Frame::operator==(const Frame& other) const { return size() == other.size() && extends(other); }

// --- KForm -----------------------------------------------------------------

KForm::KForm(Frame frame, int degree) : frame_(std::move(frame)), degree_(degree) {
  if (degree < 0) throw FormError("negative form degree");
}

KForm KForm::scalar(const Frame& frame, const Expr& f) {
  KForm p(frame, 0);
  p.add({}, f);
  return p;
}

KForm KForm::differential(const Frame& frame, std::string_view coord) {
  int i = frame.indexOf(coord);
  if (i < 0) throw DimensionError("coordinate '" + std::string(coord) + "' is not in the frame");
  KForm p(frame, 1);
  p.add({i}, Expr(1));
  return p;
}

KForm KForm::oneForm(const Frame& frame, const std::vector<Expr>& coeffs) {
  if (coeffs.size() > frame.size()) throw DimensionError("too many one-form components");
  KForm p(frame, 1);
  for (std::size_t k = 0; k < coeffs.size(); ++k) p.add({static_cast<int>(k)}, coeffs[k]);
  return p;
}

Expr KForm::coefficient(const MultiIndex& index) const {
  auto it = terms_.find(index);
  return it == terms_.end() ? Expr(0) : it->second;
}

Expr KForm::component(std::string_view coord) const {
  if (degree_ != 1) throw FormError("component() needs a one-form");
  int i = frame_.indexOf(coord);
  if (i < 0) return Expr(0);
  return coefficient({i});
}

void KForm::add(MultiIndex index, const Expr& c) {
  if (static_cast<int>(index.size()) != degree_) throw FormError("multi-index length differs from degree");
  if (c.isZero()) return;
  int sign = sortWithSign(index);
  if (sign == 0) return;
  Expr value = sign > 0 ? c : -c;
  auto it = terms_.find(index);
  if (it == terms_.end()) {
    terms_.emplace(std::move(index), value);
    return;
  }
  it->second = it->second + value;
  if (it->second.isZero()) terms_.erase(it);
}

KForm KForm::promoted(const Frame& wider) const {
  if (wider == frame_) return *this;
  if (!wider.extends(frame_)) throw DimensionError("cannot promote form to a frame that does not extend it");
  KForm out(wider, degree_);
  out.terms_ = terms_;  // indices of a prefix frame are unchanged
  return out;
}

KForm KForm::operator+(const KForm& o) const {
  if (degree_ != o.degree_) throw FormError("adding forms of different degree");
  auto [p, q] = align(*this, o);
  for (const auto& [i, c] : q.terms_) p.add(i, c);
  return p;
}

KForm KForm::operator-(const KForm& o) const { return *this + (-o); }

KForm KForm::operator-() const {
  return mapCoefficients([](const Expr& c) { return -c; });
}

KForm operator*(const Expr& f, const KForm& p) {
  return p.mapCoefficients([&](const Expr& c) { return f * c; });
}

KForm wedge(const KForm& p0, const KForm& q0) {
  auto [p, q] = align(p0, q0);
  KForm out(p.frame(), p.degree() + q.degree());
  for (const auto& [i, c] : p.terms()) {
    for (const auto& [j, d] : q.terms()) {
      MultiIndex ij = i;
      ij.insert(ij.end(), j.begin(), j.end());
      out.add(std::move(ij), c * d);
    }
  }
  return out;
}

KForm exteriorDerivative(const KForm& p) {
  KForm out(p.frame(), p.degree() + 1);
  const Frame& frame = p.frame();
  for (const auto& [index, c] : p.terms()) {
    if (expr::containsKind(c, SymbolKind::Jet)) {
      throw JetDependenceError("coefficient depends on a jet variable: " + expr::render(c));
    }
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (frame[k]->kind != SymbolKind::Coordinate) continue;
      Expr dc = expr::differentiate(c, frame[k]);
      if (dc.isZero()) continue;
      MultiIndex ki{static_cast<int>(k)};
      ki.insert(ki.end(), index.begin(), index.end());
      out.add(std::move(ki), dc);
    }
  }
  return out;
}

bool equivForms(const KForm& p, const KForm& q, const expr::EquivOptions& options) {
  if (p.degree() != q.degree()) return false;
  KForm diff = p - q;
  for (const auto& [i, c] : diff.terms()) {
    if (!expr::isIdenticallyZero(c, options)) return false;
  }
  return true;
}

bool isZeroForm(const KForm& p, const expr::EquivOptions& options) {
  return equivForms(p, KForm(p.frame(), p.degree()), options);
}

// --- MatrixForm ------------------------------------------------------------

MatrixForm::MatrixForm(std::size_t rows, std::size_t cols, int degree, const Frame& frame)
    : rows_(rows), cols_(cols), degree_(degree), frame_(frame), entries_(rows * cols, KForm(frame, degree)) {}

MatrixForm MatrixForm::fromScalars(const std::vector<std::vector<Expr>>& entries, const Frame& frame) {
  std::size_t rows = entries.size();
  std::size_t cols = rows == 0 ? 0 : entries.front().size();
  MatrixForm m(rows, cols, 0, frame);
  for (std::size_t r = 0; r < rows; ++r) {
    if (entries[r].size() != cols) throw DimensionError("ragged scalar matrix");
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, KForm::scalar(frame, entries[r][c]));
  }
  return m;
}

void MatrixForm::set(std::size_t r, std::size_t c, KForm value) {
  if (r >= rows_ || c >= cols_) throw DimensionError("matrix form index out of range");
  if (value.degree() != degree_) throw FormError("entry degree differs from matrix degree");
  entries_[r * cols_ + c] = value.promoted(frame_);
}

MatrixForm MatrixForm::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block out of range");
  MatrixForm out(nr, nc, degree_, frame_);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) out.set(r, c, (*this)(r0 + r, c0 + c));
  }
  return out;
}

MatrixForm MatrixForm::promoted(const Frame& wider) const {
  if (wider == frame_) return *this;
  MatrixForm out(rows_, cols_, degree_, wider);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out.set(r, c, (*this)(r, c).promoted(wider));
  }
  out.weyl_ = weyl_;
  return out;
}

MatrixForm MatrixForm::operator+(const MatrixForm& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("adding matrix forms of different shape");
  if (degree_ != o.degree_) throw FormError("adding matrix forms of different degree");
  const Frame& frame = widerFrame(frame_, o.frame_);
  MatrixForm out(rows_, cols_, degree_, frame);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out.set(r, c, (*this)(r, c) + o(r, c));
  }
  out.weyl_ = weyl_;
  return out;
}

MatrixForm MatrixForm::operator-(const MatrixForm& o) const {
  MatrixForm neg = o;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) neg.set(r, c, -o(r, c));
  }
  return *this + neg;
}

MatrixForm matrixWedge(const MatrixForm& p, const MatrixForm& q) {
  if (p.cols() != q.rows()) {
    throw DimensionError("matrixWedge: " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + " by " +
                         std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
  }
  const Frame& frame = widerFrame(p.frame(), q.frame());
  MatrixForm out(p.rows(), q.cols(), p.degree() + q.degree(), frame);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
      KForm acc(frame, p.degree() + q.degree());
      for (std::size_t k = 0; k < p.cols(); ++k) acc = acc + wedge(p(i, k), q(k, j));
      out.set(i, j, acc);
    }
  }
  return out;
}

MatrixForm exteriorDerivative(const MatrixForm& p) {
  MatrixForm out(p.rows(), p.cols(), p.degree() + 1, p.frame());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) out.set(r, c, exteriorDerivative(p(r, c)));
  }
  if (p.isWeyl()) out.markWeyl();
  return out;
}

bool equivMatrixForms(const MatrixForm& p, const MatrixForm& q, const expr::EquivOptions& options) {
  if (p.rows() != q.rows() || p.cols() != q.cols() || p.degree() != q.degree()) return false;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) {
      if (!equivForms(p(r, c), q(r, c), options)) return false;
    }
  }
  return true;
}

bool isZeroMatrixForm(const MatrixForm& p, const expr::EquivOptions& options) {
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) {
      if (!isZeroForm(p(r, c), options)) return false;
    }
  }
  return true;
}

// --- GroupElement ----------------------------------------------------------

GroupElement::GroupElement(Expr a, std::vector<Expr> b, GroupFlavor flavor)
    : a_(std::move(a)), b_(std::move(b)), flavor_(flavor) {
  if (a_.isZero()) throw FormError("group element has zero diagonal scale");
}

GroupElement GroupElement::identity(std::size_t n) { return GroupElement(Expr(1), std::vector<Expr>(n, Expr(0))); }

GroupElement GroupElement::prolongation(const Expr& a, const expr::Workspace& ws) {
  std::vector<Expr> b;
  const auto& coords = ws.coordinates();
  for (std::size_t i = 1; i < coords.size(); ++i) b.push_back(expr::differentiate(a, coords[i]));
  return GroupElement(a, std::move(b), GroupFlavor::Prolongation);
}

MatrixForm GroupElement::matrix(const Frame& frame) const {
  std::size_t d = dimension();
  std::vector<std::vector<Expr>> m(d, std::vector<Expr>(d, Expr(0)));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = a_;
  for (std::size_t i = 1; i < d; ++i) m[i][0] = b_[i - 1];
  return MatrixForm::fromScalars(m, frame);
}

MatrixForm GroupElement::inverse(const Frame& frame) const {
  std::size_t d = dimension();
  Expr inv = expr::pow(a_, -1);
  std::vector<std::vector<Expr>> m(d, std::vector<Expr>(d, Expr(0)));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = inv;
  for (std::size_t i = 1; i < d; ++i) m[i][0] = -b_[i - 1] * expr::pow(a_, -2);
  return MatrixForm::fromScalars(m, frame);
}

namespace {

MatrixForm embed(const Expr& corner, const MatrixForm& inner) {
  std::size_t d = inner.rows() + 1;
  MatrixForm out(d, d, 0, inner.frame());
  out.set(0, 0, KForm::scalar(inner.frame(), corner));
  for (std::size_t r = 0; r < inner.rows(); ++r) {
    for (std::size_t c = 0; c < inner.cols(); ++c) out.set(r + 1, c + 1, inner(r, c));
  }
  return out;
}

}  // namespace

MatrixForm GroupElement::weylMatrix(const Frame& frame) const { return embed(a_, matrix(frame)); }

MatrixForm GroupElement::weylInverse(const Frame& frame) const { return embed(expr::pow(a_, -1), inverse(frame)); }

MatrixForm maurerCartan(const GroupElement& h, const Frame& frame) {
  return matrixWedge(h.inverse(frame), exteriorDerivative(h.matrix(frame)));
}

MatrixForm weylMaurerCartan(const GroupElement& h, const Frame& frame) {
  MatrixForm mc = matrixWedge(h.weylInverse(frame), exteriorDerivative(h.weylMatrix(frame)));
  mc.markWeyl();
  return mc;
}

MatrixForm adConjugate(const GroupElement& h, const MatrixForm& w) {
  if (w.rows() != w.cols()) throw DimensionError("adConjugate needs a square matrix form");
  MatrixForm hm;
  MatrixForm hinv;
  if (w.rows() == h.dimension()) {
    hm = h.matrix(w.frame());
    hinv = h.inverse(w.frame());
  } else if (w.rows() == h.dimension() + 1) {
    hm = h.weylMatrix(w.frame());
    hinv = h.weylInverse(w.frame());
  } else {
    throw DimensionError("adConjugate: matrix size " + std::to_string(w.rows()) +
                         " does not match group dimension " + std::to_string(h.dimension()));
  }
  MatrixForm out = matrixWedge(matrixWedge(hinv, w), hm);
  if (w.isWeyl()) out.markWeyl();
  return out;
}

MatrixForm torsionBlock(const MatrixForm& w, TorsionConvention convention) {
  if (w.rows() != w.cols() || w.rows() < 2 || w.degree() != 1) {
    throw DimensionError("torsion needs a square one-form matrix of size >= 2");
  }
  std::size_t n = w.rows() - 1;
  const KForm& eps = w(0, 0);
  MatrixForm theta = w.block(1, 0, n, 1);
  MatrixForm omega = w.block(1, 1, n, n);
  MatrixForm out = exteriorDerivative(theta) + matrixWedge(omega, theta);
  MatrixForm scale(n, 1, 2, w.frame());
  for (std::size_t r = 0; r < n; ++r) {
    scale.set(r, 0, convention == TorsionConvention::ScaleActsLeft ? wedge(eps, theta(r, 0)) : wedge(theta(r, 0), eps));
  }
  return out + scale;
}

Curvature curvature(const MatrixForm& w, TorsionConvention convention) {
  if (w.rows() != w.cols()) throw DimensionError("curvature needs a square matrix form");
  if (w.degree() != 1) throw FormError("curvature needs a one-form matrix");
  Curvature c{exteriorDerivative(w) + matrixWedge(w, w), std::nullopt};
  if (w.isWeyl()) {
    c.omega.markWeyl();
    c.torsion = torsionBlock(w, convention);
  }
  return c;
}

Expr covariantDivergence(const MatrixForm& w, const std::vector<Expr>& u, const std::vector<Expr>& eta) {
  if (w.rows() != w.cols()) throw DimensionError("covariantDivergence needs a square matrix form");
  if (w.degree() != 1) throw FormError("covariantDivergence needs a one-form matrix");
  if (u.size() != w.rows() || eta.size() != w.rows()) {
    throw DimensionError("covariantDivergence: vector length does not match connection size");
  }
  if (w.frame().baseCount() < w.rows()) throw DimensionError("covariantDivergence: not enough base coordinates");
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const SymbolRef& coord = w.frame()[i];
    terms.push_back(eta[i] * expr::totalDerivative(u[i], coord));
    for (std::size_t j = 0; j < w.cols(); ++j) terms.push_back(w(i, j).component(coord->name) * u[j]);
  }
  return expr::sum(terms);
}

nlohmann::ordered_json toJson(const KForm& p) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [index, c] : p.terms()) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (int i : index) names.push_back(p.frame()[static_cast<std::size_t>(i)]->name);
    terms.push_back(nlohmann::ordered_json::array({names, expr::toPrefix(c)}));
  }
  return terms;
}

nlohmann::ordered_json toJson(const MatrixForm& m) {
  nlohmann::ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["degree"] = m.degree();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(toJson(m(r, c)));
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

}  // namespace cartan::forms
