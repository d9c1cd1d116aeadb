#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cartan::numerics {

using Complex = std::complex<double>;

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

/// Uniform lattice of N interior points; the end points xMin, xMax carry
/// boundary data.
struct Grid1D {
  double xMin = 0;
  double xMax = 1;
  int N = 8;

  static Grid1D make(double xMin, double xMax, int N);
  double dx() const { return (xMax - xMin) / (N + 1); }
  double x(int i) const { return xMin + (i + 1) * dx(); }
  Eigen::VectorXd points() const;
};

template <typename Scalar>
struct Field {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Grid1D grid;
  Vector values;
  std::pair<Scalar, Scalar> boundary{Scalar(0), Scalar(0)};

  /// Value at lattice index i in [-1, N]; -1 and N are the boundary nodes.
  Scalar at(int i) const {
    if (i < 0) return boundary.first;
    if (i >= grid.N) return boundary.second;
    return values[i];
  }
  bool finite() const { return values.allFinite(); }
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;

/// Samples f on the interior and the two boundary nodes.
template <typename Scalar, typename F>
Field<Scalar> sample(const Grid1D& grid, F&& f) {
  Field<Scalar> out{grid, typename Field<Scalar>::Vector(grid.N), {f(grid.xMin), f(grid.xMax)}};
  for (int i = 0; i < grid.N; ++i) out.values[i] = f(grid.x(i));
  return out;
}

/// Discrete L2 norm sqrt(dx sum |u_i|^2).
template <typename Scalar>
double l2Norm(const Field<Scalar>& u) {
  return std::sqrt(u.grid.dx()) * u.values.norm();
}

/// Solves the tridiagonal system with sub-diagonal `lower` (lower[0]
/// unused), diagonal `diag` and super-diagonal `upper` (upper[N-1] unused).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> thomasSolve(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
                                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
                                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = diag.size();
  Vector c(n);
  Vector d(n);
  auto check = [](const Scalar& pivot) {
    if (!(std::abs(pivot) > 1e-300)) throw SingularMatrixError("tridiagonal system is singular");
  };
  check(diag[0]);
  c[0] = n > 1 ? upper[0] / diag[0] : Scalar(0);
  d[0] = rhs[0] / diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    Scalar m = diag[i] - lower[i] * c[i - 1];
    check(m);
    c[i] = i + 1 < n ? upper[i] / m : Scalar(0);
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
  }
  Vector x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

using Potential = std::function<double(double x, double t)>;

/// Spatial discretization of d^2/dx^2. `Compact` is the fourth-order
/// Numerov/Pade form (1 + h^2/12 D2)^{-1} D2; both stay tridiagonal.
enum class Stencil { Central, Compact };

struct VacuumResult {
  RealField n;
  std::vector<std::string> warnings;
};

/// n'' = V n with Dirichlet data. Throws NumericsError for non-positive
/// boundary values.
VacuumResult solveVacuumBVP(const std::function<double(double)>& V, const Grid1D& grid,
                            std::pair<double, double> boundary, Stencil stencil = Stencil::Central);

struct EvolutionConfig {
  double dt = 1e-3;
  int steps = 0;
  Potential V = [](double, double) { return 0.0; };
  /// Re-evaluate V at every half step.
  bool timeDependent = false;
  /// Keep every k-th frame (0: only the first and the last).
  int recordEvery = 0;
  /// evolveDirect only; the split scheme is always centered.
  Stencil stencil = Stencil::Central;
};

struct TimeSeries {
  double dt = 0;
  /// step index of each frame
  std::vector<int> steps;
  std::vector<ComplexField> frames;
  const ComplexField& last() const { return frames.back(); }
};

/// Crank-Nicolson for i u_t = -u_xx + V u with the boundary values of u0
/// held fixed.
TimeSeries evolveDirect(const ComplexField& u0, const EvolutionConfig& cfg);

/// Crank-Nicolson for i w_t + w_xx + (2/n) n' w_x = 0 with centered stencils
/// for w_x and n'. Throws NumericsError when min |n| < 1e-10.
TimeSeries evolveSplit(const ComplexField& w0, const RealField& n, const EvolutionConfig& cfg);

/// Max-norm of the cell circulation of lambda = i n u dx - (n u_x - u n') dt
/// divided by the cell area, over cells whose nodes all have interior
/// neighbours (and lie in `window` when given).
double continuityResidual(const TimeSeries& u, const RealField& n,
                          std::optional<std::pair<double, double>> window = std::nullopt);

struct MadelungFields {
  RealField rho;
  RealField S;
  RealField Q;
};

/// Throws NumericsError when |u| < 1e-10 somewhere or when the phase jumps
/// by more than pi/2 between neighbours.
MadelungFields madelungSplit(const ComplexField& u);

struct MadelungResiduals {
  double continuity = 0;
  double hamiltonJacobi = 0;
};

/// Residuals of rho_t + (2 rho S_x)_x = 0 and S_t + S_x^2 + V + Q = 0,
/// centered in time between consecutive frames, max over nodes in `window`.
MadelungResiduals madelungResiduals(const TimeSeries& u, const Potential& V,
                                    std::optional<std::pair<double, double>> window = std::nullopt);

struct ConvergenceTable {
  std::vector<int> N;
  std::vector<double> h;
  std::vector<double> error;
  double order = 0;
  std::vector<std::string> warnings;
};

/// Least-squares slope of log(error) against log(h).
double convergenceOrder(const std::vector<double>& h, const std::vector<double>& error,
                        std::vector<std::string>* warnings = nullptr);

/// Runs `error(N)` for each resolution; h is taken as 1/(N+1).
ConvergenceTable measureConvergence(const std::function<double(int)>& error, const std::vector<int>& resolutions);

/// Dispersing free Gaussian solving i u_t = -u_xx with
/// u(x,0) = exp(-x^2/(4 sigma^2) + i k x).
Complex freeGaussian(double x, double t, double sigma, double k);

}  // namespace cartan::numerics
