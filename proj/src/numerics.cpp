#include "cartan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cartan::numerics {

namespace {

using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr double kFloor = 1e-10;

struct Tridiagonal {
  VectorXcd lower, diag, upper;
};

/// Steps M u_t = i L u with Crank-Nicolson; `rebuild(t)` refreshes L when it
/// depends on time. M is identity or the constant compact mass stencil.
TimeSeries crankNicolson(const ComplexField& u0, Tridiagonal L, const EvolutionConfig& cfg,
                         const std::function<void(Tridiagonal&, double)>& rebuild, bool compactMass = false) {
  if (!(cfg.dt > 0) || cfg.steps < 0) throw NumericsError("evolution needs dt > 0 and steps >= 0");
  const int N = u0.grid.N;
  const Complex h(0, 0.5 * cfg.dt);
  TimeSeries series;
  series.dt = cfg.dt;
  series.steps.push_back(0);
  series.frames.push_back(u0);
  ComplexField u = u0;
  const auto [bl, br] = u0.boundary;
  const double mOff = compactMass ? 1.0 / 12 : 0.0;
  const double mDiag = compactMass ? 10.0 / 12 : 1.0;
  VectorXcd lhsLower(N), lhsDiag(N), lhsUpper(N), rhs(N);
  for (int s = 0; s < cfg.steps; ++s) {
    if (rebuild && (cfg.timeDependent || s == 0)) rebuild(L, (s + 0.5) * cfg.dt);
    for (int i = 0; i < N; ++i) {
      Complex lu = L.diag[i] * u.values[i];
      lu += L.lower[i] * u.at(i - 1);
      lu += L.upper[i] * u.at(i + 1);
      Complex mu = mDiag * u.values[i];
      if (i > 0) mu += mOff * u.values[i - 1];
      if (i + 1 < N) mu += mOff * u.values[i + 1];
      rhs[i] = mu + h * lu;
    }
    // Fixed boundary values enter the implicit half as well.
    rhs[0] += h * L.lower[0] * bl;
    rhs[N - 1] += h * L.upper[N - 1] * br;
    lhsLower = VectorXcd::Constant(N, mOff) - h * L.lower;
    lhsUpper = VectorXcd::Constant(N, mOff) - h * L.upper;
    lhsDiag = VectorXcd::Constant(N, mDiag) - h * L.diag;
    u.values = thomasSolve<Complex>(lhsLower, lhsDiag, lhsUpper, rhs);
    if (!u.finite()) throw NumericsError("evolution produced non-finite values");
    bool keep = s + 1 == cfg.steps || (cfg.recordEvery > 0 && (s + 1) % cfg.recordEvery == 0);
    if (keep) {
      series.steps.push_back(s + 1);
      series.frames.push_back(u);
    }
  }
  return series;
}

bool inWindow(double x, const std::optional<std::pair<double, double>>& window) {
  return !window || (x >= window->first - 1e-12 && x <= window->second + 1e-12);
}

double frameGap(const TimeSeries& u, std::size_t k) { return u.dt * (u.steps[k + 1] - u.steps[k]); }

}  // namespace

Grid1D Grid1D::make(double xMin, double xMax, int N) {
  if (N < 8) throw NumericsError("grid needs at least 8 interior points");
  if (!(xMax > xMin)) throw NumericsError("grid needs xMax > xMin");
  return Grid1D{xMin, xMax, N};
}

Eigen::VectorXd Grid1D::points() const {
  VectorXd p(N);
  for (int i = 0; i < N; ++i) p[i] = x(i);
  return p;
}

VacuumResult solveVacuumBVP(const std::function<double(double)>& V, const Grid1D& grid,
                            std::pair<double, double> boundary, Stencil stencil) {
  if (!(boundary.first > 0 && boundary.second > 0)) throw NumericsError("vacuum boundary values must be positive");
  const int N = grid.N;
  const double h2 = grid.dx() * grid.dx();
  const double w = stencil == Stencil::Compact ? h2 / 12 : 0.0;
  // Potential on all nodes, boundary nodes at -1 and N.
  VectorXd v(N + 2);
  VacuumResult out;
  bool signChange = false;
  for (int i = -1; i <= N; ++i) {
    double x = i < 0 ? grid.xMin : (i >= N ? grid.xMax : grid.x(i));
    double value = V(x);
    if (!std::isfinite(value)) throw NumericsError("potential is not finite on the grid");
    if (value < 0) signChange = true;
    v[i + 1] = value;
  }
  VectorXd lower(N), upper(N), diag(N), rhs = VectorXd::Zero(N);
  for (int i = 0; i < N; ++i) {
    lower[i] = 1.0 - w * v[i];
    upper[i] = 1.0 - w * v[i + 2];
    diag[i] = -2.0 - (h2 - 2 * w) * v[i + 1];
  }
  if (signChange) out.warnings.push_back("V changes sign; positivity of n is not guaranteed");
  rhs[0] -= lower[0] * boundary.first;
  rhs[N - 1] -= upper[N - 1] * boundary.second;
  out.n = RealField{grid, thomasSolve<double>(lower, diag, upper, rhs), boundary};
  if (!out.n.finite()) throw SingularMatrixError("vacuum solve produced non-finite values");
  if (out.n.values.minCoeff() <= 0) out.warnings.push_back("n is not strictly positive");
  return out;
}

TimeSeries evolveDirect(const ComplexField& u0, const EvolutionConfig& cfg) {
  const int N = u0.grid.N;
  const Grid1D& g = u0.grid;
  const double inv = 1.0 / (g.dx() * g.dx());
  const bool compact = cfg.stencil == Stencil::Compact;
  Tridiagonal L{VectorXcd(N), VectorXcd(N), VectorXcd(N)};
  // Compact form: L = D2 - M V with M = tridiag(1, 10, 1)/12.
  auto rebuild = [&](Tridiagonal& op, double t) {
    auto pot = [&](int i) { return cfg.V(i < 0 ? g.xMin : (i >= N ? g.xMax : g.x(i)), t); };
    for (int i = 0; i < N; ++i) {
      op.diag[i] = -2.0 * inv - (compact ? 10.0 / 12 : 1.0) * pot(i);
      op.lower[i] = inv - (compact ? pot(i - 1) / 12 : 0.0);
      op.upper[i] = inv - (compact ? pot(i + 1) / 12 : 0.0);
    }
  };
  return crankNicolson(u0, L, cfg, rebuild, compact);
}

TimeSeries evolveSplit(const ComplexField& w0, const RealField& n, const EvolutionConfig& cfg) {
  const int N = w0.grid.N;
  if (n.grid.N != N) throw NumericsError("vacuum and wave live on different grids");
  double nMin = std::min({n.values.cwiseAbs().minCoeff(), std::abs(n.boundary.first), std::abs(n.boundary.second)});
  if (nMin < kFloor) throw NumericsError("vacuum vanishes on the grid");
  if (cfg.stencil != Stencil::Central) throw NumericsError("the split scheme uses centered stencils only");
  const double dx = w0.grid.dx();
  const double inv = 1.0 / (dx * dx);
  Tridiagonal L{VectorXcd(N), VectorXcd::Constant(N, -2.0 * inv), VectorXcd(N)};
  for (int i = 0; i < N; ++i) {
    double c = 2.0 * (n.at(i + 1) - n.at(i - 1)) / (2.0 * dx) / n.values[i];
    L.lower[i] = inv - c / (2.0 * dx);
    L.upper[i] = inv + c / (2.0 * dx);
  }
  return crankNicolson(w0, L, cfg, nullptr);
}

double continuityResidual(const TimeSeries& u, const RealField& n, std::optional<std::pair<double, double>> window) {
  if (u.frames.size() < 2) throw NumericsError("continuity needs at least two frames");
  const Grid1D& g = n.grid;
  const int N = g.N;
  const double dx = g.dx();
  for (const auto& f : u.frames) {
    if (f.grid.N != N) throw NumericsError("shape mismatch between u and n");
  }
  auto P = [&](const ComplexField& f, int j) { return Complex(0, 1) * n.at(j) * f.at(j); };
  auto Q = [&](const ComplexField& f, int j) {
    Complex ux = (f.at(j + 1) - f.at(j - 1)) / (2 * dx);
    double nx = (n.at(j + 1) - n.at(j - 1)) / (2 * dx);
    return -(n.at(j) * ux - f.at(j) * nx);
  };
  double worst = 0;
  for (std::size_t k = 0; k + 1 < u.frames.size(); ++k) {
    const auto& a = u.frames[k];
    const auto& b = u.frames[k + 1];
    const double dt = frameGap(u, k);
    for (int j = 0; j + 1 < N; ++j) {
      if (!inWindow(g.x(j), window) || !inWindow(g.x(j + 1), window)) continue;
      Complex dP = (P(b, j) + P(b, j + 1) - P(a, j) - P(a, j + 1)) / (2 * dt);
      Complex dQ = (Q(a, j + 1) + Q(b, j + 1) - Q(a, j) - Q(b, j)) / (2 * dx);
      worst = std::max(worst, std::abs(dP - dQ));
    }
  }
  return worst;
}

MadelungFields madelungSplit(const ComplexField& u) {
  const Grid1D& g = u.grid;
  const int N = g.N;
  if (u.values.cwiseAbs().minCoeff() < kFloor) throw NumericsError("amplitude vanishes on the grid");
  MadelungFields m;
  m.rho = RealField{g, u.values.cwiseAbs2(), {std::norm(u.boundary.first), std::norm(u.boundary.second)}};
  VectorXd S(N);
  S[0] = std::arg(u.values[0]);
  for (int i = 1; i < N; ++i) {
    double step = std::arg(u.values[i] / u.values[i - 1]);
    if (std::abs(step) > std::numbers::pi / 2) throw NumericsError("phase is undersampled at x = " + std::to_string(g.x(i)));
    S[i] = S[i - 1] + step;
  }
  auto edge = [](Complex b, double fallback) { return std::abs(b) < kFloor ? fallback : std::arg(b); };
  m.S = RealField{g, S, {edge(u.boundary.first, S[0]), edge(u.boundary.second, S[N - 1])}};
  VectorXd Q(N);
  const double h2 = g.dx() * g.dx();
  for (int i = 0; i < N; ++i) {
    double r = std::abs(u.at(i));
    Q[i] = -(std::abs(u.at(i + 1)) - 2 * r + std::abs(u.at(i - 1))) / (h2 * r);
  }
  m.Q = RealField{g, Q, {0.0, 0.0}};
  return m;
}

MadelungResiduals madelungResiduals(const TimeSeries& u, const Potential& V,
                                    std::optional<std::pair<double, double>> window) {
  if (u.frames.size() < 2) throw NumericsError("Madelung residuals need at least two frames");
  const Grid1D& g = u.frames.front().grid;
  const int N = g.N;
  const double dx = g.dx();
  MadelungResiduals out;

  auto usable = [&](const ComplexField& f, int j) {
    for (int q = j - 1; q <= j + 1; ++q) {
      if (std::abs(f.at(q)) < kFloor) return false;
    }
    return true;
  };
  auto flux = [&](const ComplexField& f, int j) {  // 2 rho S_x at j + 1/2
    double rho = 0.5 * (std::norm(f.at(j)) + std::norm(f.at(j + 1)));
    return 2 * rho * std::arg(f.at(j + 1) / f.at(j)) / dx;
  };
  auto spatialHJ = [&](const ComplexField& f, int j) {
    double sx = std::arg(f.at(j + 1) / f.at(j - 1)) / (2 * dx);
    double r = std::abs(f.at(j));
    double q = -(std::abs(f.at(j + 1)) - 2 * r + std::abs(f.at(j - 1))) / (dx * dx * r);
    return sx * sx + q;
  };

  for (std::size_t k = 0; k + 1 < u.frames.size(); ++k) {
    const auto& a = u.frames[k];
    const auto& b = u.frames[k + 1];
    const double dt = frameGap(u, k);
    const double tMid = u.dt * 0.5 * (u.steps[k] + u.steps[k + 1]);
    for (int j = 0; j < N; ++j) {
      if (!inWindow(g.x(j), window)) continue;
      if (!usable(a, j) || !usable(b, j)) {
        if (window) throw NumericsError("amplitude vanishes inside the residual window");
        continue;
      }
      double rhoT = (std::norm(b.at(j)) - std::norm(a.at(j))) / dt;
      double div = 0.5 * ((flux(a, j) - flux(a, j - 1)) + (flux(b, j) - flux(b, j - 1))) / dx;
      out.continuity = std::max(out.continuity, std::abs(rhoT + div));
      double sT = std::arg(b.at(j) / a.at(j)) / dt;
      double hj = sT + 0.5 * (spatialHJ(a, j) + spatialHJ(b, j)) + V(g.x(j), tMid);
      out.hamiltonJacobi = std::max(out.hamiltonJacobi, std::abs(hj));
    }
  }
  return out;
}

double convergenceOrder(const std::vector<double>& h, const std::vector<double>& error,
                        std::vector<std::string>* warnings) {
  if (h.size() != error.size() || h.size() < 2) throw NumericsError("convergence needs matching h and error lists");
  const std::size_t m = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(h[i] > 0) || !(error[i] > 0)) throw NumericsError("convergence needs positive h and error");
    double lx = std::log(h[i]);
    double ly = std::log(error[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  if (warnings) {
    for (std::size_t i = 1; i < m; ++i) {
      if ((h[i] < h[i - 1]) != (error[i] < error[i - 1])) {
        warnings->push_back("error sequence is not monotone in h");
        break;
      }
    }
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ConvergenceTable measureConvergence(const std::function<double(int)>& error, const std::vector<int>& resolutions) {
  ConvergenceTable t;
  for (int N : resolutions) {
    t.N.push_back(N);
    t.h.push_back(1.0 / (N + 1));
    t.error.push_back(error(N));
  }
  t.order = convergenceOrder(t.h, t.error, &t.warnings);
  return t;
}

Complex freeGaussian(double x, double t, double sigma, double k) {
  const double s0 = sigma * sigma;
  const Complex s(s0, t);
  const Complex shift = x - Complex(0, 2 * k * s0);
  return std::sqrt(s0 / s) * std::exp(-shift * shift / (4.0 * s) - k * k * s0);
}

}  // namespace cartan::numerics
