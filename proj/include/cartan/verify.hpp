#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cartan/config.hpp"
#include "cartan/connection.hpp"
#include "cartan/numerics.hpp"
#include "json.hpp"

/// Verification suites shared by the command-line tool and the acceptance
/// runner. Every suite returns an ordered JSON report with a boolean "pass".
namespace cartan::verify {

using json = nlohmann::ordered_json;

/// Real potential V(x, t) from expression text over x, t and the parameters
/// k, omega (bound from the config when present).
numerics::Potential compilePotential(const std::string& text, const Config& params = {});

json constructReport(const jetpde::JetPDE& p, const connection::GaugePolicy& policy, const expr::Expr& lambda,
                     forms::TorsionConvention convention = forms::TorsionConvention::ScaleActsLeft);

/// H0 constraints for lambda plus `samples` seeded random H0-candidate
/// elements checked against the constructed Weyl connection.
json gaugeReport(const jetpde::JetPDE& p, const expr::Expr& lambda, std::uint64_t seed, int samples);

json torsionReport(const jetpde::JetPDE& p, const connection::GaugePolicy& policy,
                   forms::TorsionConvention convention = forms::TorsionConvention::ScaleActsLeft);

/// Keys: xmin, xmax, potential, exact, resolutions, stencil, min_order.
json vacuumReport(const Config& c);
/// Split against direct evolution. Keys: xmin, xmax, potential, vacuum_exact,
/// sigma, k, T, dt_per_dx, resolutions, tolerance, min_order.
json splitReport(const Config& c);
/// Keys: xmin, xmax, potentials (';'-separated), N, dt, steps, sigma, k,
/// tolerance.
json normReport(const Config& c);
/// Keys: xmin, xmax, potential (constant), vacuum_exact, sigma, k, T,
/// dt_per_dx, resolutions, perturbation, min_order, control_ratio.
json continuityReport(const Config& c);
/// Keys: k, omega, plane_N, harmonic_xmax, window, T, dt_per_dx,
/// resolutions, min_order.
json madelungReport(const Config& c);

}  // namespace cartan::verify
