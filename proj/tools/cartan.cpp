// cartan: command-line front end for the construction and the numeric checks.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cartan/equiv.hpp"
#include "cartan/verify.hpp"

namespace {

using cartan::Config;
using cartan::verify::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::string command;
  std::string configPath;
  std::string outPath;
  std::uint64_t seed = 0x5eed;
  std::optional<int> dim;
  std::optional<std::string> policy;
  std::optional<std::string> lambda;
  std::optional<std::string> convention;
  bool diffusion = false;
};

/// Raised for problems the user can fix by changing flags or config.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cartan::jetpde::JetPDE pdeFrom(const Options& o, const Config& c) {
  cartan::jetpde::PDESpec spec = cartan::jetpde::PDESpec::fromConfig(c);
  if (o.dim) {
    if (*o.dim < 1) throw UsageError("--dim must be at least 1");
    spec.n = *o.dim;
    if (!spec.signs.empty() && static_cast<int>(spec.signs.size()) != spec.n) spec.signs.clear();
  }
  if (o.diffusion) spec.time = cartan::jetpde::TimeCoefficient::Diffusion;
  return cartan::jetpde::flatten(spec);
}

cartan::expr::Expr lambdaFrom(const Options& o, const Config& c, const cartan::jetpde::JetPDE& p) {
  std::string text = o.lambda.value_or(c.getString("lambda", "1"));
  cartan::expr::Expr l = cartan::expr::parse(text, p.ws);
  for (const auto& s : cartan::expr::symbolsOf(l)) {
    if (s->name != "lambda") throw UsageError("--lambda must be a complex constant or the symbol lambda");
  }
  if (l.isZero()) throw UsageError("--lambda must be nonzero");
  return l;
}

cartan::connection::GaugePolicy policyFrom(const Options& o, const Config& c, const cartan::jetpde::JetPDE& p) {
  std::string name = o.policy.value_or(c.getString("policy", "paper-canonical"));
  if (name == "custom") {
    return cartan::connection::GaugePolicy::custom(cartan::expr::parse(c.getString("gauge_f", "0"), p.ws),
                                                   cartan::expr::parse(c.getString("gauge_g", "0"), p.ws));
  }
  try {
    return cartan::connection::GaugePolicy::named(name);
  } catch (const cartan::connection::PolicyError& e) {
    throw UsageError(e.what());
  }
}

cartan::forms::TorsionConvention conventionFrom(const Options& o, const Config& c) {
  std::string name = o.convention.value_or(c.getString("convention", "scale-acts-left"));
  if (name == "scale-acts-left") return cartan::forms::TorsionConvention::ScaleActsLeft;
  if (name == "matrix-product") return cartan::forms::TorsionConvention::MatrixProduct;
  throw UsageError("convention must be scale-acts-left or matrix-product");
}

json run(const Options& o, const Config& c) {
  using namespace cartan::verify;
  const std::string& cmd = o.command;
  if (cmd == "construct" || cmd == "gauge" || cmd == "verify-torsion") {
    auto p = pdeFrom(o, c);
    if (cmd == "construct") return constructReport(p, policyFrom(o, c, p), lambdaFrom(o, c, p), conventionFrom(o, c));
    if (cmd == "gauge") return gaugeReport(p, lambdaFrom(o, c, p), o.seed, static_cast<int>(c.getInt("samples", 50)));
    return torsionReport(p, policyFrom(o, c, p), conventionFrom(o, c));
  }
  if (cmd == "vacuum") return vacuumReport(c);
  if (cmd == "continuity") return continuityReport(c);
  if (cmd == "madelung") return madelungReport(c);
  if (cmd == "evolve") {
    json r;
    r["split"] = splitReport(c);
    r["norm"] = normReport(c);
    r["pass"] = r["split"]["pass"].get<bool>() && r["norm"]["pass"].get<bool>();
    return r;
  }
  // report: every suite with its defaults; the config only shapes the PDE.
  auto p = pdeFrom(o, c);
  json r;
  Config none;
  r["construct"] = constructReport(p, policyFrom(o, c, p), lambdaFrom(o, c, p), conventionFrom(o, c));
  r["gauge"] = gaugeReport(p, lambdaFrom(o, c, p), o.seed, static_cast<int>(c.getInt("samples", 50)));
  r["torsion"] = torsionReport(p, policyFrom(o, c, p), conventionFrom(o, c));
  r["vacuum"] = vacuumReport(none);
  r["split"] = splitReport(none);
  r["norm"] = normReport(none);
  r["continuity"] = continuityReport(none);
  r["madelung"] = madelungReport(none);
  bool pass = true;
  for (const auto& [k, v] : r.items()) pass = pass && v["pass"].get<bool>();
  r["pass"] = pass;
  return r;
}

std::string summarize(const json& report, const std::string& prefix = "") {
  std::string out;
  for (const auto& [k, v] : report.items()) {
    if (v.is_object() && v.contains("pass")) out += summarize(v, prefix + k + ".");
  }
  if (report.contains("pass")) {
    out += (report["pass"].get<bool>() ? "PASS " : "FAIL ") + (prefix.empty() ? std::string("overall") : prefix.substr(0, prefix.size() - 1)) + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cartan connections for linear PDEs on jet spaces, with numeric checks"};
  Options o;
  app.add_option("command", o.command, "construct | gauge | verify-torsion | vacuum | evolve | continuity | madelung | report")
      ->required()
      ->check(CLI::IsMember({"construct", "gauge", "verify-torsion", "vacuum", "evolve", "continuity", "madelung", "report"}));
  app.add_option("--config", o.configPath, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.outPath, "write the JSON report here instead of stdout");
  app.add_option("--seed", o.seed, "seed for equiv sampling and random group elements");
  app.add_option("--dim", o.dim, "spatial dimension n");
  app.add_option("--policy", o.policy, "gauge policy")->check(CLI::IsMember({"paper-canonical", "zero-alpha-t", "custom"}));
  app.add_option("--lambda", o.lambda, "proportionality constant, e.g. 1, 2, 1+2*I or lambda");
  app.add_option("--convention", o.convention, "torsion ordering: scale-acts-left | matrix-product");
  app.add_flag("--diffusion", o.diffusion, "use the diffusion equation (time coefficient 1)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  json report;
  try {
    Config config = o.configPath.empty() ? Config{} : Config::load(o.configPath);
    cartan::expr::setDefaultEquivSeed(o.seed);
    report["command"] = o.command;
    report["seed"] = o.seed;
    json body = run(o, config);
    report["pass"] = body["pass"];
    report["report"] = body;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::expr::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::expr::UnknownSymbolError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::expr::KindMismatchError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::jetpde::NonlinearityError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kFail;
  }

  std::string text = report.dump(2) + "\n";
  if (o.outPath.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.outPath, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << o.outPath << "\n";
      return kUsage;
    }
    out << text;
  }
  std::cerr << summarize(report["report"]);
  return report["pass"].get<bool>() ? kPass : kFail;
}
