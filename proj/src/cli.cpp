#include "diracstab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "json.hpp"

#include "diracstab/continuation.hpp"
#include "diracstab/errors.hpp"
#include "diracstab/evans.hpp"
#include "diracstab/io.hpp"
#include "diracstab/linearize.hpp"
#include "diracstab/profiles.hpp"
#include "diracstab/spectra.hpp"
#include "diracstab/verify.hpp"

namespace diracstab::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"profile", "spectrum", "sweep",
                                      "evans",   "verify",   "derrick"};
const std::set<std::string> kSuites{"derrick", "hardy", "matexp", "carleman"};

json contour_to_json(const ContourSpec& c) {
  return json{{"re_lo", c.re_lo}, {"re_hi", c.re_hi}, {"im_lo", c.im_lo},
              {"im_hi", c.im_hi}, {"samples", c.samples}};
}

json config_to_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"m", c.m},
              {"k", c.k},
              {"omega", c.omega},
              {"omega_start", c.omega_start},
              {"omega_end", c.omega_end},
              {"steps", c.steps},
              {"L", c.L},
              {"npoints", c.npoints},
              {"auto_rescale", c.auto_rescale},
              {"eps_times_L", c.eps_times_L},
              {"tol_eig", c.tol_eig},
              {"rho_loc", c.rho_loc},
              {"delta0", c.delta0},
              {"tol_2omega", c.tol_2omega},
              {"matching_radius", c.matching_radius},
              {"evans_rtol", c.evans_rtol},
              {"contour", contour_to_json(c.contour)},
              {"suite", c.suite},
              {"outdir", c.outdir},
              {"seed", c.seed}};
}

}  // namespace

void validate(const RunConfig& c) {
  if (!kCommands.count(c.command)) throw ConfigInvalid("command", "unknown command " + c.command);
  if (c.m <= 0.0) throw ConfigInvalid("m", "mass must be positive");
  if (c.k < 1) throw ConfigInvalid("k", "nonlinearity power must be >= 1");
  if (c.L <= 0.0) throw ConfigInvalid("L", "half-length must be positive");
  if (c.npoints <= 0 || c.npoints % 2 != 0)
    throw ConfigInvalid("npoints", "grid point count must be even and positive");
  if (c.eps_times_L <= 0.0) throw ConfigInvalid("eps_times_L", "must be positive");
  for (auto [name, v] : {std::pair<const char*, double>{"tol_eig", c.tol_eig},
                         {"rho_loc", c.rho_loc},
                         {"delta0", c.delta0},
                         {"tol_2omega", c.tol_2omega},
                         {"evans_rtol", c.evans_rtol}})
    if (v <= 0.0) throw ConfigInvalid(name, "tolerance must be positive");
  if (c.matching_radius < 0.0) throw ConfigInvalid("matching_radius", "must be >= 0");
  if (c.command == "sweep") {
    if (std::abs(c.omega_start) >= c.m || std::abs(c.omega_end) >= c.m)
      throw ConfigInvalid("omega_start", "omega range must lie inside the spectral gap (-m, m)");
    if (c.omega_end <= c.omega_start && c.steps > 1)
      throw ConfigInvalid("omega_end", "omega range must increase");
    if (c.steps < 1) throw ConfigInvalid("steps", "need at least one omega sample");
  } else if (c.command == "profile" || c.command == "spectrum" || c.command == "evans") {
    if (std::abs(c.omega) >= c.m)
      throw ConfigInvalid("omega", "omega must lie inside the spectral gap (-m, m)");
  }
  if (c.contour.re_lo >= c.contour.re_hi || c.contour.im_lo >= c.contour.im_hi)
    throw ConfigInvalid("contour", "degenerate contour rectangle");
  if (c.contour.samples < 8) throw ConfigInvalid("contour.samples", "need at least 8 samples");
  if (c.command == "verify" && !kSuites.count(c.suite))
    throw ConfigInvalid("suite", "unknown suite " + c.suite);
  if (c.outdir.empty()) throw ConfigInvalid("outdir", "output directory required");
}

std::string to_json_string(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

RunConfig config_from_json_string(const std::string& text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("json", e.what());
  }
  if (!j.is_object()) throw ConfigInvalid("json", "top-level value must be an object");
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "command") base.command = val.get<std::string>();
      else if (key == "m") base.m = val.get<double>();
      else if (key == "k") base.k = val.get<int>();
      else if (key == "omega") base.omega = val.get<double>();
      else if (key == "omega_start") base.omega_start = val.get<double>();
      else if (key == "omega_end") base.omega_end = val.get<double>();
      else if (key == "steps") base.steps = val.get<int>();
      else if (key == "L") base.L = val.get<double>();
      else if (key == "npoints") base.npoints = val.get<int>();
      else if (key == "auto_rescale") base.auto_rescale = val.get<bool>();
      else if (key == "eps_times_L") base.eps_times_L = val.get<double>();
      else if (key == "tol_eig") base.tol_eig = val.get<double>();
      else if (key == "rho_loc") base.rho_loc = val.get<double>();
      else if (key == "delta0") base.delta0 = val.get<double>();
      else if (key == "tol_2omega") base.tol_2omega = val.get<double>();
      else if (key == "matching_radius") base.matching_radius = val.get<double>();
      else if (key == "evans_rtol") base.evans_rtol = val.get<double>();
      else if (key == "suite") base.suite = val.get<std::string>();
      else if (key == "outdir") base.outdir = val.get<std::string>();
      else if (key == "seed") base.seed = val.get<unsigned>();
      else if (key == "contour") {
        const json& cj = val;
        for (const auto& [ck, cv] : cj.items()) {
          if (ck == "re_lo") base.contour.re_lo = cv.get<double>();
          else if (ck == "re_hi") base.contour.re_hi = cv.get<double>();
          else if (ck == "im_lo") base.contour.im_lo = cv.get<double>();
          else if (ck == "im_hi") base.contour.im_hi = cv.get<double>();
          else if (ck == "samples") base.contour.samples = cv.get<int>();
          else throw ConfigInvalid("contour." + ck, "unknown field");
        }
      } else {
        throw ConfigInvalid(key, "unknown field");
      }
    } catch (const json::exception& e) {
      throw ConfigInvalid(key, e.what());
    }
  }
  return base;
}

std::string config_hash(const RunConfig& c) { return io::hash_hex(to_json_string(c)); }

namespace {

namespace fs = std::filesystem;

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigInvalid*>(&e)) return "ConfigInvalid";
  if (dynamic_cast<const OutsideGap*>(&e)) return "OutsideGap";
  if (dynamic_cast<const NoConvergence*>(&e)) return "NoConvergence";
  if (dynamic_cast<const NoConvergenceQR*>(&e)) return "NoConvergenceQR";
  if (dynamic_cast<const InsufficientFamily*>(&e)) return "InsufficientFamily";
  if (dynamic_cast<const NotHyperbolic*>(&e)) return "NotHyperbolic";
  if (dynamic_cast<const IntegrationFailure*>(&e)) return "IntegrationFailure";
  if (dynamic_cast<const ContourTouchesEssential*>(&e)) return "ContourTouchesEssential";
  if (dynamic_cast<const NotSmallBranch*>(&e)) return "NotSmallBranch";
  if (dynamic_cast<const NonmonotoneWeight*>(&e)) return "NonmonotoneWeight";
  if (dynamic_cast<const HypothesisFails*>(&e)) return "HypothesisFails";
  if (dynamic_cast<const ThresholdLambda*>(&e)) return "ThresholdLambda";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  return "RuntimeError";
}

Grid1D grid_for(const RunConfig& c, double omega) {
  if (!c.auto_rescale) return Grid1D(c.L, c.npoints);
  const double eps = std::sqrt(c.m * c.m - omega * omega);
  return Grid1D(c.eps_times_L / eps, c.npoints);
}

void emit(const RunConfig& c, const std::string& name, json body) {
  body["config_hash"] = config_hash(c);
  io::write_text((fs::path(c.outdir) / name).string(), body.dump(2) + "\n");
}

json label_codes() {
  return json{{"0", "unclassified"},
              {"1", "point"},
              {"2", "essential_artifact"},
              {"3", "embedded_candidate"},
              {"4", "threshold"}};
}

void run_profile(const RunConfig& c) {
  const auto grid = grid_for(c, c.omega);
  const auto wave =
      profiles::nld_solitary_wave(c.omega, c.m, profiles::Nonlinearity::power(c.k), grid);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < grid.npoints; ++i)
    rows.push_back({grid.node(i), wave.spinor(0, i).real(), wave.spinor(1, i).real()});
  io::write_text((fs::path(c.outdir) / "profile.csv").string(),
                 io::csv_string({{"x", "1/m"}, {"v", "m^1/2"}, {"u", "m^1/2"}}, rows));

  const auto fit = profiles::decay_rate(wave);
  emit(c, "profile.json",
       json{{"omega", c.omega},
            {"m", c.m},
            {"k", c.k},
            {"L", grid.L},
            {"npoints", grid.npoints},
            {"residual_norm", wave.residual_norm},
            {"charge", profiles::charge(wave)},
            {"decay_rate", fit.mu_est},
            {"decay_rate_expected", wave.epsilon()}});
}

void run_spectrum(const RunConfig& c) {
  const auto grid = grid_for(c, c.omega);
  const auto wave =
      profiles::nld_solitary_wave(c.omega, c.m, profiles::Nonlinearity::power(c.k), grid);
  const auto rep = clifford::build_dirac_rep(1, true);
  const auto rrep = clifford::realify(rep);
  const auto ops = linearize::assemble_nld_linearization(wave, rrep, false);

  spectra::EigenOptions eig;
  eig.tol_eig = c.tol_eig;
  spectra::ClassifyOptions cls;
  cls.rho_loc = c.rho_loc;
  const auto spec = spectra::classify(spectra::eigensolve(ops.JL, eig),
                                      linearize::essential_bands(c.omega, c.m), grid, cls);

  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i)
    rows.push_back({spec.eigenvalues[i].real(), spec.eigenvalues[i].imag(), spec.residuals[i],
                    spec.localization[i], static_cast<double>(spec.labels[i])});
  io::write_text((fs::path(c.outdir) / "spectrum.csv").string(),
                 io::csv_string({{"re_lambda", "m"},
                                 {"im_lambda", "m"},
                                 {"residual", "m"},
                                 {"localization", "1"},
                                 {"label", "code"}},
                                rows));
  io::write_text((fs::path(c.outdir) / "spectrum.svg").string(), io::plot_spectrum(spec));

  const auto two = spectra::verify_2omega(wave, rep, ops.L, spec);
  json counts = json::object();
  for (const auto& l : spec.labels) {
    const auto name = spectra::label_name(l);
    counts[name] = counts.value(name, 0) + 1;
  }
  emit(c, "spectrum.json",
       json{{"omega", c.omega},
            {"m", c.m},
            {"k", c.k},
            {"label_counts", counts},
            {"label_codes", label_codes()},
            {"two_omega",
             json{{"identity_residual", two.identity_residual},
                  {"nearest_re", two.nearest.real()},
                  {"nearest_im", two.nearest.imag()},
                  {"distance", two.distance},
                  {"within_tol", two.distance < c.tol_2omega}}},
            {"profile_residual", wave.residual_norm}});
}

void run_sweep(const RunConfig& c) {
  std::vector<double> omegas;
  for (int i = 0; i < c.steps; ++i)
    omegas.push_back(c.steps == 1 ? c.omega_start
                                  : c.omega_start + (c.omega_end - c.omega_start) * i /
                                                        static_cast<double>(c.steps - 1));

  continuation::SweepConfig sc;
  sc.m = c.m;
  sc.k = c.k;
  sc.auto_rescale = c.auto_rescale;
  sc.eps_times_L = c.eps_times_L;
  sc.fixed_L = c.L;
  sc.npoints = c.npoints;
  sc.delta0 = c.delta0;
  sc.eig.tol_eig = c.tol_eig;
  sc.cls.rho_loc = c.rho_loc;
  const auto res = continuation::sweep(omegas, sc);
  const auto branches = continuation::track(res, c.matching_radius);

  std::vector<std::vector<double>> rows;
  for (size_t b = 0; b < branches.size(); ++b)
    for (size_t i = 0; i < branches[b].omegas.size(); ++i)
      rows.push_back({static_cast<double>(b), branches[b].omegas[i],
                      branches[b].lambdas[i].real(), branches[b].lambdas[i].imag(),
                      static_cast<double>(branches[b].multiplicity),
                      branches[b].matched[i] ? 1.0 : 0.0});
  io::write_text((fs::path(c.outdir) / "branches.csv").string(),
                 io::csv_string({{"branch", "1"},
                                 {"omega", "m"},
                                 {"re_lambda", "m"},
                                 {"im_lambda", "m"},
                                 {"multiplicity", "1"},
                                 {"matched", "bool"}},
                                rows));
  io::write_text((fs::path(c.outdir) / "spectrum-vs-omega.svg").string(),
                 io::plot_branches(branches));

  const auto rep = clifford::build_dirac_rep(1);
  std::vector<evans::EvansScan> scans;
  for (const auto& wave : res.family.waves)
    scans.push_back(evans::EvansSystem(wave, rep, c.evans_rtol)
                        .winding(evans::Contour::rectangle(c.contour.re_lo, c.contour.re_hi,
                                                           c.contour.im_lo, c.contour.im_hi),
                                 c.contour.samples));
  const auto verdicts = continuation::stability_report(res, scans);
  std::vector<profiles::VkSample> vk;  // centered stencil needs >= 3 samples
  if (res.omegas.size() >= 3) vk = profiles::vk_derivative(res.omegas, res.charges);

  json jv = json::array();
  for (size_t i = 0; i < verdicts.size(); ++i)
    jv.push_back(json{{"omega", verdicts[i].omega},
                      {"verdict", continuation::verdict_name(verdicts[i].verdict)},
                      {"grid_unstable", verdicts[i].grid_unstable},
                      {"evans_winding", scans[i].winding},
                      {"charge", res.charges[i]},
                      {"profile_residual", res.family.waves[i].residual_norm}});
  json jvk = json::array();
  for (const auto& s : vk)
    jvk.push_back(json{{"omega", s.omega}, {"dq_domega", s.dq_domega},
                       {"sign_change", s.sign_change}});
  emit(c, "verdicts.json", json{{"entries", jv}, {"vk_derivative", jvk}});
}

void run_evans(const RunConfig& c) {
  const auto grid = grid_for(c, c.omega);
  const auto wave =
      profiles::nld_solitary_wave(c.omega, c.m, profiles::Nonlinearity::power(c.k), grid);
  const auto rep = clifford::build_dirac_rep(1);
  const auto scan = evans::EvansSystem(wave, rep, c.evans_rtol)
                        .winding(evans::Contour::rectangle(c.contour.re_lo, c.contour.re_hi,
                                                           c.contour.im_lo, c.contour.im_hi),
                                 c.contour.samples);

  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < scan.lambdas.size(); ++i)
    rows.push_back({scan.lambdas[i].real(), scan.lambdas[i].imag(),
                    scan.log_values[i].real(), scan.log_values[i].imag()});
  io::write_text((fs::path(c.outdir) / "evans.csv").string(),
                 io::csv_string({{"re_lambda", "m"},
                                 {"im_lambda", "m"},
                                 {"re_log_e", "1"},
                                 {"im_log_e", "rad"}},
                                rows));
  emit(c, "evans.json",
       json{{"omega", c.omega},
            {"winding", scan.winding},
            {"refinements", scan.refinements},
            {"samples", scan.lambdas.size()},
            {"profile_residual", wave.residual_norm}});
}

json report_to_json(const verify::InequalityReport& r) {
  return json{{"id", r.id},           {"samples", r.samples},
              {"worst_ratio", r.worst_ratio}, {"worst_sample", r.worst_sample},
              {"constant", r.constant},       {"tol", r.tol},
              {"pass", r.pass}};
}

void run_verify(const RunConfig& c) {
  const auto rep = clifford::build_dirac_rep(1);
  if (c.suite == "derrick") {
    const auto d = verify::derrick_demo(Grid1D(26.0, 512));
    emit(c, "derrick.json",
         json{{"kinetic", d.kinetic},
              {"potential", d.potential},
              {"dilation_residual", d.dilation_residual},
              {"min_eigenvalue", d.min_eigenvalue},
              {"growth_rate", d.growth_rate},
              {"growth_rate_block", d.growth_rate_block},
              {"zero_mode_residual", d.zero_mode_residual}});
  } else if (c.suite == "hardy") {
    const verify::WeightFn wx{[](double x) { return x; }, [](double) { return 1.0; }};
    const auto r = verify::hardy_sample(wx, Grid1D(10.0, 2048),
                                        verify::sample_family(100, 0.3, 9.7, c.seed));
    emit(c, "hardy.json", report_to_json(r));
  } else if (c.suite == "matexp") {
    std::vector<double> lambdas;
    for (int i = 0; i < 100; ++i) lambdas.push_back(c.m * (1.1 + 0.5 * i));
    Vector xs(2001);
    for (int i = 0; i < 2001; ++i) xs[i] = -50.0 + 0.05 * i;
    const auto r = verify::matrix_exp_bound(lambdas, c.m, rep, xs);
    const auto fit = verify::matrix_exp_threshold(c.m, rep, xs);
    json body = report_to_json(r);
    body["threshold_kappa"] = fit.kappa;
    emit(c, "matexp.json", body);
  } else {  // carleman
    Grid1D grid(12.0, 1024);
    const auto r = verify::carleman_sample(1.5 * c.m, c.m, {1.0, 2.0, 4.0}, 2.0, rep, grid, 50,
                                           c.seed);
    std::vector<double> logtau, loggain;
    for (double tau : {4.0, 8.0, 16.0}) {
      const auto rt = verify::carleman_sample(1.5 * c.m, c.m, {tau}, 2.0, rep, grid, 50, c.seed);
      logtau.push_back(std::log(tau));
      loggain.push_back(std::log(1.0 / rt.worst_ratio));
    }
    const double slope =
        (loggain.back() - loggain.front()) / (logtau.back() - logtau.front());
    json body = report_to_json(r);
    body["tau_gain_slope"] = slope;
    emit(c, "carleman.json", body);
  }
}

}  // namespace

int run(const RunConfig& config) {
  try {
    validate(config);
  } catch (const std::exception& e) {
    // no solve has happened; still leave a machine-readable trace if possible
    std::error_code ec;
    fs::create_directories(config.outdir, ec);
    if (!ec)
      io::write_text((fs::path(config.outdir) / "error.json").string(),
                     json{{"error", error_kind(e)}, {"message", e.what()}}.dump(2) + "\n");
    return 1;
  }
  try {
    fs::create_directories(config.outdir);
    emit(config, "config.json", json{{"config", config_to_json(config)}});
    if (config.command == "profile") run_profile(config);
    else if (config.command == "spectrum") run_spectrum(config);
    else if (config.command == "sweep") run_sweep(config);
    else if (config.command == "evans") run_evans(config);
    else if (config.command == "derrick") run_verify([&] {
      RunConfig d = config;
      d.suite = "derrick";
      return d;
    }());
    else run_verify(config);
    return 0;
  } catch (const std::exception& e) {
    io::write_text((fs::path(config.outdir) / "error.json").string(),
                   json{{"error", error_kind(e)}, {"message", e.what()}}.dump(2) + "\n");
    return 1;
  }
}

}  // namespace diracstab::cli
