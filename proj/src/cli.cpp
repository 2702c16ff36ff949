#include "bellvol/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bellvol/bell.hpp"
#include "bellvol/config.hpp"
#include "bellvol/error.hpp"
#include "bellvol/experiments.hpp"
#include "bellvol/kernels.hpp"
#include "bellvol/optimizer.hpp"
#include "bellvol/report.hpp"
#include "bellvol/volume.hpp"

namespace bellvol::cli {

namespace {

/// Error raised for a specific flag or config key; always exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

StateFamily parse_family(const std::string& name) {
  const auto n = lower(name);
  if (n == "alpha") return StateFamily::alpha_qubit;
  if (n == "gamma") return StateFamily::gamma_qutrit;
  if (n == "lambda") return StateFamily::lambda_ququart;
  throw UsageError(fmt::format("unknown state family '{}' (expected alpha, gamma or lambda)", name));
}

std::string family_name(StateFamily f) {
  switch (f) {
    case StateFamily::alpha_qubit: return "alpha";
    case StateFamily::gamma_qutrit: return "gamma";
    case StateFamily::lambda_ququart: return "lambda";
  }
  return "?";
}

std::size_t family_arity(StateFamily f) { return f == StateFamily::lambda_ququart ? 2 : 1; }

double to_double(const std::string& text, const std::string& what) {
  try {
    return parse_double(text, what);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t to_u64(const std::string& text, const std::string& what) {
  try {
    return parse_u64(text, what);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct CommonOptions {
  std::string output = ".";
  int workers = 0;
  std::string kernel;
};

void add_common(CLI::App* app, CommonOptions& c) {
  app->add_option("--output,-o", c.output, "Output directory (created if missing)");
  app->add_option("--workers", c.workers, "Worker threads; 0 uses BELLVOL_WORKERS or all cores")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--kernel", c.kernel, "Kernel variant: scalar or avx2 (default: widest supported)");
}

int resolved_workers(int requested) { return requested > 0 ? requested : default_worker_count(); }

kernels::Isa resolved_isa(const std::string& name) {
  if (name.empty()) return kernels::default_isa();
  kernels::Isa isa;
  try {
    isa = kernels::parse_isa(name);
  } catch (const Error& e) {
    throw UsageError(fmt::format("--kernel: {}", e.what()));
  }
  if (!kernels::isa_supported(isa)) throw UsageError(fmt::format("--kernel: {} is not supported on this CPU", name));
  return isa;
}

BellFunctional functional_flag(const std::string& name, const std::string& flag) {
  try {
    return BellFunctional::parse(name);
  } catch (const Error& e) {
    throw UsageError(fmt::format("{}: {}", flag, e.what()));
  }
}

std::filesystem::path prepare_output(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw UsageError(fmt::format("--output: cannot create '{}': {}", dir, ec.message()));
  return p;
}

void check_dimension(const FamilySpec& spec, const BellFunctional& f, const std::string& state_flag) {
  const int d = make_state(spec).local_dim();
  if (d != f.local_dim()) {
    throw Error(ErrorKind::unsupported_dimension,
                fmt::format("{}: {} is a d = {} state but --functional {} needs d = {}", state_flag, spec.describe(), d,
                            f.name(), f.local_dim()));
  }
}

nlohmann::ordered_json state_json(const FamilySpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = family_name(spec.family);
  auto params = nlohmann::ordered_json::array();
  for (double p : spec.params) params.push_back(p);
  j["params"] = params;
  j["noise"] = spec.noise;
  j["label"] = report::state_label(spec.family, spec.params, spec.noise);
  return j;
}

std::string joined(const std::vector<std::string>& args) {
  std::string s = "bellvol";
  for (const auto& a : args) s += " " + a;
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string estimate_line(const std::string& label, const BellFunctional& f, const VolumeEstimate& e) {
  std::string line = fmt::format("{} {}: V = {:.6g} +/- {:.2g} (95% CI [{:.6g}, {:.6g}], {}/{} hits)", label,
                                 f.name(), e.fraction, e.std_error, e.ci_low, e.ci_high, e.hits, e.samples);
  if (e.normalization == NormalizationMode::relative) {
    line += fmt::format(", relative to {}: {:.6g} +/- {:.2g}", e.reference_label, e.value, e.value_std_error);
  }
  return line;
}

// ---- volume ---------------------------------------------------------------

struct VolumeArgs {
  std::vector<std::string> state;
  std::string functional;
  std::string samples = "1000000";
  std::string seed = "1";
  std::string normalization = "absolute";
  std::vector<std::string> normalize_to;
  double margin = 0.0;
  CommonOptions common;
};

int run_volume(const VolumeArgs& a, const std::string& command, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const FamilySpec spec = parse_state_spec(a.state);
  const BellFunctional f = functional_flag(a.functional, "--functional");
  const std::uint64_t samples = to_u64(a.samples, "--samples");
  const std::uint64_t seed = to_u64(a.seed, "--seed");
  if (samples == 0) throw UsageError("--samples: must be at least 1");
  const auto mode = lower(a.normalization);
  if (mode != "absolute" && mode != "relative") {
    throw UsageError(fmt::format("--normalization: expected absolute or relative, got '{}'", a.normalization));
  }
  if (mode == "relative" && a.normalize_to.empty()) {
    throw UsageError("--normalization relative requires --normalize-to naming the reference state");
  }
  if (mode == "absolute" && !a.normalize_to.empty()) {
    throw UsageError("--normalize-to only applies with --normalization relative");
  }
  check_dimension(spec, f, "--state");

  EstimatorOptions opts;
  opts.workers = resolved_workers(a.common.workers);
  opts.isa = resolved_isa(a.common.kernel);
  opts.margin = a.margin;

  const std::string label = report::state_label(spec.family, spec.params, spec.noise);
  std::vector<std::pair<FamilySpec, VolumeEstimate>> rows;
  rows.emplace_back(spec, estimate_volume(make_state(spec), f, f.space(), samples, seed, opts));

  if (mode == "relative") {
    const FamilySpec ref = parse_state_spec(a.normalize_to);
    check_dimension(ref, f, "--normalize-to");
    const std::string ref_label = report::state_label(ref.family, ref.params, ref.noise);
    if (ref_label != label) {
      rows.emplace_back(ref, estimate_volume(make_state(ref), f, f.space(), samples, seed, opts));
    }
    std::map<std::string, VolumeEstimate> by_label;
    for (const auto& [s, e] : rows) by_label[report::state_label(s.family, s.params, s.noise)] = e;
    const auto normalized = relative_normalize(by_label, ref_label);
    for (auto& [s, e] : rows) e = normalized.at(report::state_label(s.family, s.params, s.noise));
  }

  const auto dir = prepare_output(a.common.output);
  report::CsvTable csv({"state_params", "functional", "samples", "hits", "fraction", "stderr", "ci_low", "ci_high",
                        "value"});
  for (const auto& [s, e] : rows) {
    csv.add_row({report::state_label(s.family, s.params, s.noise), f.name(), std::to_string(e.samples),
                 std::to_string(e.hits), report::number(e.fraction), report::number(e.std_error),
                 report::number(e.ci_low), report::number(e.ci_high), report::number(e.value)});
  }
  csv.write((dir / "results.csv").string());

  report::Manifest m("volume");
  auto& b = m.body();
  b["invocation"] = command;
  b["functional"] = f.name();
  b["state"] = state_json(spec);
  b["space"] = f.space().describe();
  b["samples"] = samples;
  b["seed"] = seed;
  b["workers"] = opts.workers;
  b["kernel"] = std::string(kernels::isa_name(*opts.isa));
  b["margin"] = a.margin;
  b["normalization"] = mode;
  auto estimates = nlohmann::ordered_json::array();
  for (const auto& [s, e] : rows) {
    auto j = report::to_json(e);
    j["state"] = state_json(s);
    estimates.push_back(j);
  }
  b["estimates"] = estimates;
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  for (const auto& [s, e] : rows) out << estimate_line(report::state_label(s.family, s.params, s.noise), f, e) << "\n";
  return kExitOk;
}

// ---- maximize -------------------------------------------------------------

struct MaximizeArgs {
  std::vector<std::string> state;
  std::string functional;
  int restarts = 64;
  std::string seed = "1";
  int max_iterations = 2000;
  double tolerance = 1e-9;
  CommonOptions common;
};

int run_maximize(const MaximizeArgs& a, const std::string& command, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const FamilySpec spec = parse_state_spec(a.state);
  const BellFunctional f = functional_flag(a.functional, "--functional");
  if (a.restarts < 1) throw UsageError("--restarts: must be at least 1");
  if (!(a.tolerance > 0.0)) throw UsageError("--tolerance: must be positive");
  check_dimension(spec, f, "--state");

  OptimizerConfig cfg;
  cfg.restarts = a.restarts;
  cfg.seed = to_u64(a.seed, "--seed");
  cfg.max_iterations = a.max_iterations;
  cfg.tolerance = a.tolerance;
  cfg.workers = resolved_workers(a.common.workers);
  const auto state = make_state(spec);
  const MaxResult r = maximize_bell(state, f, f.space(), cfg);

  const auto dir = prepare_output(a.common.output);
  report::CsvTable csv({"state_params", "functional", "value", "bound", "violated", "restarts", "restarts_agreeing"});
  const double bound = local_bound(f);
  csv.add_row({report::state_label(spec.family, spec.params, spec.noise), f.name(), report::number(r.value),
               report::number(bound), r.value > bound ? "1" : "0", std::to_string(r.restart_values.size()),
               std::to_string(r.restarts_agreeing)});
  csv.write((dir / "results.csv").string());

  report::Manifest m("maximize");
  auto& b = m.body();
  b["invocation"] = command;
  b["functional"] = f.name();
  b["state"] = state_json(spec);
  b["space"] = f.space().describe();
  b["seed"] = cfg.seed;
  b["workers"] = cfg.workers;
  b["optimizer"] = {{"restarts", cfg.restarts},
                    {"max_iterations", cfg.max_iterations},
                    {"tolerance", cfg.tolerance},
                    {"polish_rounds", cfg.polish_rounds}};
  b["bound"] = bound;
  b["max_result"] = report::to_json(r);
  if (f.kind == FunctionalKind::chsh && state.local_dim() == 2) {
    b["horodecki_chsh_max"] = horodecki_chsh_max(qubit_correlation_data(state));
  }
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  out << fmt::format("{} {}: I_max = {:.10g} (bound {}, {} of {} restarts agree{})\n",
                     report::state_label(spec.family, spec.params, spec.noise), f.name(), r.value, bound,
                     r.restarts_agreeing, r.restart_values.size(), r.low_confidence() ? ", low confidence" : "");
  return kExitOk;
}

// ---- config-driven commands -----------------------------------------------

struct ConfigArgs {
  std::string config;
  CommonOptions common;
};

/// Values given on the command line override the config file.
struct ResolvedCommon {
  std::string output;
  int workers = 0;
};

ResolvedCommon resolve_common(const Config& cfg, const CommonOptions& c, bool output_given, bool workers_given) {
  ResolvedCommon r;
  r.output = output_given ? c.output : cfg.get_string("output", ".");
  r.workers = resolved_workers(workers_given ? c.workers : cfg.get_int("workers", 0));
  return r;
}

MonteCarloSpec mc_from(const Config& cfg, int workers) {
  MonteCarloSpec mc;
  mc.samples = cfg.get_u64("samples", 1'000'000);
  if (mc.samples == 0) throw Error(ErrorKind::config_error, fmt::format("{}: samples must be at least 1", cfg.source()));
  mc.seed = cfg.get_u64("seed", 1);
  mc.workers = workers;
  const auto sampling = lower(cfg.get_string("sampling", "common"));
  if (sampling == "common") {
    mc.sampling = SweepSampling::common;
  } else if (sampling == "independent") {
    mc.sampling = SweepSampling::independent;
  } else {
    throw Error(ErrorKind::config_error,
                fmt::format("{}: sampling must be common or independent, got '{}'", cfg.source(), sampling));
  }
  return mc;
}

OptimizerConfig optimizer_from(const Config& cfg, int workers) {
  OptimizerConfig o;
  o.restarts = cfg.get_int("restarts", 16);
  if (o.restarts < 1) throw Error(ErrorKind::config_error, fmt::format("{}: restarts must be at least 1", cfg.source()));
  o.seed = cfg.get_u64("optimizer_seed", 1);
  o.workers = workers;
  return o;
}

nlohmann::ordered_json mc_json(const MonteCarloSpec& mc) {
  return {{"samples", mc.samples},
          {"seed", mc.seed},
          {"workers", mc.workers},
          {"sampling", mc.sampling == SweepSampling::common ? "common" : "independent"}};
}

nlohmann::ordered_json optimizer_json(const OptimizerConfig& o) {
  return {{"restarts", o.restarts},
          {"seed", o.seed},
          {"max_iterations", o.max_iterations},
          {"tolerance", o.tolerance},
          {"polish_rounds", o.polish_rounds}};
}

BellFunctional functional_key(const Config& cfg, const std::string& fallback) {
  const auto name = cfg.get_string("functional", fallback);
  try {
    return BellFunctional::parse(name);
  } catch (const Error& e) {
    throw Error(ErrorKind::config_error, fmt::format("{}: key 'functional': {}", cfg.source(), e.what()));
  }
}

void apply_relative(std::vector<SweepRow>& rows, StateFamily family, const std::string& reference_label) {
  std::map<std::string, VolumeEstimate> by_label;
  for (const auto& r : rows) by_label[report::state_label(family, r.params, r.noise)] = r.volume;
  const auto normalized = relative_normalize(by_label, reference_label);
  for (auto& r : rows) r.volume = normalized.at(report::state_label(family, r.params, r.noise));
}

int run_sweep(const ConfigArgs& a, bool output_given, bool workers_given, const std::string& command,
              std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = Config::load(a.config);
  cfg.require_known({"family", "functional", "sweep", "grid", "param", "noise", "samples", "seed", "workers",
                     "restarts", "optimizer_seed", "sampling", "normalize_to", "output"});
  const auto common = resolve_common(cfg, a.common, output_given, workers_given);
  const StateFamily family = [&] {
    try {
      return parse_family(cfg.get_string("family"));
    } catch (const UsageError& e) {
      throw Error(ErrorKind::config_error, fmt::format("{}: key 'family': {}", cfg.source(), e.what()));
    }
  }();
  const BellFunctional f = functional_key(cfg, "chsh");
  const auto mode = lower(cfg.get_string("sweep", "parameter"));
  const MonteCarloSpec mc = mc_from(cfg, common.workers);
  const OptimizerConfig opt = optimizer_from(cfg, common.workers);
  const std::vector<double> grid = cfg.get_grid("grid");

  std::vector<SweepRow> rows;
  double fixed_noise = 0.0;
  if (mode == "parameter") {
    fixed_noise = cfg.get_double("noise", 0.0);
    std::vector<std::vector<double>> points;
    for (double g : grid) {
      points.push_back(family == StateFamily::lambda_ququart ? std::vector<double>{g, g} : std::vector<double>{g});
    }
    check_dimension(FamilySpec{family, points.front(), fixed_noise}, f, "family");
    rows = sweep_family(family, points, f, mc, fixed_noise, opt);
  } else if (mode == "noise") {
    if (family != StateFamily::alpha_qubit) {
      throw Error(ErrorKind::config_error, fmt::format("{}: key 'sweep': noise sweeps need family = alpha", cfg.source()));
    }
    const double alpha = cfg.get_double("param");
    check_dimension(FamilySpec{family, {alpha}, 0.0}, f, "family");
    rows = noise_sweep(alpha, grid, f, mc, opt);
  } else {
    throw Error(ErrorKind::config_error,
                fmt::format("{}: key 'sweep': expected parameter or noise, got '{}'", cfg.source(), mode));
  }

  std::string reference;
  if (cfg.has("normalize_to")) {
    const double ref = cfg.get_double("normalize_to");
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) {
      const double key = mode == "noise" ? r.noise : r.params.front();
      return std::abs(key - ref) < 1e-9;
    });
    if (it == rows.end()) {
      throw Error(ErrorKind::config_error,
                  fmt::format("{}: key 'normalize_to': {} is not a grid value", cfg.source(), ref));
    }
    reference = report::state_label(family, it->params, it->noise);
    apply_relative(rows, family, reference);
  }

  const auto dir = prepare_output(common.output);
  report::sweep_table(family_name(family), f, rows, family).write((dir / "results.csv").string());

  report::Manifest m("sweep");
  auto& b = m.body();
  b["invocation"] = command;
  b["config"] = cfg.source();
  b["functional"] = f.name();
  b["state"] = {{"family", family_name(family)}, {"sweep", mode}};
  if (mode == "noise") b["state"]["alpha"] = rows.front().params.front();
  if (mode == "parameter") b["state"]["noise"] = fixed_noise;
  b["space"] = f.space().describe();
  b["samples"] = mc.samples;
  b["seed"] = mc.seed;
  b["workers"] = mc.workers;
  b["kernel"] = std::string(kernels::isa_name(kernels::default_isa()));
  b["monte_carlo"] = mc_json(mc);
  b["optimizer"] = optimizer_json(opt);
  b["normalization"] = reference.empty() ? "absolute" : "relative";
  if (!reference.empty()) b["reference"] = reference;
  auto jrows = nlohmann::ordered_json::array();
  for (const auto& r : rows) jrows.push_back(report::to_json(r));
  b["rows"] = jrows;
  const auto iv = argmax_volume(rows);
  const auto ii = argmax_i_max(rows);
  b["argmax_volume"] = iv;
  b["argmax_i_max"] = ii;
  const auto vanish = first_vanishing(rows, 1e-5);
  if (vanish) b["first_vanishing_1e-5"] = *vanish;
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  const auto key = [&](const SweepRow& r) { return mode == "noise" ? r.noise : r.params.front(); };
  out << fmt::format("sweep {} over {} ({} points): V peaks at {} = {}, I_max peaks at {} = {}\n", f.name(),
                     mode == "noise" ? "noise" : family_name(family), rows.size(),
                     mode == "noise" ? "noise" : family_name(family), key(rows[iv]),
                     mode == "noise" ? "noise" : family_name(family), key(rows[ii]));
  if (mode == "noise" && vanish) {
    out << fmt::format("first noise with V upper bound < 1e-5: {}\n", rows[*vanish].noise);
  }
  return kExitOk;
}

PhaseAxis axis_key(const Config& cfg, const std::string& key, const std::string& fallback) {
  try {
    return PhaseAxis::parse(cfg.get_string(key, fallback));
  } catch (const Error& e) {
    throw Error(ErrorKind::config_error, fmt::format("{}: key '{}': {}", cfg.source(), key, e.what()));
  }
}

int run_section(const ConfigArgs& a, bool output_given, const std::string& command, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = Config::load(a.config);
  cfg.require_known({"gamma", "resolution", "reading", "axis1", "axis2", "noise", "output"});
  const std::string output = output_given ? a.common.output : cfg.get_string("output", ".");
  const std::vector<double> gammas = cfg.get_list("gamma");
  const int resolution = cfg.get_int("resolution", 512);
  if (resolution < 2) throw Error(ErrorKind::config_error, fmt::format("{}: key 'resolution': must be >= 2", cfg.source()));
  const auto reading_name = lower(cfg.get_string("reading", "bound"));
  SectionReading reading;
  if (reading_name == "bound") {
    reading = SectionReading::bound_j;
  } else if (reading_name == "constant") {
    reading = SectionReading::constant;
  } else {
    throw Error(ErrorKind::config_error,
                fmt::format("{}: key 'reading': expected bound or constant, got '{}'", cfg.source(), reading_name));
  }
  const PhaseAxis ax1 = axis_key(cfg, "axis1", "phi1(0)");
  const PhaseAxis ax2 = axis_key(cfg, "axis2", "varphi2(2)");
  const double noise = cfg.get_double("noise", 0.0);
  const BellFunctional f = BellFunctional::parse("cglmp3");
  const PhaseSettings fixed = section_fixed_point(reading);

  std::vector<SectionGrid> grids;
  for (double g : gammas) grids.push_back(section_2d(make_gamma_qutrit(g, noise), f, fixed, ax1, ax2, resolution));

  const auto dir = prepare_output(output);
  report::CsvTable csv({"gamma", "noise", "axis1", "axis2", "resolution", "reading", "violating_cells", "cells",
                        "area", "area_fraction", "mask_file"});
  const double cells = static_cast<double>(resolution) * resolution;
  std::vector<std::string> mask_files;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const auto name = fmt::format("mask_gamma_{}.rle", report::number(gammas[i]));
    report::write_text((dir / name).string(), report::mask_rle(grids[i]));
    mask_files.push_back(name);
    csv.add_row({report::number(gammas[i]), report::number(noise), ax1.name(), ax2.name(), std::to_string(resolution),
                 reading_name, std::to_string(grids[i].violating_cells),
                 std::to_string(static_cast<std::uint64_t>(cells)), report::number(grids[i].area),
                 report::number(static_cast<double>(grids[i].violating_cells) / cells), name});
  }
  csv.write((dir / "results.csv").string());

  report::Manifest m("section");
  auto& b = m.body();
  b["invocation"] = command;
  b["config"] = cfg.source();
  b["functional"] = f.name();
  b["state"] = {{"family", "gamma"}, {"noise", noise}};
  b["space"] = f.space().describe();
  b["axes"] = {ax1.name(), ax2.name()};
  b["resolution"] = resolution;
  b["reading"] = reading_name;
  b["fixed_point"] = report::to_json(SettingsPoint{fixed});
  auto jsec = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grids.size(); ++i) {
    jsec.push_back({{"gamma", gammas[i]},
                    {"violating_cells", grids[i].violating_cells},
                    {"area", grids[i].area},
                    {"mask_file", mask_files[i]}});
  }
  b["sections"] = jsec;
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  for (std::size_t i = 0; i < grids.size(); ++i) {
    out << fmt::format("gamma = {}: {} of {} cells violate, area {:.6g}", gammas[i], grids[i].violating_cells,
                       static_cast<std::uint64_t>(cells), grids[i].area);
    if (i > 0 && grids[i].violating_cells > 0) {
      out << fmt::format(", area(gamma={})/area = {:.4f}", gammas[0],
                         static_cast<double>(grids[0].violating_cells) / static_cast<double>(grids[i].violating_cells));
    }
    out << "\n";
  }
  return kExitOk;
}

int run_survey(const ConfigArgs& a, bool output_given, bool workers_given, const std::string& command,
               std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Config cfg = Config::load(a.config);
  cfg.require_known({"lambda_grid", "reference", "samples", "seed", "workers", "restarts", "optimizer_seed", "sampling",
                     "output"});
  const auto common = resolve_common(cfg, a.common, output_given, workers_given);
  const std::vector<double> axis = cfg.get_grid("lambda_grid");
  const double reference = cfg.get_double("reference", 0.739);
  const MonteCarloSpec mc = mc_from(cfg, common.workers);
  const OptimizerConfig opt = optimizer_from(cfg, common.workers);
  const BellFunctional f = BellFunctional::parse("cglmp4");

  const SurveyResult s = survey_region(axis, reference, mc, opt);

  const auto dir = prepare_output(common.output);
  report::sweep_table("lambda", f, s.rows, StateFamily::lambda_ququart).write((dir / "results.csv").string());

  report::Manifest m("survey");
  auto& b = m.body();
  b["invocation"] = command;
  b["config"] = cfg.source();
  b["functional"] = f.name();
  b["state"] = {{"family", "lambda"}, {"reference", reference}};
  b["space"] = f.space().describe();
  b["samples"] = mc.samples;
  b["seed"] = mc.seed;
  b["workers"] = mc.workers;
  b["kernel"] = std::string(kernels::isa_name(kernels::default_isa()));
  b["monte_carlo"] = mc_json(mc);
  b["optimizer"] = optimizer_json(opt);
  b["normalization"] = "absolute";
  auto jrows = nlohmann::ordered_json::array();
  for (const auto& r : s.rows) jrows.push_back(report::to_json(r));
  b["rows"] = jrows;
  b["grid_points"] = s.grid_points;
  b["argmax_volume"] = s.argmax;
  if (s.unit_row && s.reference_row) {
    b["volume_ratio"] = s.volume_ratio;
    b["volume_ratio_stderr"] = s.volume_ratio_std_error;
  }
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  const auto& best = s.rows[s.argmax];
  out << fmt::format("survey cglmp4 ({} grid points): V peaks at lambda = ({}, {})\n", s.grid_points,
                     best.params[0], best.params[1]);
  if (s.reference_row) {
    out << fmt::format("I_max at ({0}, {0}) = {1:.6f}\n", reference, s.rows[*s.reference_row].i_max);
  }
  if (s.unit_row && s.reference_row) {
    out << fmt::format("V(1,1)/V({0},{0}) = {1:.4f} +/- {2:.4f}\n", reference, s.volume_ratio,
                       s.volume_ratio_std_error);
  }
  return kExitOk;
}

// ---- calibrate ------------------------------------------------------------

struct CalibrateArgs {
  std::string samples = "1000000";
  std::string seed = "1";
  CommonOptions common;
};

int run_calibrate(const CalibrateArgs& a, const std::string& command, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t samples = to_u64(a.samples, "--samples");
  const std::uint64_t seed = to_u64(a.seed, "--seed");
  if (samples == 0) throw UsageError("--samples: must be at least 1");
  const int workers = resolved_workers(a.common.workers);

  std::vector<CalibrationResult> results;
  for (const auto& region : standard_calibration_regions()) {
    results.push_back(calibrate_estimator(region, samples, seed, workers));
  }

  const auto dir = prepare_output(a.common.output);
  report::CsvTable csv({"region", "space", "samples", "hits", "fraction", "expected", "stderr", "z", "passed"});
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    csv.add_row({r.region.name, r.region.space.describe(), std::to_string(r.estimate.samples),
                 std::to_string(r.estimate.hits), report::number(r.estimate.fraction),
                 report::number(r.region.fraction), report::number(r.estimate.std_error), report::number(r.z_score),
                 r.passed ? "1" : "0"});
  }
  csv.write((dir / "results.csv").string());

  report::Manifest m("calibrate");
  auto& b = m.body();
  b["invocation"] = command;
  b["samples"] = samples;
  b["seed"] = seed;
  b["workers"] = workers;
  auto jr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    auto j = report::to_json(r.estimate);
    j["region"] = r.region.name;
    j["space"] = r.region.space.describe();
    j["expected"] = r.region.fraction;
    j["z"] = r.z_score;
    j["passed"] = r.passed;
    jr.push_back(j);
  }
  b["estimates"] = jr;
  b["wall_time_s"] = seconds_since(t0);
  m.write((dir / "manifest.json").string());

  for (const auto& r : results) {
    out << fmt::format("{:<28} p = {:.6f} expected {:.6f} z = {:+.3f} {}\n", r.region.name, r.estimate.fraction,
                       r.region.fraction, r.z_score, r.passed ? "ok" : "FAIL");
  }
  return all ? kExitOk : kExitFailure;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::arity_mismatch:
    case ErrorKind::unsupported_dimension: return kExitMismatch;
    case ErrorKind::invalid_parameter:
    case ErrorKind::config_error:
    case ErrorKind::undefined_normalization:
    case ErrorKind::index_out_of_range: return kExitUsage;
    case ErrorKind::unsupported_for_mixed: return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace

FamilySpec parse_state_spec(const std::vector<std::string>& tokens) {
  FamilySpec spec;
  bool have_family = false;
  bool have_noise = false;
  for (const auto& token : tokens) {
    for (const auto& part : split(token, "; \t")) {
      const auto eq = part.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == part.size()) {
        throw UsageError(fmt::format("--state: expected key=value, got '{}'", part));
      }
      const auto key = lower(part.substr(0, eq));
      const auto value = part.substr(eq + 1);
      if (key == "noise") {
        if (have_noise) throw UsageError("--state: noise given twice");
        spec.noise = to_double(value, "--state noise");
        have_noise = true;
        continue;
      }
      if (have_family) throw UsageError(fmt::format("--state: more than one family parameter ('{}')", part));
      spec.family = parse_family(key);
      spec.params.clear();
      for (const auto& v : split(value, ",")) spec.params.push_back(to_double(v, "--state " + key));
      if (spec.params.size() != family_arity(spec.family)) {
        throw Error(ErrorKind::arity_mismatch, fmt::format("--state: {} takes {} value(s), got {}", key,
                                                           family_arity(spec.family), spec.params.size()));
      }
      have_family = true;
    }
  }
  if (!have_family) throw UsageError("--state: missing alpha=, gamma= or lambda=");
  try {
    (void)make_state(spec);
  } catch (const Error& e) {
    throw UsageError(fmt::format("--state: {}", e.what()));
  }
  return spec;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volume of violation of Bell inequalities", "bellvol"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("bellvol ") + BELLVOL_VERSION);

  VolumeArgs vol;
  auto* c_vol = app.add_subcommand("volume", "Monte Carlo volume of violation for one state");
  c_vol->add_option("--state", vol.state, "alpha=A | gamma=G | lambda=L1,L2, optionally noise=F")
      ->required()
      ->expected(1, 2);
  c_vol->add_option("--functional", vol.functional, "chsh, bell, i3322, cglmp3 or cglmp4")->required();
  c_vol->add_option("--samples", vol.samples, "Number of sampled settings (accepts 1e7)");
  c_vol->add_option("--seed", vol.seed, "Random stream seed");
  c_vol->add_option("--normalization", vol.normalization, "absolute or relative");
  c_vol->add_option("--normalize-to", vol.normalize_to, "Reference state for relative normalization")->expected(1, 2);
  c_vol->add_option("--margin", vol.margin, "Count I > bound + margin")->check(CLI::NonNegativeNumber);
  add_common(c_vol, vol.common);

  MaximizeArgs mx;
  auto* c_max = app.add_subcommand("maximize", "Maximum of the functional over settings");
  c_max->add_option("--state", mx.state, "State spec as for volume")->required()->expected(1, 2);
  c_max->add_option("--functional", mx.functional, "chsh, bell, i3322, cglmp3 or cglmp4")->required();
  c_max->add_option("--restarts", mx.restarts, "Multi-start count");
  c_max->add_option("--seed", mx.seed, "Seed for the start points");
  c_max->add_option("--max-iterations", mx.max_iterations, "Nelder-Mead iterations per run");
  c_max->add_option("--tolerance", mx.tolerance, "Convergence tolerance");
  add_common(c_max, mx.common);

  ConfigArgs sw, sec, sur;
  auto* c_sweep = app.add_subcommand("sweep", "Parameter or noise sweep from a config file");
  c_sweep->add_option("--config,-c", sw.config, "Config file")->required();
  add_common(c_sweep, sw.common);
  auto* c_section = app.add_subcommand("section", "2-D sections of the CGLMP(3) phase space");
  c_section->add_option("--config,-c", sec.config, "Config file")->required();
  add_common(c_section, sec.common);
  auto* c_survey = app.add_subcommand("survey", "CGLMP(4) survey over (lambda1, lambda2)");
  c_survey->add_option("--config,-c", sur.config, "Config file")->required();
  add_common(c_survey, sur.common);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Estimator self-test on regions of known measure");
  c_cal->add_option("--samples", cal.samples, "Samples per region");
  c_cal->add_option("--seed", cal.seed, "Random stream seed");
  add_common(c_cal, cal.common);

  const std::string command = joined(args);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  try {
    if (c_vol->parsed()) return run_volume(vol, command, out);
    if (c_max->parsed()) return run_maximize(mx, command, out);
    if (c_sweep->parsed()) {
      return run_sweep(sw, given(c_sweep, "--output"), given(c_sweep, "--workers"), command, out);
    }
    if (c_section->parsed()) return run_section(sec, given(c_section, "--output"), command, out);
    if (c_survey->parsed()) {
      return run_survey(sur, given(c_survey, "--output"), given(c_survey, "--workers"), command, out);
    }
    if (c_cal->parsed()) return run_calibrate(cal, command, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bellvol::cli
