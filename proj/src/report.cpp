#include "bellvol/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bellvol/error.hpp"

#ifndef BELLVOL_VERSION
#define BELLVOL_VERSION "0.0.0"
#endif

namespace bellvol::report {

std::string number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::invalid_parameter, "refusing to serialize a non-finite number");
  return fmt::format("{}", x);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw Error(ErrorKind::invalid_parameter,
                fmt::format("CSV row has {} cells, header has {}", cells.size(), header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i != 0) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config_error, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw Error(ErrorKind::config_error, fmt::format("write to '{}' failed", path));
}

namespace {

// Guard every double that goes into a manifest.
double finite(double x) {
  (void)number(x);
  return x;
}

}  // namespace

nlohmann::ordered_json to_json(const VolumeEstimate& e) {
  nlohmann::ordered_json j;
  j["hits"] = e.hits;
  j["samples"] = e.samples;
  j["fraction"] = finite(e.fraction);
  j["stderr"] = finite(e.std_error);
  j["ci95"] = {finite(e.ci_low), finite(e.ci_high)};
  j["normalization"] = e.normalization == NormalizationMode::absolute ? "absolute" : "relative";
  if (e.normalization == NormalizationMode::relative) {
    j["reference"] = e.reference_label;
    j["reference_fraction"] = finite(e.reference_fraction);
  }
  j["value"] = finite(e.value);
  j["value_stderr"] = finite(e.value_std_error);
  return j;
}

nlohmann::ordered_json to_json(const SettingsPoint& x) {
  nlohmann::ordered_json j;
  if (const auto* dirs = std::get_if<DirectionSettings>(&x)) {
    j["kind"] = "directions";
    auto arr = nlohmann::ordered_json::array();
    for (const auto& d : dirs->directions) {
      arr.push_back({{"theta", finite(d.theta)}, {"phi", finite(d.phi)}});
    }
    j["directions"] = arr;
  } else {
    const auto& ph = std::get<PhaseSettings>(x);
    j["kind"] = "phases";
    j["d"] = ph.d;
    for (int s = 0; s < 2; ++s) {
      auto a = nlohmann::ordered_json::array();
      auto b = nlohmann::ordered_json::array();
      for (int k = 0; k < ph.d; ++k) {
        a.push_back(finite(ph.alice_phase(s, k)));
        b.push_back(finite(ph.bob_phase(s, k)));
      }
      j[fmt::format("phi{}", s + 1)] = a;
      j[fmt::format("varphi{}", s + 1)] = b;
    }
  }
  return j;
}

nlohmann::ordered_json to_json(const MaxResult& r) {
  nlohmann::ordered_json j;
  j["value"] = finite(r.value);
  j["argmax"] = to_json(r.argmax);
  j["restarts_agreeing"] = r.restarts_agreeing;
  j["restarts"] = r.restart_values.size();
  j["low_confidence"] = r.low_confidence();
  j["evaluations"] = r.evaluations;
  return j;
}

nlohmann::ordered_json to_json(const SweepRow& row) {
  nlohmann::ordered_json j;
  auto params = nlohmann::ordered_json::array();
  for (double p : row.params) params.push_back(finite(p));
  j["params"] = params;
  j["noise"] = finite(row.noise);
  j["entanglement_kind"] = row.entanglement_kind;
  j["entanglement"] = finite(row.entanglement);
  j["entanglement_norm"] = finite(row.entanglement_norm);
  j["i_max"] = finite(row.i_max);
  j["volume"] = to_json(row.volume);
  return j;
}

std::string state_label(StateFamily family, const std::vector<double>& params, double noise) {
  std::string out;
  switch (family) {
    case StateFamily::alpha_qubit: out = "alpha=" + number(params.at(0)); break;
    case StateFamily::gamma_qutrit: out = "gamma=" + number(params.at(0)); break;
    case StateFamily::lambda_ququart:
      out = "lambda=" + number(params.at(0)) + ";" + number(params.at(1));
      break;
  }
  if (noise != 0.0) out += ";noise=" + number(noise);
  return out;
}

CsvTable sweep_table(const std::string& family, const BellFunctional& f, const std::vector<SweepRow>& rows,
                     StateFamily state_family) {
  CsvTable t({"state_params", "family", "param1", "param2", "noise", "entanglement_kind", "entanglement",
              "entanglement_norm", "i_max", "functional", "samples", "hits", "fraction", "stderr", "ci_low",
              "ci_high", "value", "value_stderr"});
  for (const auto& r : rows) {
    t.add_row({state_label(state_family, r.params, r.noise), family, number(r.params.at(0)),
               r.params.size() > 1 ? number(r.params[1]) : std::string{}, number(r.noise), r.entanglement_kind,
               number(r.entanglement), number(r.entanglement_norm), number(r.i_max), f.name(),
               std::to_string(r.volume.samples), std::to_string(r.volume.hits), number(r.volume.fraction),
               number(r.volume.std_error), number(r.volume.ci_low), number(r.volume.ci_high),
               number(r.volume.value), number(r.volume.value_std_error)});
  }
  return t;
}

Manifest::Manifest(const std::string& command) {
  body_["schema_version"] = kManifestSchemaVersion;
  body_["tool"] = "bellvol";
  body_["version"] = BELLVOL_VERSION;
  body_["command"] = command;
}

std::string Manifest::serialize() const { return body_.dump(2) + "\n"; }

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  try {
    m.body_ = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_error, fmt::format("manifest is not valid JSON: {}", e.what()));
  }
  if (!m.body_.is_object() || !m.body_.contains("schema_version") || !m.body_["schema_version"].is_number_integer()) {
    throw Error(ErrorKind::config_error, "manifest lacks an integer schema_version");
  }
  if (m.body_["schema_version"].get<int>() > kManifestSchemaVersion) {
    throw Error(ErrorKind::config_error, "manifest schema_version is newer than this tool");
  }
  return m;
}

void Manifest::write(const std::string& path) const { write_text(path, serialize()); }

std::string mask_rle(const SectionGrid& grid) {
  std::string out;
  for (int i = 0; i < grid.resolution; ++i) {
    int j = 0;
    bool first = true;
    while (j < grid.resolution) {
      const bool v = grid.at(i, j);
      int n = 0;
      while (j < grid.resolution && grid.at(i, j) == v) {
        ++j;
        ++n;
      }
      if (!first) out += ' ';
      out += fmt::format("{}:{}", v ? 1 : 0, n);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string mask_text(const SectionGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.resolution) * (grid.resolution + 1));
  for (int i = 0; i < grid.resolution; ++i) {
    for (int j = 0; j < grid.resolution; ++j) out += grid.at(i, j) ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace bellvol::report
