#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bellvol/experiments.hpp"
#include "bellvol/optimizer.hpp"
#include "bellvol/settings.hpp"
#include "bellvol/volume.hpp"

namespace bellvol::report {

inline constexpr int kManifestSchemaVersion = 1;

/// Shortest round-trip decimal; refuses NaN and infinities.
std::string number(double x);

/// RFC 4180 table with a header row and '\n' line ends.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::size_t size() const { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& cell);

nlohmann::ordered_json to_json(const VolumeEstimate& e);
nlohmann::ordered_json to_json(const SettingsPoint& x);
nlohmann::ordered_json to_json(const MaxResult& r);
nlohmann::ordered_json to_json(const SweepRow& row);

/// Human-readable state label, e.g. "gamma=0.792" or "lambda=1;1".
std::string state_label(StateFamily family, const std::vector<double>& params, double noise);

/// Header and row layout shared by sweep and survey CSVs.
CsvTable sweep_table(const std::string& family, const BellFunctional& f, const std::vector<SweepRow>& rows,
                     StateFamily state_family);

/// Provenance record. Serialization is canonical (ordered keys, 2-space
/// indent, trailing newline), so serialize(parse(s)) == s.
class Manifest {
 public:
  explicit Manifest(const std::string& command);

  nlohmann::ordered_json& body() { return body_; }
  const nlohmann::ordered_json& body() const { return body_; }

  std::string serialize() const;
  static Manifest parse(const std::string& text);
  void write(const std::string& path) const;

 private:
  Manifest() = default;
  nlohmann::ordered_json body_;
};

/// Run-length encoding of a section mask, one line per row: "v:n v:n ...".
std::string mask_rle(const SectionGrid& grid);
/// Plain 0/1 grid, one line per row.
std::string mask_text(const SectionGrid& grid);

void write_text(const std::string& path, const std::string& text);

}  // namespace bellvol::report
