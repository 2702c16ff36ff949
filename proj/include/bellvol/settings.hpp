#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bellvol/state.hpp"

namespace bellvol {

/// A unit direction in spherical angles; theta in [0, pi], phi in [0, 2pi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  Vec3 unit() const;
  static Direction from_vector(const Vec3& v);
};

struct DirectionSettings {
  std::vector<Direction> directions;
};

/// Interferometer phases for the CGLMP scenario: two settings per party,
/// one phase per basis state, all in radians.
struct PhaseSettings {
  int d = 0;
  // Row-major [setting][j]; setting 0 is the one labelled 1 in the usual notation.
  std::vector<double> alice;
  std::vector<double> bob;

  static PhaseSettings zeros(int d);
  double& alice_phase(int setting, int j) { return alice[static_cast<std::size_t>(setting * d + j)]; }
  double& bob_phase(int setting, int j) { return bob[static_cast<std::size_t>(setting * d + j)]; }
  double alice_phase(int setting, int j) const { return alice[static_cast<std::size_t>(setting * d + j)]; }
  double bob_phase(int setting, int j) const { return bob[static_cast<std::size_t>(setting * d + j)]; }
};

using SettingsPoint = std::variant<DirectionSettings, PhaseSettings>;

/// The domain X integrated over: a product of unit spheres (solid-angle
/// measure) or a torus of phases (flat measure, period 2pi).
class SettingsSpace {
 public:
  enum class Kind { spheres, torus };

  static SettingsSpace spheres(int count);
  static SettingsSpace torus(int dim);

  Kind kind() const noexcept { return kind_; }
  int count() const noexcept { return count_; }
  /// Number of uniform variates consumed per sample (2 per direction).
  int coordinate_count() const noexcept { return kind_ == Kind::spheres ? 2 * count_ : count_; }
  std::string describe() const;

  bool operator==(const SettingsSpace&) const = default;

 private:
  SettingsSpace(Kind kind, int count) : kind_(kind), count_(count) {}
  Kind kind_;
  int count_;
};

/// (4 pi)^count or (2 pi)^dim.
double space_volume(const SettingsSpace& space);

/// Block-addressable random stream: sample k of block b is global sample
/// b * block_size + k, whatever else is being consumed concurrently.
struct SampleStream {
  std::uint64_t seed = 0;
  std::uint64_t block_index = 0;
  std::uint64_t block_size = 1;

  std::uint64_t first_index() const noexcept { return block_index * block_size; }
};

/// Maps unit uniforms onto a point. Sphere coordinates come in
/// (cos-theta variate, phi variate) pairs; torus coordinates are turns.
SettingsPoint point_from_uniforms(const SettingsSpace& space, std::span<const double> uniforms);

SettingsPoint sample_settings(const SettingsSpace& space, std::uint64_t seed, std::uint64_t index);
SettingsPoint sample_settings(const SettingsSpace& space, const SampleStream& stream,
                              std::uint64_t offset = 0);

/// Flat parameter vectors for the optimizer: (theta, phi) per direction,
/// or alice phases followed by bob phases.
std::vector<double> to_parameters(const SettingsPoint& point);
SettingsPoint point_from_parameters(const SettingsSpace& space, std::span<const double> params);

/// Folds angles back into their fundamental domains.
SettingsPoint canonicalize(const SettingsPoint& point);

double wrap_angle(double x);

}  // namespace bellvol
