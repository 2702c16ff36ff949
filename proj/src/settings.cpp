#include "bellvol/settings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "bellvol/philox.hpp"

namespace bellvol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod can land exactly on 2pi after the shift for tiny negative inputs.
  return r >= kTwoPi ? 0.0 : r;
}

Vec3 Direction::unit() const {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Direction Direction::from_vector(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(n > 0.0)) throw Error(ErrorKind::invalid_parameter, "zero direction vector");
  const double z = std::clamp(v[2] / n, -1.0, 1.0);
  return {std::acos(z), wrap_angle(std::atan2(v[1], v[0]))};
}

PhaseSettings PhaseSettings::zeros(int d) {
  PhaseSettings p;
  p.d = d;
  p.alice.assign(static_cast<std::size_t>(2 * d), 0.0);
  p.bob.assign(static_cast<std::size_t>(2 * d), 0.0);
  return p;
}

SettingsSpace SettingsSpace::spheres(int count) {
  if (count <= 0) throw Error(ErrorKind::invalid_parameter, "sphere count must be positive");
  return {Kind::spheres, count};
}

SettingsSpace SettingsSpace::torus(int dim) {
  if (dim <= 0) throw Error(ErrorKind::invalid_parameter, "torus dimension must be positive");
  return {Kind::torus, dim};
}

std::string SettingsSpace::describe() const {
  return kind_ == Kind::spheres ? fmt::format("spheres({})", count_) : fmt::format("torus({})", count_);
}

double space_volume(const SettingsSpace& space) {
  const double unit = space.kind() == SettingsSpace::Kind::spheres ? 4.0 * std::numbers::pi : kTwoPi;
  return std::pow(unit, space.count());
}

SettingsPoint point_from_uniforms(const SettingsSpace& space, std::span<const double> u) {
  if (static_cast<int>(u.size()) != space.coordinate_count()) {
    throw Error(ErrorKind::arity_mismatch,
                fmt::format("{} needs {} coordinates, got {}", space.describe(),
                            space.coordinate_count(), u.size()));
  }
  if (space.kind() == SettingsSpace::Kind::spheres) {
    DirectionSettings out;
    out.directions.reserve(static_cast<std::size_t>(space.count()));
    for (int i = 0; i < space.count(); ++i) {
      const double cos_theta = 2.0 * u[2 * i] - 1.0;
      out.directions.push_back({std::acos(cos_theta), kTwoPi * u[2 * i + 1]});
    }
    return out;
  }
  if (space.count() % 4 != 0) {
    throw Error(ErrorKind::arity_mismatch,
                fmt::format("torus({}) is not a two-setting phase space", space.count()));
  }
  const int d = space.count() / 4;
  auto out = PhaseSettings::zeros(d);
  for (int i = 0; i < 2 * d; ++i) {
    out.alice[i] = kTwoPi * u[i];
    out.bob[i] = kTwoPi * u[2 * d + i];
  }
  return out;
}

SettingsPoint sample_settings(const SettingsSpace& space, std::uint64_t seed, std::uint64_t index) {
  std::vector<double> u(static_cast<std::size_t>(space.coordinate_count()));
  for (std::size_t c = 0; c < u.size(); ++c) {
    u[c] = uniform_coordinate(seed, index, static_cast<std::uint32_t>(c));
  }
  return point_from_uniforms(space, u);
}

SettingsPoint sample_settings(const SettingsSpace& space, const SampleStream& stream,
                              std::uint64_t offset) {
  if (offset >= stream.block_size) {
    throw Error(ErrorKind::index_out_of_range, "offset beyond the end of the sample block");
  }
  return sample_settings(space, stream.seed, stream.first_index() + offset);
}

std::vector<double> to_parameters(const SettingsPoint& point) {
  std::vector<double> out;
  if (const auto* dirs = std::get_if<DirectionSettings>(&point)) {
    for (const auto& d : dirs->directions) {
      out.push_back(d.theta);
      out.push_back(d.phi);
    }
  } else {
    const auto& ph = std::get<PhaseSettings>(point);
    out.insert(out.end(), ph.alice.begin(), ph.alice.end());
    out.insert(out.end(), ph.bob.begin(), ph.bob.end());
  }
  return out;
}

SettingsPoint point_from_parameters(const SettingsSpace& space, std::span<const double> p) {
  if (space.kind() == SettingsSpace::Kind::spheres) {
    if (static_cast<int>(p.size()) != 2 * space.count()) {
      throw Error(ErrorKind::arity_mismatch, "parameter count does not match the sphere space");
    }
    DirectionSettings out;
    for (int i = 0; i < space.count(); ++i) out.directions.push_back({p[2 * i], p[2 * i + 1]});
    return out;
  }
  if (static_cast<int>(p.size()) != space.count() || space.count() % 4 != 0) {
    throw Error(ErrorKind::arity_mismatch, "parameter count does not match the phase space");
  }
  const int d = space.count() / 4;
  auto out = PhaseSettings::zeros(d);
  for (int i = 0; i < 2 * d; ++i) {
    out.alice[i] = p[i];
    out.bob[i] = p[2 * d + i];
  }
  return out;
}

SettingsPoint canonicalize(const SettingsPoint& point) {
  if (const auto* dirs = std::get_if<DirectionSettings>(&point)) {
    DirectionSettings out;
    for (const auto& d : dirs->directions) out.directions.push_back(Direction::from_vector(d.unit()));
    return out;
  }
  auto out = std::get<PhaseSettings>(point);
  for (double& x : out.alice) x = wrap_angle(x);
  for (double& x : out.bob) x = wrap_angle(x);
  return out;
}

}  // namespace bellvol
