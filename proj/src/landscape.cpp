/* Copyright 2026 The Examiner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "examiner/landscape.hpp"

#include <cmath>
#include <limits>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"

namespace examiner {

SyntheticLandscape::SyntheticLandscape(double baseline, std::vector<Bump> bumps,
                                       double err2d_ratio, bool trainable, double damping,
                                       double train_radius)
    : baseline_(baseline),
      bumps_(std::move(bumps)),
      err2d_ratio_(err2d_ratio),
      trainable_(trainable),
      damping_(damping),
      train_radius_(train_radius) {
  if (!std::isfinite(baseline_) || baseline_ < 0) throw ConfigError("landscape: baseline must be >= 0");
  if (!(err2d_ratio_ > 0)) throw ConfigError("landscape: err2d_ratio must be > 0");
  if (!(damping_ >= 0 && damping_ <= 1)) throw ConfigError("landscape: damping must be in [0, 1]");
  if (!(train_radius_ > 0)) throw ConfigError("landscape: train_radius must be > 0");
  for (const auto& b : bumps_) {
    if (!(b.amplitude > 0) || !(b.width > 0)) {
      throw ConfigError("landscape: bump amplitude and width must be > 0");
    }
    if (b.center.empty()) throw ConfigError("landscape: bump center is empty");
    if (dims_ == 0) dims_ = b.center.size();
    if (b.center.size() != dims_) throw ConfigError("landscape: bump centers differ in length");
  }
}

SyntheticLandscape SyntheticLandscape::constant(double value) {
  return SyntheticLandscape(value, {});
}

SyntheticLandscape SyntheticLandscape::from_json(const nlohmann::json& j) {
  try {
    std::vector<Bump> bumps;
    if (j.contains("bumps")) {
      for (const auto& b : j.at("bumps")) {
        bumps.push_back({json_to_vector(b.at("center"), "bump center"),
                         b.at("amplitude").get<double>(), b.at("width").get<double>()});
      }
    }
    return SyntheticLandscape(j.at("baseline").get<double>(), std::move(bumps),
                              json_value_or(j, "err2d_ratio", 1.0),
                              json_value_or(j, "trainable", false),
                              json_value_or(j, "damping", 0.5),
                              json_value_or(j, "train_radius", 2.0));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("landscape: ") + e.what());
  }
}

SyntheticLandscape SyntheticLandscape::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

nlohmann::json SyntheticLandscape::to_json() const {
  nlohmann::json bumps = nlohmann::json::array();
  for (const auto& b : bumps_) {
    bumps.push_back({{"center", b.center}, {"amplitude", b.amplitude}, {"width", b.width}});
  }
  return {{"baseline", baseline_},       {"bumps", bumps},       {"err2d_ratio", err2d_ratio_},
          {"trainable", trainable_},     {"damping", damping_},  {"train_radius", train_radius_}};
}

double SyntheticLandscape::err_3d(const Pose& pose) const {
  if (dims_ != 0 && pose.size() != dims_) {
    throw ConfigError("landscape: pose has " + std::to_string(pose.size()) + " dims, expected " +
                      std::to_string(dims_));
  }
  double err = baseline_;
  for (const auto& b : bumps_) {
    double sq = 0.0;
    for (std::size_t i = 0; i < dims_; ++i) {
      const double d = pose.angles[i] - b.center[i];
      sq += d * d;
    }
    err += b.amplitude * std::exp(-sq / (2.0 * b.width * b.width));
  }
  return err;
}

EvalResult SyntheticLandscape::evaluate(const Pose& pose) const {
  const double e3 = err_3d(pose);
  return {err2d_ratio_ * e3, e3};
}

std::size_t SyntheticLandscape::damp(std::span<const Pose> samples) {
  std::size_t damped = 0;
  for (auto& b : bumps_) {
    const double reach = train_radius_ * b.width;
    for (const auto& p : samples) {
      if (p.size() != dims_) continue;
      double sq = 0.0;
      for (std::size_t i = 0; i < dims_; ++i) {
        const double d = p.angles[i] - b.center[i];
        sq += d * d;
      }
      if (sq <= reach * reach) {
        b.amplitude *= damping_;
        ++damped;
        break;
      }
    }
  }
  return damped;
}

std::string SyntheticLandscape::identity() const {
  return "synthetic-landscape:" + sha256_hex(canonical_dump(to_json())).substr(0, 16);
}

double bump_threshold_radius(double baseline, double amplitude, double width,
                             double threshold) {
  if (baseline + amplitude <= threshold) return 0.0;
  if (threshold <= baseline) return std::numeric_limits<double>::infinity();
  return width * std::sqrt(2.0 * std::log(amplitude / (threshold - baseline)));
}

}  // namespace examiner
