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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "examiner/param_space.hpp"
#include "json.hpp"

namespace examiner {

// Deterministic latent-to-pose map. Three kinds:
//   identity  pose = z
//   affine    pose = A z + offset
//   smooth    pose = scale * (W2 tanh(W1 z + b1) + b2), weights drawn from a seed
class Decoder {
 public:
  struct Identity {
    std::size_t dims;
  };
  struct Affine {
    std::vector<Vector> matrix;  // output_dims rows of input_dims
    Vector offset;
  };
  struct Smooth {
    std::uint64_t seed;
    std::size_t input_dims;
    std::size_t hidden;
    std::size_t output_dims;
    double scale;
    std::vector<Vector> w1;  // hidden x input
    Vector b1;
    std::vector<Vector> w2;  // output x hidden
    Vector b2;
  };

  static Decoder identity(std::size_t dims);
  static Decoder affine(std::vector<Vector> matrix, Vector offset);
  // Affine map with entries drawn from N(0, scale^2 / input_dims).
  static Decoder random_affine(std::size_t input_dims, std::size_t output_dims,
                               std::uint64_t seed, double scale = 1.0);
  static Decoder smooth(std::size_t input_dims, std::size_t output_dims, std::uint64_t seed,
                        std::size_t hidden = 64, double scale = 1.0);

  static Decoder from_json(const nlohmann::json& j);
  static Decoder load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::size_t input_dims() const;
  std::size_t output_dims() const;

  Pose decode(const LatentVector& z) const;

 private:
  explicit Decoder(std::variant<Identity, Affine, Smooth> kind) : kind_(std::move(kind)) {}
  std::variant<Identity, Affine, Smooth> kind_;
  // Set when a seeded affine decoder should serialize as its seed.
  std::optional<nlohmann::json> seeded_affine_spec_;
};

Pose decode(const Decoder& decoder, const LatentVector& z);

}  // namespace examiner
