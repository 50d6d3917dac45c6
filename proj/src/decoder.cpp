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

#include "examiner/decoder.hpp"

#include <cmath>

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/rng.hpp"

namespace examiner {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<Vector> gaussian_matrix(RngStream& rng, std::size_t rows, std::size_t cols,
                                    double stddev) {
  std::vector<Vector> m(rows, Vector(cols));
  for (auto& row : m) {
    for (auto& v : row) v = stddev * rng.normal();
  }
  return m;
}

}  // namespace

Decoder Decoder::identity(std::size_t dims) {
  if (dims == 0) throw ConfigError("identity decoder: zero dims");
  return Decoder(Identity{dims});
}

Decoder Decoder::affine(std::vector<Vector> matrix, Vector offset) {
  if (matrix.empty() || matrix.front().empty()) throw ConfigError("affine decoder: empty matrix");
  const std::size_t cols = matrix.front().size();
  for (const auto& row : matrix) {
    if (row.size() != cols) throw ConfigError("affine decoder: ragged matrix");
  }
  if (offset.empty()) offset.assign(matrix.size(), 0.0);
  if (offset.size() != matrix.size()) throw ConfigError("affine decoder: offset length mismatch");
  return Decoder(Affine{std::move(matrix), std::move(offset)});
}

Decoder Decoder::random_affine(std::size_t input_dims, std::size_t output_dims,
                               std::uint64_t seed, double scale) {
  if (input_dims == 0 || output_dims == 0) throw ConfigError("affine decoder: zero dims");
  RngStream rng(seed, StreamPurpose::kDecoder, 0);
  auto matrix = gaussian_matrix(rng, output_dims, input_dims,
                                scale / std::sqrt(static_cast<double>(input_dims)));
  Decoder d = affine(std::move(matrix), Vector(output_dims, 0.0));
  d.seeded_affine_spec_ = nlohmann::json{{"kind", "affine"},
                                         {"seed", seed},
                                         {"input_dims", input_dims},
                                         {"output_dims", output_dims},
                                         {"scale", scale}};
  return d;
}

Decoder Decoder::smooth(std::size_t input_dims, std::size_t output_dims, std::uint64_t seed,
                        std::size_t hidden, double scale) {
  if (input_dims == 0 || output_dims == 0 || hidden == 0) {
    throw ConfigError("smooth decoder: zero dims");
  }
  RngStream rng(seed, StreamPurpose::kDecoder, 1);
  Smooth s{seed, input_dims, hidden, output_dims, scale, {}, {}, {}, {}};
  s.w1 = gaussian_matrix(rng, hidden, input_dims, 1.0 / std::sqrt(static_cast<double>(input_dims)));
  s.b1.resize(hidden);
  for (auto& v : s.b1) v = 0.5 * rng.normal();
  s.w2 = gaussian_matrix(rng, output_dims, hidden, 1.0 / std::sqrt(static_cast<double>(hidden)));
  s.b2.resize(output_dims);
  for (auto& v : s.b2) v = 0.1 * rng.normal();
  return Decoder(std::move(s));
}

Decoder Decoder::from_json(const nlohmann::json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "identity") return identity(j.at("dims").get<std::size_t>());
    if (kind == "affine") {
      if (j.contains("matrix")) {
        std::vector<Vector> matrix;
        for (const auto& row : j.at("matrix")) matrix.push_back(json_to_vector(row, "matrix row"));
        Vector offset = j.contains("offset") ? json_to_vector(j.at("offset"), "offset") : Vector{};
        return affine(std::move(matrix), std::move(offset));
      }
      return random_affine(j.at("input_dims").get<std::size_t>(),
                           j.at("output_dims").get<std::size_t>(),
                           j.at("seed").get<std::uint64_t>(), json_value_or(j, "scale", 1.0));
    }
    if (kind == "smooth") {
      return smooth(j.at("input_dims").get<std::size_t>(), j.at("output_dims").get<std::size_t>(),
                    j.at("seed").get<std::uint64_t>(),
                    json_value_or<std::size_t>(j, "hidden", 64), json_value_or(j, "scale", 1.0));
    }
    throw ConfigError("decoder: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("decoder: ") + e.what());
  }
}

Decoder Decoder::load(const std::filesystem::path& path) { return from_json(read_json_file(path)); }

nlohmann::json Decoder::to_json() const {
  if (seeded_affine_spec_) return *seeded_affine_spec_;
  return std::visit(
      Overloaded{
          [](const Identity& d) -> nlohmann::json { return {{"kind", "identity"}, {"dims", d.dims}}; },
          [](const Affine& d) -> nlohmann::json {
            return {{"kind", "affine"}, {"matrix", d.matrix}, {"offset", d.offset}};
          },
          [](const Smooth& d) -> nlohmann::json {
            return {{"kind", "smooth"},     {"seed", d.seed},     {"input_dims", d.input_dims},
                    {"hidden", d.hidden},   {"scale", d.scale},   {"output_dims", d.output_dims}};
          }},
      kind_);
}

std::size_t Decoder::input_dims() const {
  return std::visit(Overloaded{[](const Identity& d) { return d.dims; },
                               [](const Affine& d) { return d.matrix.front().size(); },
                               [](const Smooth& d) { return d.input_dims; }},
                    kind_);
}

std::size_t Decoder::output_dims() const {
  return std::visit(Overloaded{[](const Identity& d) { return d.dims; },
                               [](const Affine& d) { return d.matrix.size(); },
                               [](const Smooth& d) { return d.output_dims; }},
                    kind_);
}

Pose Decoder::decode(const LatentVector& z) const {
  if (z.size() != input_dims()) {
    throw ConfigError("decode: latent has " + std::to_string(z.size()) +
                      " dims, decoder expects " + std::to_string(input_dims()));
  }
  return std::visit(
      Overloaded{[&](const Identity&) { return Pose{z.values}; },
                 [&](const Affine& d) {
                   Pose p{d.offset};
                   for (std::size_t r = 0; r < d.matrix.size(); ++r) {
                     for (std::size_t c = 0; c < z.size(); ++c) {
                       p.angles[r] += d.matrix[r][c] * z.values[c];
                     }
                   }
                   return p;
                 },
                 [&](const Smooth& d) {
                   Vector h(d.hidden);
                   for (std::size_t r = 0; r < d.hidden; ++r) {
                     double acc = d.b1[r];
                     for (std::size_t c = 0; c < d.input_dims; ++c) acc += d.w1[r][c] * z.values[c];
                     h[r] = std::tanh(acc);
                   }
                   Pose p{Vector(d.output_dims)};
                   for (std::size_t r = 0; r < d.output_dims; ++r) {
                     double acc = d.b2[r];
                     for (std::size_t c = 0; c < d.hidden; ++c) acc += d.w2[r][c] * h[c];
                     p.angles[r] = d.scale * acc;
                   }
                   return p;
                 }},
      kind_);
}

Pose decode(const Decoder& decoder, const LatentVector& z) { return decoder.decode(z); }

}  // namespace examiner
