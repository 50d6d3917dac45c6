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

#include <cmath>

#include "doctest.h"
#include "examiner/decoder.hpp"
#include "examiner/errors.hpp"

using namespace examiner;

TEST_CASE("identity decoder") {
  const auto d = Decoder::identity(2);
  CHECK(d.decode(LatentVector{{0.1, -0.2}}).angles == Vector{0.1, -0.2});
  CHECK_THROWS_AS(d.decode(LatentVector{{0.1}}), ConfigError);
}

TEST_CASE("affine decoder scales") {
  const auto d = Decoder::affine({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}, {0, 0, 0});
  CHECK(d.decode(LatentVector{{0.5, 0.5, 0.5}}).angles == Vector{1.0, 1.0, 1.0});
  const auto shifted = Decoder::affine({{1, 0}, {0, 1}, {1, 1}}, {0.5, 0, -1});
  CHECK(shifted.decode(LatentVector{{1, 2}}).angles == Vector{1.5, 2.0, 2.0});
  CHECK(shifted.input_dims() == 2);
  CHECK(shifted.output_dims() == 3);
}

TEST_CASE("affine decoder validation") {
  CHECK_THROWS_AS(Decoder::affine({}, {}), ConfigError);
  CHECK_THROWS_AS(Decoder::affine({{1, 0}, {1}}, {}), ConfigError);
  CHECK_THROWS_AS(Decoder::affine({{1, 0}}, {1, 2}), ConfigError);
}

TEST_CASE("smooth decoder regression fixture at z = 0") {
  const auto d = Decoder::smooth(4, 6, 7, 8, 1.0);
  const Vector expected{-0.27123342911776671, -0.05273099992893595, -0.49497551243509391,
                        0.19525605914514371,  -0.13053930947034537, -0.31909933463909046};
  const auto p = d.decode(LatentVector{Vector(4, 0.0)});
  REQUIRE(p.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(p.angles[i] == expected[i]);
}

TEST_CASE("smooth decoder is a pure function of its definition") {
  const auto a = Decoder::smooth(3, 5, 11);
  const auto b = Decoder::from_json(a.to_json());
  const LatentVector z{{0.3, -1.2, 0.7}};
  CHECK(a.decode(z) == b.decode(z));
  CHECK(a.decode(z) == a.decode(z));
  CHECK_FALSE(Decoder::smooth(3, 5, 12).decode(z) == a.decode(z));
  // Bounded by scale * (sum |W2| + |b2|); in particular finite far from zero.
  for (double v : a.decode(LatentVector{{100, -100, 100}}).angles) CHECK(std::isfinite(v));
}

TEST_CASE("seeded affine serializes as its seed") {
  const auto d = Decoder::random_affine(3, 4, 5, 0.5);
  const auto j = d.to_json();
  CHECK(j.at("seed") == 5);
  CHECK(Decoder::from_json(j).decode(LatentVector{{1, 2, 3}}) == d.decode(LatentVector{{1, 2, 3}}));
}

TEST_CASE("decoder json errors") {
  CHECK_THROWS_AS(Decoder::from_json({{"kind", "vae"}}), ConfigError);
  CHECK_THROWS_AS(Decoder::from_json({{"dims", 3}}), ConfigError);
  CHECK(Decoder::from_json({{"kind", "identity"}, {"dims", 3}}).output_dims() == 3);
}
