#pragma once

// Seeded random inputs for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "t2h/command_mapper.hpp"
#include "t2h/image.hpp"

namespace t2h::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

RgbImage random_rgb(Rng& rng, ImageShape shape);
GrayImage random_gray(Rng& rng, ImageShape shape);
BinaryImage random_binary(Rng& rng, ImageShape shape, double density);

/// reference + uniform noise in [-amplitude, amplitude] per channel, clamped.
RgbImage noisy_copy(Rng& rng, const RgbImage& reference, double amplitude);

/// Smooth colour gradient with every channel inside [0.2, 0.8].
RgbImage gradient_image(ImageShape shape);

PlainRgb to_plain(const RgbImage& image);
std::vector<std::uint8_t> to_bits(const BinaryImage& image);

command::ControllerInput random_input(Rng& rng, double speed_scale);

}  // namespace t2h::testing
