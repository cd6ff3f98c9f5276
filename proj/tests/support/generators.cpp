#include "generators.hpp"

#include <algorithm>
#include <cmath>

namespace t2h::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

RgbImage random_rgb(Rng& rng, ImageShape shape) {
  std::vector<double> v(3 * shape.pixel_count());
  for (auto& x : v) x = uniform(rng, 0.0, 1.0);
  return RgbImage(shape, std::move(v));
}

GrayImage random_gray(Rng& rng, ImageShape shape) {
  std::vector<double> v(shape.pixel_count());
  for (auto& x : v) x = uniform(rng, 0.0, 1.0);
  return GrayImage(shape, std::move(v));
}

BinaryImage random_binary(Rng& rng, ImageShape shape, double density) {
  std::bernoulli_distribution bit(density);
  std::vector<std::uint8_t> v(shape.pixel_count());
  for (auto& x : v) x = bit(rng) ? 1 : 0;
  return BinaryImage(shape, std::move(v));
}

RgbImage noisy_copy(Rng& rng, const RgbImage& reference, double amplitude) {
  RgbImage out = reference;
  for (auto& x : out.channels()) x = std::clamp(x + uniform(rng, -amplitude, amplitude), 0.0, 1.0);
  return out;
}

RgbImage gradient_image(ImageShape shape) {
  RgbImage out(shape);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      const auto p = static_cast<std::size_t>(y * shape.width + x);
      const double u = shape.width > 1 ? static_cast<double>(x) / (shape.width - 1) : 0.0;
      const double v = shape.height > 1 ? static_cast<double>(y) / (shape.height - 1) : 0.0;
      out.at(p, 0) = 0.2 + 0.6 * u;
      out.at(p, 1) = 0.5 + 0.3 * std::sin(3.0 * v);
      out.at(p, 2) = 0.8 - 0.6 * v;
    }
  }
  return out;
}

PlainRgb to_plain(const RgbImage& image) {
  return {image.width(), image.height(), std::vector<double>(image.channels().begin(), image.channels().end())};
}

std::vector<std::uint8_t> to_bits(const BinaryImage& image) {
  return std::vector<std::uint8_t>(image.bits().begin(), image.bits().end());
}

command::ControllerInput random_input(Rng& rng, double speed_scale) {
  command::ControllerInput in;
  for (auto& v : in.linear_velocity) v = uniform(rng, -speed_scale, speed_scale);
  for (auto& v : in.angular_velocity) v = uniform(rng, -10.0 * speed_scale, 10.0 * speed_scale);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(0.2);
  in.button_a = coin(rng);
  in.button_b = rare(rng);
  in.back_trigger = rare(rng);
  in.side_trigger = rare(rng);
  return in;
}

}  // namespace t2h::testing
