#include "t2h/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "t2h/errors.hpp"

namespace t2h {
namespace {

void check_shape(ImageShape shape) {
  if (shape.width < 0 || shape.height < 0) {
    throw ShapeError("negative image dimensions");
  }
}

void check_unit_range(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ArgumentError(std::string(what) + " value outside [0,1]");
    }
  }
}

}  // namespace

RgbImage::RgbImage(ImageShape shape, double fill) : shape_(shape) {
  check_shape(shape);
  data_.assign(3 * shape.pixel_count(), fill);
}

RgbImage::RgbImage(ImageShape shape, std::vector<double> channels)
    : shape_(shape), data_(std::move(channels)) {
  check_shape(shape);
  if (data_.size() != 3 * shape.pixel_count()) {
    throw ShapeError("RGB buffer length does not match " + std::to_string(shape.width) + "x" +
                     std::to_string(shape.height));
  }
  check_unit_range(data_, "RGB channel");
}

RgbImage RgbImage::from_rgb8(std::span<const std::uint8_t> bytes, ImageShape shape) {
  check_shape(shape);
  if (bytes.size() != 3 * shape.pixel_count()) {
    throw ShapeError("rgb8 buffer has " + std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(3 * shape.pixel_count()));
  }
  std::vector<double> channels(bytes.size());
  std::transform(bytes.begin(), bytes.end(), channels.begin(),
                 [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
  return RgbImage(shape, std::move(channels));
}

std::vector<std::uint8_t> RgbImage::to_rgb8() const {
  std::vector<std::uint8_t> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  });
  return out;
}

GrayImage::GrayImage(ImageShape shape, double fill) : shape_(shape) {
  check_shape(shape);
  values_.assign(shape.pixel_count(), fill);
}

GrayImage::GrayImage(ImageShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  check_shape(shape);
  if (values_.size() != shape.pixel_count()) {
    throw ShapeError("gray buffer length does not match image dimensions");
  }
  check_unit_range(values_, "gray");
}

double GrayImage::max() const {
  if (values_.empty()) return 0.0;
  return *std::max_element(values_.begin(), values_.end());
}

BinaryImage::BinaryImage(ImageShape shape, bool fill) : shape_(shape) {
  check_shape(shape);
  bits_.assign(shape.pixel_count(), fill ? 1 : 0);
}

BinaryImage::BinaryImage(ImageShape shape, std::vector<std::uint8_t> bits)
    : shape_(shape), bits_(std::move(bits)) {
  check_shape(shape);
  if (bits_.size() != shape.pixel_count()) {
    throw ShapeError("binary buffer length does not match image dimensions");
  }
  for (auto b : bits_) {
    if (b > 1) throw ArgumentError("binary image bit must be 0 or 1");
  }
}

std::size_t BinaryImage::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

}  // namespace t2h
