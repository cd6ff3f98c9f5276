#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace t2h {

struct ImageShape {
  int width = 0;
  int height = 0;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

/// Row-major RGB image, channels interleaved, each channel in [0,1].
class RgbImage {
 public:
  RgbImage() = default;
  explicit RgbImage(ImageShape shape, double fill = 0.0);
  RgbImage(ImageShape shape, std::vector<double> channels);

  /// 8-bit interleaved RGB, divided by 255 on ingestion.
  static RgbImage from_rgb8(std::span<const std::uint8_t> bytes, ImageShape shape);
  std::vector<std::uint8_t> to_rgb8() const;

  ImageShape shape() const noexcept { return shape_; }
  int width() const noexcept { return shape_.width; }
  int height() const noexcept { return shape_.height; }
  std::size_t pixel_count() const noexcept { return shape_.pixel_count(); }

  double& at(std::size_t pixel, int channel) { return data_[3 * pixel + static_cast<std::size_t>(channel)]; }
  double at(std::size_t pixel, int channel) const {
    return data_[3 * pixel + static_cast<std::size_t>(channel)];
  }

  std::span<const double> channels() const noexcept { return data_; }
  std::span<double> channels() noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  ImageShape shape_;
  std::vector<double> data_;
};

class GrayImage {
 public:
  GrayImage() = default;
  explicit GrayImage(ImageShape shape, double fill = 0.0);
  GrayImage(ImageShape shape, std::vector<double> values);

  ImageShape shape() const noexcept { return shape_; }
  std::size_t pixel_count() const noexcept { return shape_.pixel_count(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  double max() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  ImageShape shape_;
  std::vector<double> values_;
};

class BinaryImage {
 public:
  BinaryImage() = default;
  explicit BinaryImage(ImageShape shape, bool fill = false);
  BinaryImage(ImageShape shape, std::vector<std::uint8_t> bits);

  ImageShape shape() const noexcept { return shape_; }
  std::size_t pixel_count() const noexcept { return shape_.pixel_count(); }
  std::uint8_t& operator[](std::size_t i) { return bits_[i]; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  ImageShape shape_;
  std::vector<std::uint8_t> bits_;
};

/// One camera image from one gel sensor (sensor_id 1 or 2) at one tick.
struct TactileFrame {
  int sensor_id = 1;
  std::uint64_t tick = 0;
  RgbImage image;
};

}  // namespace t2h
