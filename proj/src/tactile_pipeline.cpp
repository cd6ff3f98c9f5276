#include "t2h/tactile_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "t2h/errors.hpp"

namespace t2h::tactile {
namespace {

std::string shape_text(ImageShape s) {
  return std::to_string(s.width) + "x" + std::to_string(s.height);
}

void require_same_shape(ImageShape a, ImageShape b, const char* context) {
  if (a != b) {
    throw ShapeError(std::string(context) + ": " + shape_text(a) + " vs " + shape_text(b));
  }
}

}  // namespace

FrameWindow::FrameWindow(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ArgumentError("window length must be >= 1");
}

void FrameWindow::push(BinaryImage image) {
  if (!entries_.empty()) require_same_shape(entries_.front().shape(), image.shape(), "window push");
  entries_.push_back(std::move(image));
  while (entries_.size() > static_cast<std::size_t>(capacity_ - 1)) entries_.pop_front();
}

RgbImage pixel_abs_diff(const RgbImage& frame, const RgbImage& reference) {
  require_same_shape(frame.shape(), reference.shape(), "pixel_abs_diff");
  auto a = frame.channels();
  auto b = reference.channels();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::fabs(a[i] - b[i]);
  return RgbImage(frame.shape(), std::move(out));
}

GrayImage average_channels(const RgbImage& image) {
  std::vector<double> out(image.pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = (image.at(p, 0) + image.at(p, 1) + image.at(p, 2)) / 3.0;
  }
  return GrayImage(image.shape(), std::move(out));
}

BinaryImage binarize(const GrayImage& gray, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ArgumentError("binarize threshold outside [0,1]");
  }
  std::vector<std::uint8_t> bits(gray.pixel_count());
  for (std::size_t p = 0; p < bits.size(); ++p) bits[p] = gray[p] >= threshold ? 1 : 0;
  return BinaryImage(gray.shape(), std::move(bits));
}

BinaryImage variation_image(const BinaryImage& current, const FrameWindow& window) {
  BinaryImage out = current;
  for (const auto& past : window.entries()) {
    require_same_shape(current.shape(), past.shape(), "variation_image");
    for (std::size_t p = 0; p < out.pixel_count(); ++p) out[p] &= past[p];
  }
  return out;
}

double variation_ratio(const BinaryImage& variation) {
  const auto n = variation.pixel_count();
  if (n == 0) return 0.0;
  return static_cast<double>(variation.count()) / static_cast<double>(n);
}

VariationResult detect_variation(const RgbImage& frame, const FrameWindow& window,
                                 const RgbImage& reference, double noise_threshold) {
  auto gray = average_channels(pixel_abs_diff(frame, reference));
  auto binary = binarize(gray, noise_threshold);
  auto variation = variation_image(binary, window);
  const double ratio = variation_ratio(variation);
  return VariationResult{ratio, std::move(binary), std::move(variation)};
}

VariationResult detect_variation(const TactileFrame& frame, const FrameWindow& window,
                                 const SensorCalibration& calibration) {
  return detect_variation(frame.image, window, calibration.reference, calibration.noise_threshold);
}

RgbImage mean_image(std::span<const RgbImage> images) {
  if (images.empty()) throw CalibrationError("cannot average an empty image list");
  const ImageShape shape = images.front().shape();
  std::vector<double> sum(3 * shape.pixel_count(), 0.0);
  for (const auto& img : images) {
    require_same_shape(shape, img.shape(), "mean_image");
    auto ch = img.channels();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ch[i];
  }
  const double n = static_cast<double>(images.size());
  for (auto& v : sum) v = std::clamp(v / n, 0.0, 1.0);
  return RgbImage(shape, std::move(sum));
}

SensorCalibration calibrate(std::span<const TactileFrame> frames, int reference_count) {
  if (frames.empty()) throw CalibrationError("calibration needs at least one frame");
  if (reference_count < 1) throw CalibrationError("reference frame count must be >= 1");
  if (frames.size() < static_cast<std::size_t>(reference_count)) {
    throw CalibrationError("calibration got " + std::to_string(frames.size()) +
                           " frames, fewer than the " + std::to_string(reference_count) +
                           " reference frames");
  }
  const int sensor = frames.front().sensor_id;
  std::vector<RgbImage> head;
  head.reserve(static_cast<std::size_t>(reference_count));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].sensor_id != sensor) throw CalibrationError("calibration frames mix sensors");
    if (i < static_cast<std::size_t>(reference_count)) head.push_back(frames[i].image);
  }
  RgbImage reference = mean_image(head);

  double sum_of_peaks = 0.0;
  for (const auto& f : frames) {
    sum_of_peaks += average_channels(pixel_abs_diff(f.image, reference)).max();
  }
  const double eta = std::clamp(sum_of_peaks / static_cast<double>(frames.size()), 0.0, 1.0);
  return SensorCalibration{sensor, std::move(reference), eta};
}

VariationTracker::VariationTracker(SensorCalibration calibration, int window_length)
    : calibration_(std::move(calibration)), window_(window_length) {}

VariationResult VariationTracker::observe(const RgbImage& frame) {
  auto result = detect_variation(frame, window_, calibration_.reference, calibration_.noise_threshold);
  window_.push(result.binary);
  return result;
}

}  // namespace t2h::tactile
