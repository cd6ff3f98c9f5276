#pragma once

// Per-frame tactile variation detection against a background image, and the
// no-contact calibration that produces that background and the noise cutoff.
//
//   frame ─┬─ |frame - reference| ─ channel mean ─ threshold(eta) ─ B_k
//          │                                                         │
//          └──────────── window [B_{k-c+1} .. B_{k-1}] ── AND ───────┴─ V_k ─ ratio
//
// All functions here are pure. FrameWindow is the only mutable piece and is
// owned by exactly one detector (one per sensor).

#include <cstddef>
#include <deque>
#include <span>

#include "t2h/image.hpp"

namespace t2h::tactile {

struct SensorCalibration {
  int sensor_id = 1;
  RgbImage reference;
  double noise_threshold = 0.0;
};

struct VariationResult {
  double ratio = 0.0;   ///< set bits of `variation` over pixel count
  BinaryImage binary;   ///< thresholded difference of the current frame alone
  BinaryImage variation;
};

/// The most recent binary difference images, oldest first. Holds at most
/// `capacity - 1` entries so that, together with the current frame, the AND
/// spans `capacity` consecutive frames.
class FrameWindow {
 public:
  explicit FrameWindow(int capacity);

  void push(BinaryImage image);
  void clear() noexcept { entries_.clear(); }

  int capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::deque<BinaryImage>& entries() const noexcept { return entries_; }

 private:
  int capacity_;
  std::deque<BinaryImage> entries_;
};

RgbImage pixel_abs_diff(const RgbImage& frame, const RgbImage& reference);

GrayImage average_channels(const RgbImage& image);

/// Bit is 1 where gray >= threshold. Threshold must lie in [0,1].
BinaryImage binarize(const GrayImage& gray, double threshold);

/// AND of `current` with every window entry. During warm-up the window holds
/// fewer entries and the AND runs over what is there.
BinaryImage variation_image(const BinaryImage& current, const FrameWindow& window);

double variation_ratio(const BinaryImage& variation);

VariationResult detect_variation(const RgbImage& frame, const FrameWindow& window,
                                 const RgbImage& reference, double noise_threshold);

VariationResult detect_variation(const TactileFrame& frame, const FrameWindow& window,
                                 const SensorCalibration& calibration);

/// Per-pixel, per-channel arithmetic mean. Throws CalibrationError on empty
/// input and ShapeError on mixed dimensions.
RgbImage mean_image(std::span<const RgbImage> images);

/// Reference = mean of the first `reference_count` frames; noise threshold =
/// mean over all frames of the peak channel-averaged difference to that
/// reference.
SensorCalibration calibrate(std::span<const TactileFrame> frames, int reference_count);

/// Detector bound to one sensor: runs detect_variation and then appends the
/// frame's binary image to its window.
class VariationTracker {
 public:
  VariationTracker(SensorCalibration calibration, int window_length);

  VariationResult observe(const RgbImage& frame);
  void reset() noexcept { window_.clear(); }

  const SensorCalibration& calibration() const noexcept { return calibration_; }
  const FrameWindow& window() const noexcept { return window_; }

 private:
  SensorCalibration calibration_;
  FrameWindow window_;
};

}  // namespace t2h::tactile
