#pragma once

// Straight-line reference implementations used as test oracles. They work on
// plain vectors and share no code with the library.

#include <cstdint>
#include <vector>

namespace t2h::testing {

struct PlainRgb {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  ///< row-major, interleaved
};

struct NaiveDetection {
  std::vector<std::uint8_t> binary;
  std::vector<std::uint8_t> variation;
  double ratio = 0.0;
};

/// Difference, channel mean, threshold, AND with every window image, count.
NaiveDetection naive_detect(const PlainRgb& frame, const PlainRgb& reference,
                            const std::vector<std::vector<std::uint8_t>>& window, double eta);

struct NaiveCalibration {
  PlainRgb reference;
  double eta = 0.0;
};

NaiveCalibration naive_calibrate(const std::vector<PlainRgb>& frames, int reference_count);

/// log10(1 + alpha p) / log10(1 + alpha) in 50-digit decimal arithmetic.
double feedback_curve_reference(double p, double alpha);

}  // namespace t2h::testing
