#pragma once

#include <optional>

#include "kentmix/bslm_fitter.hpp"
#include "kentmix/io.hpp"
#include "kentmix/selection.hpp"

namespace kentmix {

struct Segmentation {
  Labeling labels;  // one per pixel, row-major; 0 for pure-black pixels
  MixtureModel model;
  std::optional<SelectionTable> selection;  // set when g was chosen automatically
};

/// Fits the pixel directions and labels every pixel with the plug-in MAP
/// rule. With g empty, g is selected over [auto_g_min, auto_g_max].
/// Throws DomainError ("empty dataset") when every pixel is black.
Segmentation segment_image(const ImageGrid& img, std::optional<int> g, const FitConfig& cfg,
                           int auto_g_min = 2, int auto_g_max = 10);

/// Paints each pixel with the mean RGB of its label's pixels; label 0 stays black.
ImageGrid recolor(const ImageGrid& img, const Labeling& labels);

}  // namespace kentmix
