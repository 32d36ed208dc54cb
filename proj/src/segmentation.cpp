#include "kentmix/segmentation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "kentmix/errors.hpp"

namespace kentmix {

Segmentation segment_image(const ImageGrid& img, std::optional<int> g, const FitConfig& cfg,
                           int auto_g_min, int auto_g_max) {
  if (img.pixel_count() == 0) throw DomainError("segment_image: image is empty");
  const SphereImage sphere = image_to_sphere(img);
  if (sphere.data.points.empty()) throw DomainError("empty dataset: every pixel is black");
  const std::vector<UnitVector3>& points = sphere.data.points;

  std::optional<SelectionTable> table;
  std::optional<MixtureModel> model;
  if (g) {
    FitConfig c = cfg;
    c.g = *g;
    model = fit(points, c).model;
  } else {
    const int g_max = std::min<int>(auto_g_max, static_cast<int>(points.size()));
    table = select_g(points, std::min(auto_g_min, g_max), g_max, cfg);
    model = table->selected().report.model;
  }

  const Labeling fitted = map_classify(points, *model);
  Labeling labels;
  labels.labels.assign(img.pixel_count(), 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    labels.labels[sphere.pixel_index[k]] = fitted.labels[k];
  }
  return Segmentation{std::move(labels), std::move(*model), std::move(table)};
}

ImageGrid recolor(const ImageGrid& img, const Labeling& labels) {
  if (labels.size() != img.pixel_count()) {
    throw DomainError("recolor: one label per pixel is required");
  }
  std::map<int, std::array<double, 4>> sums;  // r, g, b, count
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    if (labels.labels[p] == 0) continue;
    auto& s = sums[labels.labels[p]];
    for (int c = 0; c < 3; ++c) s[c] += img.pixels[3 * p + c];
    s[3] += 1.0;
  }
  ImageGrid out = img;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const int label = labels.labels[p];
    for (int c = 0; c < 3; ++c) {
      out.pixels[3 * p + c] =
          label == 0 ? 0
                     : static_cast<std::uint8_t>(std::lround(sums[label][c] / sums[label][3]));
    }
  }
  return out;
}

}  // namespace kentmix
