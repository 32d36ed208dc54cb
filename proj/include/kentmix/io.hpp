#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kentmix/kent_model.hpp"
#include "kentmix/selection.hpp"

namespace kentmix {

struct Dataset {
  std::vector<UnitVector3> points;
  std::size_t source_rows = 0;   // data rows read, excluding any header
  std::size_t skipped_rows = 0;  // zero vectors dropped under normalization
};

/// Parses three numeric columns; a non-numeric first row is taken as a
/// header. With normalize, rows are mapped to y / ||y|| and near-zero rows
/// are skipped; without it, rows off the unit sphere (tol 1e-6) are
/// rejected with their line numbers. LF and CRLF are both accepted.
/// Throws FormatError on bad fields and DomainError if no rows remain.
Dataset parse_csv(std::string_view text, bool normalize);
Dataset load_csv(const std::filesystem::path& path, bool normalize);

/// x,y,z header plus one row per point, 17 significant digits.
std::string dataset_to_csv(const Dataset& data);

/// 8-bit RGB image, row-major.
struct ImageGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

  std::size_t pixel_count() const { return width * height; }
  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;
};

/// Reads P3 or P6 with maxval 255; '#' comments may follow any header token.
ImageGrid decode_ppm(std::string_view bytes);
ImageGrid load_ppm(const std::filesystem::path& path);
/// Binary P6 encoding.
std::string encode_ppm(const ImageGrid& img);
void save_ppm(const std::filesystem::path& path, const ImageGrid& img);

struct SphereImage {
  Dataset data;                          // one point per non-black pixel
  std::vector<std::size_t> pixel_index;  // pixel of each data point
  std::vector<std::size_t> unmapped;     // pure-black pixels
};

/// Maps every pixel's RGB triple to y / ||y||; (0,0,0) pixels are listed as
/// unmapped instead.
SphereImage image_to_sphere(const ImageGrid& img);

/// Canonical model JSON: {"g", "weights", "components": [{"beta", "kappa",
/// "frame"}]} with the frame as three rows and every real printed with 17
/// significant digits.
std::string model_to_json(const MixtureModel& model);

/// Parses and validates a model; any violated invariant throws FormatError.
MixtureModel model_from_json(std::string_view text, ShapeFloors floors = {});

/// index,label header plus one row per entry; index is 0-based.
std::string labels_to_csv(const Labeling& labels);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kentmix
