#include "kentmix/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kentmix/errors.hpp"

namespace kentmix {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Header tokenizer for PPM: whitespace-separated tokens, '#' to end of line
// is a comment.
class PpmReader {
 public:
  explicit PpmReader(std::string_view bytes) : s_(bytes) {}

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '#') {
      ++pos_;
    }
    if (start == pos_) throw FormatError("PPM: unexpected end of header");
    return s_.substr(start, pos_ - start);
  }

  std::size_t integer(const char* what) {
    const std::string_view t = token();
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw FormatError(fmt::format("PPM: invalid {} '{}'", what, t));
    }
    return v;
  }

  // The single whitespace byte that ends a P6 header.
  void end_of_header() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      throw FormatError("PPM: missing whitespace after maxval");
    }
    ++pos_;
  }

  std::string_view rest() const { return s_.substr(pos_); }

 private:
  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string fmt_real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw FormatError(fmt::format("write failed for '{}'", path.string()));
}

Dataset parse_csv(std::string_view text, bool normalize) {
  Dataset out;
  std::vector<std::size_t> off_sphere;
  bool first_row = true;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const std::vector<std::string_view> fields = split(line, ',');
    double v[3] = {0.0, 0.0, 0.0};
    bool numeric = fields.size() == 3;
    for (std::size_t k = 0; numeric && k < 3; ++k) numeric = parse_double(fields[k], v[k]);
    if (!numeric) {
      if (first_row) {
        first_row = false;
        continue;
      }
      throw FormatError(fmt::format("line {}: expected three numeric fields", line_no));
    }
    first_row = false;
    ++out.source_rows;

    const Eigen::Vector3d y(v[0], v[1], v[2]);
    const double norm = y.norm();
    if (normalize) {
      if (norm < 1e-12) {
        ++out.skipped_rows;
        continue;
      }
      out.points.push_back(UnitVector3::normalized(y));
    } else if (std::abs(norm - 1.0) > 1e-6) {
      off_sphere.push_back(line_no);
    } else if (std::abs(norm - 1.0) <= UnitVector3::kNormTolerance) {
      out.points.emplace_back(y);
    } else {
      out.points.push_back(UnitVector3::normalized(y));
    }
  }
  if (!off_sphere.empty()) {
    std::string lines;
    for (std::size_t k = 0; k < std::min<std::size_t>(off_sphere.size(), 10); ++k) {
      lines += (k ? ", " : "") + std::to_string(off_sphere[k]);
    }
    throw FormatError(fmt::format("{} row(s) are not unit vectors (lines {}{})", off_sphere.size(),
                                  lines, off_sphere.size() > 10 ? ", ..." : ""));
  }
  if (out.points.empty()) throw DomainError("empty dataset: no usable rows");
  return out;
}

Dataset load_csv(const std::filesystem::path& path, bool normalize) {
  return parse_csv(read_file(path), normalize);
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out = "x,y,z\n";
  for (const UnitVector3& p : data.points) {
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", p[0], p[1], p[2]);
  }
  return out;
}

ImageGrid decode_ppm(std::string_view bytes) {
  PpmReader reader(bytes);
  const std::string_view magic = reader.token();
  if (magic != "P3" && magic != "P6") {
    throw FormatError(fmt::format("PPM: unsupported magic '{}'", magic));
  }
  ImageGrid img;
  img.width = reader.integer("width");
  img.height = reader.integer("height");
  const std::size_t maxval = reader.integer("maxval");
  if (maxval != 255) throw FormatError(fmt::format("PPM: unsupported maxval {}", maxval));
  const std::size_t count = img.pixel_count() * 3;

  if (magic == "P6") {
    reader.end_of_header();
    const std::string_view body = reader.rest();
    if (body.size() < count) throw FormatError("PPM: truncated pixel data");
    img.pixels.assign(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    img.pixels.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t v = reader.integer("sample");
      if (v > 255) throw FormatError(fmt::format("PPM: sample {} exceeds maxval", v));
      img.pixels.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return img;
}

ImageGrid load_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

std::string encode_ppm(const ImageGrid& img) {
  if (img.pixels.size() != img.pixel_count() * 3) {
    throw DomainError("encode_ppm: pixel buffer does not match dimensions");
  }
  std::string out = fmt::format("P6\n{} {}\n255\n", img.width, img.height);
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

void save_ppm(const std::filesystem::path& path, const ImageGrid& img) {
  write_file(path, encode_ppm(img));
}

SphereImage image_to_sphere(const ImageGrid& img) {
  SphereImage out;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const Eigen::Vector3d y(img.pixels[3 * p], img.pixels[3 * p + 1], img.pixels[3 * p + 2]);
    ++out.data.source_rows;
    if (y.isZero(0.0)) {
      out.unmapped.push_back(p);
      ++out.data.skipped_rows;
      continue;
    }
    out.data.points.push_back(UnitVector3::normalized(y));
    out.pixel_index.push_back(p);
  }
  return out;
}

std::string model_to_json(const MixtureModel& model) {
  std::string out = fmt::format("{{\n  \"g\": {},\n  \"weights\": [", model.g());
  for (std::size_t z = 0; z < model.g(); ++z) {
    out += (z ? ", " : "") + fmt_real(model.weight(z));
  }
  out += "],\n  \"components\": [\n";
  for (std::size_t z = 0; z < model.g(); ++z) {
    const KentParams& c = model.component(z);
    const Eigen::Matrix3d& f = c.frame().matrix();
    out += fmt::format("    {{\"beta\": {}, \"kappa\": {}, \"frame\": [", fmt_real(c.beta()),
                       fmt_real(c.kappa()));
    for (int i = 0; i < 3; ++i) {
      out += fmt::format("{}[{}, {}, {}]", i ? ", " : "", fmt_real(f(i, 0)), fmt_real(f(i, 1)),
                         fmt_real(f(i, 2)));
    }
    out += z + 1 < model.g() ? "]},\n" : "]}\n";
  }
  out += "  ]\n}\n";
  return out;
}

MixtureModel model_from_json(std::string_view text, ShapeFloors floors) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw FormatError("model JSON: top level must be an object");
    const auto g = j.at("g").get<long long>();
    if (!j.at("g").is_number_integer() || g < 1) {
      throw FormatError("model JSON: g must be a positive integer");
    }
    const auto& weights = j.at("weights");
    const auto& comps = j.at("components");
    if (!weights.is_array() || !comps.is_array() ||
        weights.size() != static_cast<std::size_t>(g) ||
        comps.size() != static_cast<std::size_t>(g)) {
      throw FormatError("model JSON: weights and components must be arrays of length g");
    }
    std::vector<double> w;
    for (const auto& v : weights) {
      if (!v.is_number()) throw FormatError("model JSON: weights must be numbers");
      w.push_back(v.get<double>());
    }
    std::vector<KentParams> params;
    for (const auto& c : comps) {
      const auto& frame = c.at("frame");
      if (!c.at("beta").is_number() || !c.at("kappa").is_number() || !frame.is_array() ||
          frame.size() != 3) {
        throw FormatError("model JSON: component needs numeric beta, kappa and a 3x3 frame");
      }
      Eigen::Matrix3d f;
      for (int i = 0; i < 3; ++i) {
        const auto& row = frame.at(static_cast<std::size_t>(i));
        if (!row.is_array() || row.size() != 3) throw FormatError("model JSON: frame must be 3x3");
        for (int k = 0; k < 3; ++k) {
          const auto& e = row.at(static_cast<std::size_t>(k));
          if (!e.is_number()) throw FormatError("model JSON: frame entries must be numbers");
          f(i, k) = e.get<double>();
        }
      }
      params.emplace_back(c.at("beta").get<double>(), c.at("kappa").get<double>(), Frame3(f),
                          floors);
    }
    return MixtureModel(std::move(w), std::move(params));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(fmt::format("model JSON: {}", e.what()));
  }
}

std::string labels_to_csv(const Labeling& labels) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += fmt::format("{},{}\n", i, labels.labels[i]);
  }
  return out;
}

}  // namespace kentmix
