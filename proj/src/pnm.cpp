// Copyright 2026 The maskunify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maskunify/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

namespace maskunify {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint() {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) throw PnmError("PNM header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw PnmError("malformed PNM header");
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

PnmImage decode_pnm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw PnmError("not a PNM file");
  const char kind = bytes[1];
  bool ascii = false;
  PnmImage img;
  switch (kind) {
    case '2': ascii = true; [[fallthrough]];
    case '5': img.channels = 1; break;
    case '3': ascii = true; [[fallthrough]];
    case '6': img.channels = 3; break;
    default: throw PnmError(std::string("unsupported PNM type P") + kind);
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const long w = reader.read_uint();
  const long h = reader.read_uint();
  const long maxval = reader.read_uint();
  if (w <= 0 || h <= 0) throw PnmError("PNM dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) throw PnmError("PNM maxval out of range");
  img.size = Size{static_cast<int>(w), static_cast<int>(h)};
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = img.size.area() * static_cast<std::size_t>(img.channels);
  img.samples.resize(count);

  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = reader.read_uint();
      if (v > maxval) throw PnmError("PNM sample exceeds maxval");
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
    return img;
  }

  // Exactly one whitespace byte separates the header from raster data.
  if (reader.pos() >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    throw PnmError("malformed PNM header");
  }
  reader.advance(1);
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t need = count * bytes_per_sample;
  if (bytes.size() - reader.pos() < need) throw PnmError("truncated PNM raster");
  const auto* data =
      reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
  for (std::size_t i = 0; i < count; ++i) {
    std::uint16_t v = bytes_per_sample == 2
                          ? static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1])
                          : data[i];
    if (v > maxval) throw PnmError("PNM sample exceeds maxval");
    img.samples[i] = v;
  }
  return img;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

PnmImage read_pnm(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_pnm(bytes);
  } catch (const PnmError& e) {
    throw PnmError(path.string() + ": " + e.what());
  }
}

std::string encode_pnm(const PnmImage& image) {
  std::string out = (image.channels == 3 ? "P6\n" : "P5\n") +
                    std::to_string(image.size.width) + " " +
                    std::to_string(image.size.height) + "\n" +
                    std::to_string(image.maxval) + "\n";
  const bool wide = image.maxval > 255;
  out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
  for (auto v : image.samples) {
    if (wide) out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

PnmImage crop_pnm(const PnmImage& image, const BBox& box) {
  if (!box.within(image.size)) throw PnmError("crop box outside image");
  PnmImage out;
  out.size = Size{box.width(), box.height()};
  out.channels = image.channels;
  out.maxval = image.maxval;
  out.samples.reserve(out.size.area() * static_cast<std::size_t>(out.channels));
  const std::size_t stride = static_cast<std::size_t>(image.size.width) * image.channels;
  for (int y = box.y_min; y <= box.y_max; ++y) {
    const auto begin = image.samples.begin() +
                       static_cast<std::ptrdiff_t>(y * stride +
                                                   static_cast<std::size_t>(box.x_min) * image.channels);
    out.samples.insert(out.samples.end(), begin,
                       begin + static_cast<std::ptrdiff_t>(out.size.width) * image.channels);
  }
  return out;
}

ProbMap load_prob_map(const std::filesystem::path& path, std::string label) {
  const auto img = read_pnm(path);
  if (img.channels != 1) throw PnmError(path.string() + ": probability map must be greyscale");
  std::vector<double> values(img.samples.size());
  const double scale = 1.0 / img.maxval;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = img.samples[i] == img.maxval ? 1.0 : img.samples[i] * scale;
  }
  return ProbMap(img.size, std::move(values), std::move(label));
}

BinaryMask load_mask_image(const std::filesystem::path& path) {
  const auto img = read_pnm(path);
  if (img.channels != 1) throw PnmError(path.string() + ": mask must be greyscale");
  std::vector<std::uint8_t> bits(img.samples.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = img.samples[i] != 0;
  return BinaryMask(img.size, std::move(bits));
}

void save_gray8(const std::filesystem::path& path, Size size,
                const std::vector<std::uint8_t>& pixels) {
  std::string out = "P5\n" + std::to_string(size.width) + " " +
                    std::to_string(size.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  write_file_bytes(path, out);
}

void save_mask_image(const std::filesystem::path& path, const BinaryMask& mask) {
  std::vector<std::uint8_t> px(mask.bits().begin(), mask.bits().end());
  for (auto& p : px) p = p ? 255 : 0;
  save_gray8(path, mask.size(), px);
}

}  // namespace maskunify
