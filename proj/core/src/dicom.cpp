// Copyright 2026 The cacscore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cacscore/dicom.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "cacscore/error.hpp"
#include "cacscore/key_value.hpp"
#include "cacscore/raw_fixture.hpp"

namespace cacscore::dicom {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;
constexpr Tag kItem{0xFFFE, 0xE000};
constexpr Tag kItemDelimitation{0xFFFE, 0xE00D};
constexpr Tag kSequenceDelimitation{0xFFFE, 0xE0DD};

bool is_long_vr(std::string_view vr) {
  static constexpr std::array<std::string_view, 13> kLong = {
      "OB", "OD", "OF", "OL", "OV", "OW", "SQ", "SV", "UC", "UN", "UR", "UT", "UV"};
  return std::find(kLong.begin(), kLong.end(), vr) != kLong.end();
}

bool is_known_vr(std::string_view vr) {
  static constexpr std::array<std::string_view, 34> kAll = {
      "AE", "AS", "AT", "CS", "DA", "DS", "DT", "FD", "FL", "IS", "LO", "LT",
      "OB", "OD", "OF", "OL", "OV", "OW", "PN", "SH", "SL", "SQ", "SS", "ST",
      "SV", "TM", "UC", "UI", "UL", "UN", "UR", "US", "UT", "UV"};
  return std::find(kAll.begin(), kAll.end(), vr) != kAll.end();
}

struct Element {
  Tag tag;
  std::string vr;  // empty for implicit VR
  std::uint32_t length = 0;
  std::size_t value_offset = 0;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  [[nodiscard]] std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  [[nodiscard]] bool at_end() const { return pos_ >= bytes_.size(); }
  [[nodiscard]] std::size_t remaining() const { return bytes_.size() - pos_; }
  [[nodiscard]] std::span<const std::uint8_t> bytes() const { return bytes_; }

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                                       (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    const std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::string chars(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  [[nodiscard]] std::optional<Tag> peek_tag() const {
    if (remaining() < 4) return std::nullopt;
    return Tag{static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8)),
               static_cast<std::uint16_t>(bytes_[pos_ + 2] | (bytes_[pos_ + 3] << 8))};
  }

  void need(std::size_t n) const {
    if (n > remaining()) {
      throw Error(ErrorCode::kMalformedElement,
                  "element overruns buffer at offset " + std::to_string(pos_));
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Element read_header(Reader& in, bool explicit_vr) {
  Element e;
  e.tag.group = in.u16();
  e.tag.element = in.u16();
  if (e.tag.group == 0xFFFE) {
    // Items and delimiters never carry a VR.
    e.length = in.u32();
  } else if (explicit_vr) {
    e.vr = in.chars(2);
    if (is_long_vr(e.vr)) {
      in.skip(2);
      e.length = in.u32();
    } else {
      e.length = in.u16();
    }
  } else {
    e.length = in.u32();
  }
  e.value_offset = in.pos();
  return e;
}

void skip_undefined_sequence(Reader& in, bool explicit_vr);

// Skips dataset elements until an item delimiter.
void skip_undefined_item(Reader& in, bool explicit_vr) {
  while (true) {
    const Element e = read_header(in, explicit_vr);
    if (e.tag == kItemDelimitation) return;
    if (e.length == kUndefinedLength) {
      skip_undefined_sequence(in, explicit_vr);
    } else {
      in.skip(e.length);
    }
  }
}

void skip_undefined_sequence(Reader& in, bool explicit_vr) {
  while (true) {
    const Element e = read_header(in, explicit_vr);
    if (e.tag == kSequenceDelimitation) return;
    if (e.tag != kItem) {
      throw Error(ErrorCode::kMalformedElement,
                  "expected sequence item at offset " +
                      std::to_string(e.value_offset - 8));
    }
    if (e.length == kUndefinedLength) {
      skip_undefined_item(in, explicit_vr);
    } else {
      in.skip(e.length);
    }
  }
}

std::string_view trim_value(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_backslash(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find('\\', start);
    out.push_back(trim_value(s.substr(start, p == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

class Dataset {
 public:
  Dataset(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void put(const Element& e) { elements_[e.tag.key()] = e; }
  [[nodiscard]] const Element* find(Tag tag) const {
    const auto it = elements_.find(tag.key());
    return it == elements_.end() ? nullptr : &it->second;
  }
  [[nodiscard]] std::span<const std::uint8_t> value(const Element& e) const {
    return bytes_.subspan(e.value_offset, e.length);
  }
  [[nodiscard]] std::string_view text(const Element& e) const {
    const auto v = value(e);
    return {reinterpret_cast<const char*>(v.data()), v.size()};
  }

  [[nodiscard]] std::optional<std::uint16_t> us(Tag tag) const {
    const auto* e = find(tag);
    if (e == nullptr) return std::nullopt;
    if (e->length < 2) {
      throw Error(ErrorCode::kMalformedElement,
                  "US element " + describe(tag) + " shorter than 2 bytes");
    }
    const auto v = value(*e);
    return static_cast<std::uint16_t>(v[0] | (v[1] << 8));
  }

  [[nodiscard]] std::optional<std::vector<double>> decimals(Tag tag) const {
    const auto* e = find(tag);
    if (e == nullptr) return std::nullopt;
    std::vector<double> out;
    for (const auto token : split_backslash(text(*e))) {
      try {
        out.push_back(parse_double(token));
      } catch (const Error&) {
        throw Error(ErrorCode::kMalformedElement,
                    "element " + describe(tag) + " holds non-numeric text '" +
                        std::string(token) + "'");
      }
    }
    return out;
  }

  static std::string describe(Tag tag) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "(%04X,%04X)", tag.group, tag.element);
    return buf;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::map<std::uint32_t, Element> elements_;
};

bool looks_explicit(const Reader& in) {
  const auto bytes = in.bytes();
  const auto p = in.pos();
  if (bytes.size() < p + 6) return false;
  const std::string_view vr(reinterpret_cast<const char*>(bytes.data() + p + 4), 2);
  return is_known_vr(vr);
}

double required_single(const Dataset& ds, Tag tag) {
  const auto values = ds.decimals(tag);
  if (!values || values->empty()) {
    throw Error(ErrorCode::kMalformedElement,
                "element " + Dataset::describe(tag) + " is empty");
  }
  return values->front();
}

}  // namespace

SliceRecord parse_slice(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  if (bytes.size() >= 132 && std::memcmp(bytes.data() + 128, "DICM", 4) == 0) {
    in.seek(132);
  }

  // Group 0002 is always explicit VR little endian.
  std::optional<std::string> transfer_syntax;
  while (true) {
    const auto tag = in.peek_tag();
    if (!tag || tag->group != 0x0002) break;
    const Element e = read_header(in, true);
    if (e.length == kUndefinedLength) {
      throw Error(ErrorCode::kMalformedElement, "undefined length in meta header");
    }
    in.skip(e.length);
    if (e.tag == tags::kTransferSyntaxUid) {
      const auto v = bytes.subspan(e.value_offset, e.length);
      transfer_syntax = std::string(
          trim_value({reinterpret_cast<const char*>(v.data()), v.size()}));
    }
  }

  bool explicit_vr = false;
  if (transfer_syntax) {
    if (*transfer_syntax == kExplicitVrLittleEndian) {
      explicit_vr = true;
    } else if (*transfer_syntax == kImplicitVrLittleEndian) {
      explicit_vr = false;
    } else {
      throw Error(ErrorCode::kUnsupportedTransferSyntax,
                  "transfer syntax " + *transfer_syntax + " is not supported");
    }
  } else {
    explicit_vr = looks_explicit(in);
  }

  Dataset ds(bytes);
  while (!in.at_end()) {
    const Element e = read_header(in, explicit_vr);
    if (e.length == kUndefinedLength) {
      if (e.tag == tags::kPixelData) {
        throw Error(ErrorCode::kUnsupportedTransferSyntax,
                    "encapsulated (compressed) pixel data");
      }
      skip_undefined_sequence(in, explicit_vr);
      continue;
    }
    in.skip(e.length);
    ds.put(e);
  }

  SliceRecord rec;
  const auto rows = ds.us(tags::kRows);
  const auto cols = ds.us(tags::kColumns);
  const auto spacing = ds.decimals(tags::kPixelSpacing);
  const auto* pixels = ds.find(tags::kPixelData);
  if (!rows) throw Error(ErrorCode::kMissingRequiredTag, "Rows (0028,0010) missing");
  if (!cols) throw Error(ErrorCode::kMissingRequiredTag, "Columns (0028,0011) missing");
  if (!spacing) {
    throw Error(ErrorCode::kMissingRequiredTag, "PixelSpacing (0028,0030) missing");
  }
  if (pixels == nullptr) {
    throw Error(ErrorCode::kMissingRequiredTag, "PixelData (7FE0,0010) missing");
  }
  if (*rows == 0 || *cols == 0) {
    throw Error(ErrorCode::kMalformedElement, "zero-sized image");
  }
  if (spacing->size() != 2 || (*spacing)[0] <= 0.0 || (*spacing)[1] <= 0.0) {
    throw Error(ErrorCode::kMalformedElement,
                "PixelSpacing must hold two positive values");
  }
  rec.rows = *rows;
  rec.cols = *cols;
  rec.row_spacing_mm = (*spacing)[0];
  rec.col_spacing_mm = (*spacing)[1];

  if (const auto bits = ds.us(tags::kBitsAllocated); bits && *bits != 16) {
    throw Error(ErrorCode::kUnsupportedTransferSyntax,
                "only 16-bit pixel data is supported, got " + std::to_string(*bits));
  }
  if (const auto spp = ds.us(tags::kSamplesPerPixel); spp && *spp != 1) {
    throw Error(ErrorCode::kUnsupportedTransferSyntax,
                "only single-sample (grayscale) pixel data is supported");
  }
  const bool is_signed = ds.us(tags::kPixelRepresentation).value_or(1) == 1;

  if (ds.find(tags::kSliceThickness) != nullptr) {
    rec.slice_thickness_mm = required_single(ds, tags::kSliceThickness);
  } else {
    rec.slice_thickness_mm = kReferenceSliceThicknessMm;
    rec.warnings.emplace_back("SliceThickness missing; assuming 3 mm");
  }
  if (ds.find(tags::kRescaleSlope) != nullptr) {
    rec.rescale_slope = required_single(ds, tags::kRescaleSlope);
  } else {
    rec.warnings.emplace_back("RescaleSlope missing; assuming 1");
  }
  if (ds.find(tags::kRescaleIntercept) != nullptr) {
    rec.rescale_intercept = required_single(ds, tags::kRescaleIntercept);
  } else {
    rec.warnings.emplace_back("RescaleIntercept missing; assuming 0");
  }
  if (const auto pos = ds.decimals(tags::kImagePositionPatient)) {
    if (pos->size() != 3) {
      throw Error(ErrorCode::kMalformedElement,
                  "ImagePositionPatient must hold three values");
    }
    rec.z_position_mm = (*pos)[2];
  } else {
    rec.warnings.emplace_back("ImagePositionPatient missing; ordering by InstanceNumber");
  }
  if (const auto inst = ds.decimals(tags::kInstanceNumber); inst && !inst->empty()) {
    rec.instance_number = static_cast<int>((*inst)[0]);
  } else {
    rec.warnings.emplace_back("InstanceNumber missing; assuming 0");
  }

  const std::size_t expected = rec.rows * rec.cols * 2;
  if (pixels->length != expected) {
    throw Error(ErrorCode::kMalformedElement,
                "PixelData holds " + std::to_string(pixels->length) +
                    " bytes, expected " + std::to_string(expected));
  }
  const auto data = ds.value(*pixels);
  rec.raw_pixels.resize(rec.rows * rec.cols);
  bool clamped = false;
  for (std::size_t i = 0; i < rec.raw_pixels.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(data[2 * i] | (data[2 * i + 1] << 8));
    if (is_signed) {
      rec.raw_pixels[i] = static_cast<std::int16_t>(u);
    } else if (u > 0x7FFF) {
      rec.raw_pixels[i] = 0x7FFF;
      clamped = true;
    } else {
      rec.raw_pixels[i] = static_cast<std::int16_t>(u);
    }
  }
  if (clamped) {
    rec.warnings.emplace_back("unsigned pixel values above 32767 were clamped");
  }
  return rec;
}

namespace {

class Writer {
 public:
  explicit Writer(bool explicit_vr) : explicit_vr_(explicit_vr) {}

  void element(Tag tag, std::string_view vr, std::span<const std::uint8_t> value,
               bool force_explicit = false) {
    put16(tag.group);
    put16(tag.element);
    const auto length = static_cast<std::uint32_t>(value.size());
    if (explicit_vr_ || force_explicit) {
      out_.insert(out_.end(), vr.begin(), vr.end());
      if (is_long_vr(vr)) {
        put16(0);
        put32(length);
      } else {
        put16(static_cast<std::uint16_t>(length));
      }
    } else {
      put32(length);
    }
    out_.insert(out_.end(), value.begin(), value.end());
  }

  void text(Tag tag, std::string_view vr, std::string value, char pad = ' ',
            bool force_explicit = false) {
    if (value.size() % 2 == 1) value.push_back(pad);
    element(tag, vr,
            {reinterpret_cast<const std::uint8_t*>(value.data()), value.size()},
            force_explicit);
  }

  void us(Tag tag, std::uint16_t v) {
    const std::array<std::uint8_t, 2> b = {static_cast<std::uint8_t>(v & 0xFF),
                                           static_cast<std::uint8_t>(v >> 8)};
    element(tag, "US", b);
  }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  void put16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void put32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  bool explicit_vr_;
  std::vector<std::uint8_t> out_;
};

}  // namespace

std::vector<std::uint8_t> write_slice(const SliceRecord& record,
                                      const WriteOptions& options) {
  if (record.rows == 0 || record.cols == 0 || record.rows > 0xFFFF ||
      record.cols > 0xFFFF || record.raw_pixels.size() != record.rows * record.cols) {
    throw Error(ErrorCode::kInvalidArgument, "slice record has an invalid pixel grid");
  }
  std::vector<std::uint8_t> out;
  if (options.with_preamble) {
    out.assign(128, 0);
    out.insert(out.end(), {'D', 'I', 'C', 'M'});
    Writer meta(true);
    meta.text(tags::kTransferSyntaxUid, "UI",
              options.explicit_vr ? kExplicitVrLittleEndian : kImplicitVrLittleEndian,
              '\0');
    const auto meta_len = static_cast<std::uint32_t>(meta.bytes().size());
    Writer group_length(true);
    const std::array<std::uint8_t, 4> len = {
        static_cast<std::uint8_t>(meta_len), static_cast<std::uint8_t>(meta_len >> 8),
        static_cast<std::uint8_t>(meta_len >> 16), static_cast<std::uint8_t>(meta_len >> 24)};
    group_length.element({0x0002, 0x0000}, "UL", len);
    out.insert(out.end(), group_length.bytes().begin(), group_length.bytes().end());
    out.insert(out.end(), meta.bytes().begin(), meta.bytes().end());
  }

  Writer ds(options.explicit_vr);
  ds.text({0x0008, 0x0060}, "CS", "CT");
  if (options.write_slice_thickness) {
    ds.text(tags::kSliceThickness, "DS", format_double(record.slice_thickness_mm));
  }
  ds.text(tags::kInstanceNumber, "IS", std::to_string(record.instance_number));
  ds.text(tags::kImagePositionPatient, "DS",
          "0\\0\\" + format_double(record.z_position_mm));
  ds.us(tags::kSamplesPerPixel, 1);
  ds.text({0x0028, 0x0004}, "CS", "MONOCHROME2");
  ds.us(tags::kRows, static_cast<std::uint16_t>(record.rows));
  ds.us(tags::kColumns, static_cast<std::uint16_t>(record.cols));
  ds.text(tags::kPixelSpacing, "DS",
          format_double(record.row_spacing_mm) + "\\" +
              format_double(record.col_spacing_mm));
  ds.us(tags::kBitsAllocated, 16);
  ds.us({0x0028, 0x0101}, 16);
  ds.us({0x0028, 0x0102}, 15);
  ds.us(tags::kPixelRepresentation, 1);
  if (options.write_rescale) {
    ds.text(tags::kRescaleIntercept, "DS", format_double(record.rescale_intercept));
    ds.text(tags::kRescaleSlope, "DS", format_double(record.rescale_slope));
  }
  std::vector<std::uint8_t> pixels(record.raw_pixels.size() * 2);
  for (std::size_t i = 0; i < record.raw_pixels.size(); ++i) {
    const auto u = static_cast<std::uint16_t>(record.raw_pixels[i]);
    pixels[2 * i] = static_cast<std::uint8_t>(u & 0xFF);
    pixels[2 * i + 1] = static_cast<std::uint8_t>(u >> 8);
  }
  ds.element(tags::kPixelData, "OW", pixels);

  out.insert(out.end(), ds.bytes().begin(), ds.bytes().end());
  return out;
}

Volume load_series(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename().string().starts_with(".")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::kIoError, "no files in " + dir.string());
  }

  std::vector<SliceRecord> records(files.size());
  const std::size_t workers = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(files.size())));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < files.size(); i += workers) {
        const auto bytes = read_file_bytes(files[i]);
        try {
          records[i] = parse_slice(bytes);
        } catch (const Error& e) {
          throw Error(e.code(), files[i].filename().string() + ": " + e.what());
        }
      }
    }));
  }
  for (auto& job : jobs) job.get();
  return assemble_volume(records);
}

}  // namespace cacscore::dicom
