#include "homotopy/repmat_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "homotopy/errors.hpp"

namespace homotopy {

namespace {

constexpr std::array<char, 6> kRepr1Magic = {'R', 'E', 'P', 'R', '1', '\0'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t read_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw FormatError("cannot format value");
  return std::string(buf.data(), ptr);
}

}  // namespace

void RepresentationSet::validate() const {
  if (data.rows() < 1 || data.cols() < 1) {
    throw ValidationError("representation set must have N >= 1 rows and d >= 1 columns");
  }
  if (ids.size() != rows()) {
    throw ValidationError("id count " + std::to_string(ids.size()) + " does not match row count " +
                          std::to_string(rows()));
  }
  if (!data.allFinite()) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = 0; j < data.cols(); ++j) {
        if (!std::isfinite(data(i, j))) {
          throw ValidationError("non-finite value at row " + std::to_string(i) + " (id '" +
                                ids[static_cast<std::size_t>(i)] + "'), column " + std::to_string(j));
        }
      }
    }
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ValidationError("duplicate id '" + id + "'");
  }
}

RepresentationSet RepresentationSet::from_matrix(Matrix data, std::map<std::string, std::string> meta) {
  RepresentationSet set;
  set.ids.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) set.ids.push_back(std::to_string(i));
  set.data = std::move(data);
  set.meta = std::move(meta);
  return set;
}

int LabelSet::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void LabelSet::validate() const {
  if (ids.size() != labels.size()) throw ValidationError("label count does not match id count");
  if (std::any_of(labels.begin(), labels.end(), [](int l) { return l < 0; })) {
    throw ValidationError("labels must be non-negative");
  }
  if (num_classes() < 2) throw ValidationError("label set needs at least two classes");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ValidationError("duplicate label id '" + id + "'");
  }
}

LabelSet LabelSet::aligned_to(const RepresentationSet& set) const {
  std::unordered_map<std::string_view, int> by_id;
  for (std::size_t i = 0; i < ids.size(); ++i) by_id.emplace(ids[i], labels[i]);
  LabelSet out;
  out.ids = set.ids;
  out.labels.reserve(set.ids.size());
  for (const auto& id : set.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("no label for id '" + id + "'");
    out.labels.push_back(it->second);
  }
  out.validate();
  return out;
}

std::string_view to_string(FileFormat format) {
  switch (format) {
    case FileFormat::csv: return "csv";
    case FileFormat::npy: return "npy";
    case FileFormat::repr1: return "repr1";
  }
  return "unknown";
}

FileFormat parse_file_format(std::string_view name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "npy") return FileFormat::npy;
  if (name == "repr1") return FileFormat::repr1;
  throw ValidationError("unknown file format '" + std::string(name) + "'");
}

FileFormat infer_file_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return FileFormat::csv;
  if (ext == ".npy") return FileFormat::npy;
  if (ext == ".repr1") return FileFormat::repr1;
  throw ValidationError("cannot infer format from extension of '" + path.string() + "'");
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

RepresentationSet parse_csv(std::string_view text, CsvOptions options) {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool skipped_header = !options.header;

  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }

    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      auto comma = line.find(',', pos);
      std::string_view field = trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (fields == 0) {
        if (field.empty()) throw FormatError("empty id on line " + std::to_string(line_no));
        ids.emplace_back(field);
      } else {
        double v = 0.0;
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec == std::errc::result_out_of_range) {
          throw ValidationError("value out of range on line " + std::to_string(line_no));
        }
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
          throw FormatError("cannot parse '" + std::string(field) + "' as a number on line " +
                            std::to_string(line_no));
        }
        values.push_back(v);
      }
      ++fields;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }

    if (fields < 2) throw FormatError("line " + std::to_string(line_no) + " has no value columns");
    if (width == 0) {
      width = fields - 1;
    } else if (fields - 1 != width) {
      throw FormatError("ragged row on line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " values, found " + std::to_string(fields - 1));
    }
  }

  if (ids.empty()) throw ValidationError("CSV input contains no rows");

  RepresentationSet set;
  set.ids = std::move(ids);
  set.data = Eigen::Map<RowMajorMatrix>(values.data(), static_cast<Eigen::Index>(set.ids.size()),
                                        static_cast<Eigen::Index>(width));
  set.validate();
  return set;
}

std::string format_csv(const RepresentationSet& set) {
  set.validate();
  std::string out;
  for (std::size_t i = 0; i < set.rows(); ++i) {
    const auto& id = set.ids[i];
    if (id.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("id '" + id + "' cannot be written to CSV");
    }
    out += id;
    for (Eigen::Index j = 0; j < set.data.cols(); ++j) {
      out += ',';
      out += format_double(set.data(static_cast<Eigen::Index>(i), j));
    }
    out += '\n';
  }
  return out;
}

std::string encode_repr1(const RepresentationSet& set) {
  set.validate();
  if (set.rows() > UINT32_MAX || set.cols() > UINT32_MAX) throw ValidationError("matrix too large for repr1");

  nlohmann::json trailer;
  trailer["ids"] = set.ids;
  trailer["meta"] = set.meta;
  const std::string trailer_text = trailer.dump();

  std::string out;
  out.reserve(kRepr1Magic.size() + 8 + set.rows() * set.cols() * 8 + 8 + trailer_text.size());
  out.append(kRepr1Magic.data(), kRepr1Magic.size());
  append_u32(out, static_cast<std::uint32_t>(set.rows()));
  append_u32(out, static_cast<std::uint32_t>(set.cols()));
  for (Eigen::Index i = 0; i < set.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < set.data.cols(); ++j) {
      append_u64(out, std::bit_cast<std::uint64_t>(set.data(i, j)));
    }
  }
  append_u64(out, trailer_text.size());
  out += trailer_text;
  return out;
}

RepresentationSet decode_repr1(std::string_view bytes) {
  constexpr std::size_t header = kRepr1Magic.size() + 8;
  if (bytes.empty()) throw ValidationError("repr1 input is empty");
  if (bytes.size() < header || std::memcmp(bytes.data(), kRepr1Magic.data(), kRepr1Magic.size()) != 0) {
    throw FormatError("missing REPR1 magic");
  }
  const auto n = read_le(bytes, 6, 4);
  const auto d = read_le(bytes, 10, 4);
  const std::size_t payload = static_cast<std::size_t>(n) * static_cast<std::size_t>(d) * 8;
  if (bytes.size() < header + payload + 8) throw FormatError("truncated repr1 payload");

  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::size_t offset = header;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      data(i, j) = std::bit_cast<double>(read_le(bytes, offset, 8));
      offset += 8;
    }
  }
  const auto trailer_len = read_le(bytes, offset, 8);
  offset += 8;
  if (bytes.size() - offset != trailer_len) throw FormatError("repr1 trailer length mismatch");

  nlohmann::json trailer;
  try {
    trailer = nlohmann::json::parse(bytes.substr(offset));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("repr1 trailer is not valid JSON: ") + e.what());
  }
  if (!trailer.is_object() || !trailer.contains("ids") || !trailer["ids"].is_array()) {
    throw FormatError("repr1 trailer lacks an 'ids' array");
  }

  RepresentationSet set;
  for (const auto& id : trailer["ids"]) {
    if (!id.is_string()) throw FormatError("repr1 ids must be strings");
    set.ids.push_back(id.get<std::string>());
  }
  if (trailer.contains("meta")) {
    if (!trailer["meta"].is_object()) throw FormatError("repr1 meta must be an object");
    for (const auto& [key, value] : trailer["meta"].items()) {
      set.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  set.data = std::move(data);
  set.validate();
  return set;
}

RepresentationSet load_representations(const std::filesystem::path& path, FileFormat format, CsvOptions csv) {
  const std::string bytes = read_file_bytes(path);
  switch (format) {
    case FileFormat::csv: return parse_csv(bytes, csv);
    case FileFormat::npy: return decode_npy(bytes);
    case FileFormat::repr1: return decode_repr1(bytes);
  }
  throw ValidationError("unsupported format");
}

RepresentationSet load_representations(const std::filesystem::path& path, CsvOptions csv) {
  return load_representations(path, infer_file_format(path), csv);
}

void save_representations(const RepresentationSet& set, const std::filesystem::path& path, FileFormat format) {
  switch (format) {
    case FileFormat::csv: write_file_bytes(path, format_csv(set)); return;
    case FileFormat::repr1: write_file_bytes(path, encode_repr1(set)); return;
    case FileFormat::npy: throw ValidationError("NPY output is not supported");
  }
}

LabelSet load_labels(const std::filesystem::path& path) {
  const std::string text = read_file_bytes(path);
  LabelSet out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty()) continue;
    auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw FormatError("label line " + std::to_string(line_no) + " must be 'id,label'");
    }
    auto value = trim(view.substr(comma + 1));
    int label = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), label);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw FormatError("label on line " + std::to_string(line_no) + " is not an integer");
    }
    out.ids.emplace_back(trim(view.substr(0, comma)));
    out.labels.push_back(label);
  }
  out.validate();
  return out;
}

std::pair<RepresentationSet, RepresentationSet> align_by_ids(const RepresentationSet& a,
                                                             const RepresentationSet& b) {
  std::unordered_map<std::string_view, Eigen::Index> b_rows;
  b_rows.reserve(b.ids.size());
  for (std::size_t i = 0; i < b.ids.size(); ++i) b_rows.emplace(b.ids[i], static_cast<Eigen::Index>(i));

  std::vector<Eigen::Index> a_keep;
  std::vector<Eigen::Index> b_keep;
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    auto it = b_rows.find(a.ids[i]);
    if (it != b_rows.end()) {
      a_keep.push_back(static_cast<Eigen::Index>(i));
      b_keep.push_back(it->second);
    }
  }
  if (a_keep.empty()) throw ValidationError("representation sets share no ids");

  auto restrict = [](const RepresentationSet& src, const std::vector<Eigen::Index>& keep) {
    RepresentationSet out;
    out.meta = src.meta;
    out.data = src.data(keep, Eigen::all);
    out.ids.reserve(keep.size());
    for (auto r : keep) out.ids.push_back(src.ids[static_cast<std::size_t>(r)]);
    return out;
  };
  return {restrict(a, a_keep), restrict(b, b_keep)};
}

}  // namespace homotopy
