// Read-only NPY v1.0 support: 2-D, little-endian float64, C order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "homotopy/errors.hpp"
#include "homotopy/repmat_io.hpp"

namespace homotopy {

namespace {

constexpr char kNpyMagic[] = "\x93NUMPY";

// Returns the raw text of the value stored under `key` in the header dict literal.
std::optional<std::string_view> dict_value(std::string_view header, std::string_view key) {
  for (char quote : {'\'', '"'}) {
    std::string needle;
    needle += quote;
    needle += key;
    needle += quote;
    auto pos = header.find(needle);
    if (pos == std::string_view::npos) continue;
    pos = header.find(':', pos + needle.size());
    if (pos == std::string_view::npos) return std::nullopt;
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    if (pos >= header.size()) return std::nullopt;
    std::size_t end = pos;
    if (header[pos] == '(') {
      end = header.find(')', pos);
      if (end == std::string_view::npos) return std::nullopt;
      ++end;
    } else if (header[pos] == '\'' || header[pos] == '"') {
      end = header.find(header[pos], pos + 1);
      if (end == std::string_view::npos) return std::nullopt;
      ++end;
    } else {
      while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
    }
    return header.substr(pos, end - pos);
  }
  return std::nullopt;
}

std::vector<std::size_t> parse_shape(std::string_view tuple) {
  std::vector<std::size_t> dims;
  std::size_t value = 0;
  bool in_number = false;
  for (char c : tuple) {
    if (c >= '0' && c <= '9') {
      value = value * 10 + static_cast<std::size_t>(c - '0');
      in_number = true;
    } else if (in_number) {
      dims.push_back(value);
      value = 0;
      in_number = false;
    }
  }
  if (in_number) dims.push_back(value);
  return dims;
}

}  // namespace

RepresentationSet decode_npy(std::string_view bytes) {
  if (bytes.empty()) throw ValidationError("NPY input is empty");
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kNpyMagic, 6) != 0) throw FormatError("missing NPY magic");
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw FormatError("unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor));
  }
  const std::size_t header_len =
      static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  if (bytes.size() < 10 + header_len) throw FormatError("truncated NPY header");
  const std::string_view header = bytes.substr(10, header_len);

  auto descr = dict_value(header, "descr");
  auto order = dict_value(header, "fortran_order");
  auto shape = dict_value(header, "shape");
  if (!descr || !order || !shape) throw FormatError("NPY header lacks descr/fortran_order/shape");
  if (*descr != "'<f8'" && *descr != "\"<f8\"") {
    throw FormatError("NPY dtype must be '<f8', found " + std::string(*descr));
  }
  if (*order != "False") throw FormatError("NPY array must be C-ordered");
  const auto dims = parse_shape(*shape);
  if (dims.size() != 2) throw FormatError("NPY array must be 2-D");

  const std::size_t n = dims[0];
  const std::size_t d = dims[1];
  const std::size_t offset = 10 + header_len;
  if (bytes.size() - offset != n * d * 8) throw FormatError("NPY payload size does not match shape");

  Matrix data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::uint64_t word = 0;
      for (int k = 0; k < 8; ++k) word |= static_cast<std::uint64_t>(p[k]) << (8 * k);
      p += 8;
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::bit_cast<double>(word);
    }
  }
  auto set = RepresentationSet::from_matrix(std::move(data));
  set.validate();
  return set;
}

}  // namespace homotopy
