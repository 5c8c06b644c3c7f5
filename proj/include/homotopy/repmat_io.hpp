#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homotopy/types.hpp"

namespace homotopy {

/// Encoder outputs over a finite string set: row i of `data` represents `ids[i]`.
struct RepresentationSet {
  std::vector<std::string> ids;
  Matrix data;
  /// Free-form tags (model, layer, dataset). Values are kept as strings.
  std::map<std::string, std::string> meta;

  std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(data.cols()); }

  /// Throws ValidationError unless N >= 1, d >= 1, all entries finite and ids unique.
  void validate() const;

  /// Convenience constructor that assigns ids "0".."N-1".
  static RepresentationSet from_matrix(Matrix data, std::map<std::string, std::string> meta = {});
};

/// Integer class labels keyed by the same identifiers as a RepresentationSet.
struct LabelSet {
  std::vector<std::string> ids;
  std::vector<int> labels;

  int num_classes() const;
  void validate() const;
  /// Reorders labels to follow `set.ids`; every id of the set must be labelled.
  LabelSet aligned_to(const RepresentationSet& set) const;
};

enum class FileFormat { csv, npy, repr1 };

std::string_view to_string(FileFormat format);
FileFormat parse_file_format(std::string_view name);
/// Infers the format from the extension (.csv, .npy, .repr1).
FileFormat infer_file_format(const std::filesystem::path& path);

struct CsvOptions {
  bool header = false;
};

RepresentationSet load_representations(const std::filesystem::path& path, FileFormat format,
                                       CsvOptions csv = {});
/// Format inferred from the extension.
RepresentationSet load_representations(const std::filesystem::path& path, CsvOptions csv = {});

void save_representations(const RepresentationSet& set, const std::filesystem::path& path,
                          FileFormat format);

// In-memory codecs, used by the file functions above.
RepresentationSet parse_csv(std::string_view text, CsvOptions options = {});
std::string format_csv(const RepresentationSet& set);
RepresentationSet decode_repr1(std::string_view bytes);
std::string encode_repr1(const RepresentationSet& set);
RepresentationSet decode_npy(std::string_view bytes);

/// CSV of `id,label` rows, no header.
LabelSet load_labels(const std::filesystem::path& path);

/// Restricts both sets to their common ids, ordered as in `a`.
std::pair<RepresentationSet, RepresentationSet> align_by_ids(const RepresentationSet& a,
                                                             const RepresentationSet& b);

/// Reads a whole file; IoError if it cannot be opened.
std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace homotopy
