#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "helpers.hpp"
#include "homotopy/errors.hpp"
#include "homotopy/repmat_io.hpp"

using namespace homotopy;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "homotopy_unit";
  fs::create_directories(dir);
  return dir / name;
}

std::string npy_bytes(const std::string& header_dict, const std::vector<double>& values) {
  std::string header = header_dict;
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  std::string out = "\x93NUMPY";
  out.push_back('\x01');
  out.push_back('\x00');
  const auto len = static_cast<std::uint16_t>(header.size());
  out.push_back(static_cast<char>(len & 0xFF));
  out.push_back(static_cast<char>(len >> 8));
  out += header;
  const auto* raw = reinterpret_cast<const char*>(values.data());
  out.append(raw, values.size() * sizeof(double));
  return out;
}

}  // namespace

TEST_SUITE("repmat_io") {
  TEST_CASE("csv parses ids and values") {
    const RepresentationSet s = parse_csv("a,1.0,2.0\nb,3.0,4.0");
    CHECK(s.rows() == 2);
    CHECK(s.cols() == 2);
    CHECK(s.ids == std::vector<std::string>{"a", "b"});
    CHECK(s.data(1, 0) == 3.0);
    CHECK(s.data(0, 1) == 2.0);
  }

  TEST_CASE("csv header is skipped only on request") {
    CHECK(parse_csv("id,x\na,1\n", CsvOptions{true}).rows() == 1);
    CHECK_THROWS_AS(parse_csv("id,x\na,1\n"), FormatError);
  }

  TEST_CASE("csv errors") {
    CHECK_THROWS_AS(parse_csv("a,1.0\nb,2.0,3.0"), FormatError);
    CHECK_THROWS_AS(parse_csv(""), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,1\na,2"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,nan"), ValidationError);
    CHECK_THROWS_AS(parse_csv("a,inf"), ValidationError);
  }

  TEST_CASE("csv round trip is exact through shortest decimal") {
    RepresentationSet s = RepresentationSet::from_matrix(test::gaussian(5, 3, 1));
    s.data(0, 0) = 0.1;
    s.data(1, 1) = 1e-300;
    const RepresentationSet back = parse_csv(format_csv(s));
    CHECK(back.ids == s.ids);
    CHECK(back.data == s.data);
  }

  TEST_CASE("repr1 round trip is bit identical") {
    RepresentationSet s = RepresentationSet::from_matrix(test::gaussian(5, 3, 2));
    s.ids = {"x", "y", "z", "w", "v"};
    s.meta["model"] = "toy";
    s.meta["layer"] = "3";
    const std::string bytes = encode_repr1(s);
    CHECK(bytes.compare(0, 6, std::string("REPR1\0", 6)) == 0);
    const RepresentationSet back = decode_repr1(bytes);
    CHECK(back.ids == s.ids);
    CHECK(back.meta == s.meta);
    CHECK(std::memcmp(back.data.data(), s.data.data(), sizeof(double) * 15) == 0);
  }

  TEST_CASE("repr1 layout is little-endian row-major") {
    Matrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    const std::string bytes = encode_repr1(RepresentationSet::from_matrix(m));
    std::uint32_t n = 0, d = 0;
    std::memcpy(&n, bytes.data() + 6, 4);
    std::memcpy(&d, bytes.data() + 10, 4);
    CHECK(n == 2);
    CHECK(d == 2);
    double second = 0.0;
    std::memcpy(&second, bytes.data() + 14 + 8, 8);
    CHECK(second == 2.0);
    std::uint64_t trailer = 0;
    std::memcpy(&trailer, bytes.data() + 14 + 32, 8);
    CHECK(trailer == bytes.size() - (14 + 32 + 8));
  }

  TEST_CASE("repr1 round trip of [[0]] and empty meta") {
    const RepresentationSet s = RepresentationSet::from_matrix(Matrix::Zero(1, 1));
    const RepresentationSet back = decode_repr1(encode_repr1(s));
    CHECK(back.data == s.data);
    CHECK(back.meta.empty());
  }

  TEST_CASE("repr1 rejects truncation and bad magic") {
    const std::string bytes = encode_repr1(RepresentationSet::from_matrix(Matrix::Ones(2, 2)));
    CHECK_THROWS_AS(decode_repr1(bytes.substr(0, bytes.size() - 3)), FormatError);
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_repr1(bad), FormatError);
  }

  TEST_CASE("file round trip and format inference") {
    const RepresentationSet s = RepresentationSet::from_matrix(test::gaussian(4, 2, 3));
    const fs::path p = scratch("roundtrip.repr1");
    save_representations(s, p, FileFormat::repr1);
    CHECK(infer_file_format(p) == FileFormat::repr1);
    CHECK(load_representations(p).data == s.data);
    const fs::path c = scratch("roundtrip.csv");
    save_representations(s, c, FileFormat::csv);
    CHECK(load_representations(c).data == s.data);
    CHECK_THROWS_AS(load_representations(scratch("missing.repr1")), IoError);
    CHECK_THROWS_AS(save_representations(s, "/nonexistent_dir/x.repr1", FileFormat::repr1), IoError);
  }

  TEST_CASE("npy v1.0 little-endian f8 C-order") {
    const std::string bytes =
        npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }", {1, 2, 3, 4, 5, 6});
    const RepresentationSet s = decode_npy(bytes);
    CHECK(s.rows() == 2);
    CHECK(s.cols() == 3);
    CHECK(s.data(1, 2) == 6.0);
    CHECK(s.ids == std::vector<std::string>{"0", "1"});
    CHECK_THROWS_AS(decode_npy(npy_bytes("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }",
                                         {1, 2, 3})),
                    FormatError);
    CHECK_THROWS_AS(decode_npy(npy_bytes("{'descr': '<f8', 'fortran_order': True, 'shape': (2, 3), }",
                                         {1, 2, 3, 4, 5, 6})),
                    FormatError);
    CHECK_THROWS_AS(decode_npy(npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (6,), }",
                                         {1, 2, 3, 4, 5, 6})),
                    FormatError);
  }

  TEST_CASE("align_by_ids intersects in first-argument order") {
    RepresentationSet a = parse_csv("a,1\nb,2\nc,3");
    RepresentationSet b = parse_csv("d,40\nc,30\nb,20");
    const auto [x, y] = align_by_ids(a, b);
    CHECK(x.ids == std::vector<std::string>{"b", "c"});
    CHECK(y.ids == x.ids);
    CHECK(y.data(0, 0) == 20.0);
    CHECK(y.data(1, 0) == 30.0);

    const auto [x2, y2] = align_by_ids(x, y);
    CHECK(x2.ids == x.ids);
    CHECK(y2.data == y.data);

    const auto [same_a, same_b] = align_by_ids(a, a);
    CHECK(same_a.data == a.data);
    CHECK(same_b.ids == a.ids);

    CHECK_THROWS_AS(align_by_ids(a, parse_csv("z,1")), ValidationError);
  }

  TEST_CASE("labels align to a set") {
    const fs::path p = scratch("labels.csv");
    write_file_bytes(p, "b,1\na,0\nc,1\n");
    const LabelSet labels = load_labels(p);
    CHECK(labels.num_classes() == 2);
    const LabelSet aligned = labels.aligned_to(parse_csv("a,1\nb,2\nc,3"));
    CHECK(aligned.labels == std::vector<int>{0, 1, 1});
  }
}
