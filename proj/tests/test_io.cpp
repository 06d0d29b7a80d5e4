#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "movebench/io.h"

using namespace movebench;

TEST_CASE("crc32 matches the zlib check value") {
  // The standard test vector for the reflected 0xEDB88320 polynomial.
  CHECK(crc32("123456789") == 0xcbf43926u);
  CHECK(crc32("") == 0u);
  CHECK(crc32_hex("123456789") == "cbf43926");
}

TEST_CASE("crc32 seed chains incremental updates") {
  const std::string data = "the quick brown fox";
  const std::uint32_t whole = crc32(data);
  const std::uint32_t part = crc32(data.substr(9), crc32(data.substr(0, 9)));
  CHECK(whole == part);
}

TEST_CASE("format_g9 and quantize_g9 round-trip") {
  for (double v : {0.0, 1.0, -0.30000000000000004, 3.141592653589793,
                   1.0 / 3.0, 1e-12, -2.5e8}) {
    const double q = quantize_g9(v);
    CHECK(quantize_g9(q) == q);  // projection is idempotent
    CHECK(std::stod(format_g9(q)) == q);
    if (v != 0.0) {
      CHECK(std::abs(q - v) <= std::abs(v) * 1e-8);
    }
  }
}

TEST_CASE("append_g9_array joins with commas") {
  std::string out = "x=";
  const double vals[3] = {1.0, 0.5, -0.25};
  append_g9_array(out, vals, 3);
  CHECK(out == "x=1,0.5,-0.25");
}

TEST_CASE("file write/read round-trip") {
  const auto path =
      (std::filesystem::temp_directory_path() / "movebench_io_test.txt")
          .string();
  const std::string payload("line1\nline2\0bin", 15);
  write_file(path, payload);
  CHECK(read_file(path) == payload);
  std::filesystem::remove(path);
  CHECK_THROWS(read_file(path));
}
