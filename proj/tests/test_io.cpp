#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>

#include "epd/io.hpp"
#include "oracles.hpp"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    const auto tick = std::chrono::steady_clock::now().time_since_epoch().count();
    path = std::filesystem::temp_directory_path() /
           ("epd-io-test-" + std::to_string(static_cast<long long>(tick)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("matrix save/load round-trips bit for bit") {
  TempDir dir;
  const auto a = testing_oracles::random_matrix(7, 5, 211);
  const std::string path = dir.file("a.mtx");
  epd::save_matrix(path, a);
  const auto back = epd::load_matrix<double>(path);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  CHECK((back - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vector save/load round-trips bit for bit") {
  TempDir dir;
  const auto x = testing_oracles::random_vector(23, 212);
  const std::string path = dir.file("x.txt");
  epd::save_vector(path, x);
  const auto back = epd::load_vector<double>(path);
  REQUIRE(back.size() == 23);
  CHECK((back - x).cwiseAbs().maxCoeff() == 0.0);

  epd::save_vector(path, epd::DenseVector<double>());
  CHECK(epd::load_vector<double>(path).size() == 0);
}

TEST_CASE("matrix loader accepts comment lines before the sizes") {
  TempDir dir;
  const std::string path = dir.file("c.mtx");
  write_text(path,
             "%%MatrixMarket matrix array real general\n"
             "% produced by hand\n"
             "2 2\n"
             "1\n2\n3\n4\n");
  const auto a = epd::load_matrix<double>(path);
  CHECK(a(0, 0) == 1.0);
  CHECK(a(1, 0) == 2.0);  // column-major order
  CHECK(a(0, 1) == 3.0);
  CHECK(a(1, 1) == 4.0);
}

TEST_CASE("matrix loader rejects malformed files") {
  TempDir dir;

  const std::string missing = dir.file("does-not-exist.mtx");
  CHECK_THROWS_AS(epd::load_matrix<double>(missing), std::runtime_error);

  const std::string bad_header = dir.file("bad-header.mtx");
  write_text(bad_header, "hello\n2 2\n1\n2\n3\n4\n");
  CHECK_THROWS_AS(epd::load_matrix<double>(bad_header), std::runtime_error);

  const std::string coordinate = dir.file("coordinate.mtx");
  write_text(coordinate, "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 5\n");
  CHECK_THROWS_AS(epd::load_matrix<double>(coordinate), std::runtime_error);

  const std::string no_dims = dir.file("no-dims.mtx");
  write_text(no_dims, "%%MatrixMarket matrix array real general\n");
  CHECK_THROWS_AS(epd::load_matrix<double>(no_dims), std::runtime_error);

  const std::string bad_dims = dir.file("bad-dims.mtx");
  write_text(bad_dims, "%%MatrixMarket matrix array real general\nfour two\n");
  CHECK_THROWS_AS(epd::load_matrix<double>(bad_dims), std::runtime_error);

  const std::string truncated = dir.file("truncated.mtx");
  write_text(truncated, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
  CHECK_THROWS_AS(epd::load_matrix<double>(truncated), std::runtime_error);
}

TEST_CASE("vector loader rejects missing or corrupt files") {
  TempDir dir;
  CHECK_THROWS_AS(epd::load_vector<double>(dir.file("nope.txt")), std::runtime_error);

  const std::string corrupt = dir.file("corrupt.txt");
  write_text(corrupt, "1.5\nnot-a-number\n");
  CHECK_THROWS_AS(epd::load_vector<double>(corrupt), std::runtime_error);
}
