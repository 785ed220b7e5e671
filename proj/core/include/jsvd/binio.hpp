#pragma once
// Little-endian raw IO helpers shared by the matrix and batch formats.
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace jsvd::binio {

static_assert(std::endian::native == std::endian::little,
              "the on-disk formats are little-endian and no byte swapping is implemented");

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }
  template <class T>
  void put(T v) {
    bytes(&v, sizeof v);
  }
  void doubles(const double* p, std::size_t n) { bytes(p, n * sizeof(double)); }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("truncated or unreadable file: " + path_);
  }
  template <class T>
  T get() {
    T v;
    bytes(&v, sizeof v);
    return v;
  }
  void doubles(double* p, std::size_t n) { bytes(p, n * sizeof(double)); }
  void expect_magic(const char (&magic)[9]) {
    char buf[8];
    bytes(buf, 8);
    if (std::memcmp(buf, magic, 8) != 0)
      throw std::runtime_error("bad magic in " + path_ + " (expected " + std::string(magic, 8) + ")");
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace jsvd::binio
