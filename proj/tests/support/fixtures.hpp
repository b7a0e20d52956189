#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "typicality/dataset.hpp"

namespace fixtures {

using Rows = std::vector<std::vector<double>>;

/// Dataset with categories "c0".."c{K-1}", attributes "a0".., one group, ids "s0"...
typicality::Dataset make_dataset(const Rows& rows, const std::vector<std::size_t>& labels, std::size_t categories,
                                 std::vector<typicality::TypicalityFlag> flags = {});

/// n x m standard normal draws scaled by `sd` and shifted by `offset`.
Rows gaussian_rows(std::mt19937_64& rng, std::size_t n, std::size_t m, double sd = 1.0, double offset = 0.0);

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fixtures
