#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fixtures {

typicality::Dataset make_dataset(const Rows& rows, const std::vector<std::size_t>& labels, std::size_t categories,
                                 std::vector<typicality::TypicalityFlag> flags) {
  std::vector<std::string> attrs, cats;
  const std::size_t m = rows.empty() ? 1 : rows.front().size();
  for (std::size_t i = 0; i < m; ++i) attrs.push_back("a" + std::to_string(i));
  for (std::size_t c = 0; c < categories; ++c) cats.push_back("c" + std::to_string(c));
  std::vector<typicality::Sample> samples;
  for (std::size_t i = 0; i < rows.size(); ++i)
    samples.push_back({"s" + std::to_string(i), rows[i], labels[i],
                       flags.empty() ? typicality::TypicalityFlag::typical : flags[i]});
  return typicality::Dataset(attrs, cats, typicality::AttributeGrouping::single(m), std::move(samples));
}

Rows gaussian_rows(std::mt19937_64& rng, std::size_t n, std::size_t m, double sd, double offset) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Rows rows(n, std::vector<double>(m));
  for (auto& r : rows)
    for (double& v : r) v = offset + sd * normal(rng);
  return rows;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("typicality-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace fixtures
