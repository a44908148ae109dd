#include "bridgelab/dataset_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace bridgelab {

namespace {
constexpr char kMagic[4] = {'B', 'R', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_dataset(const std::string& path, const std::vector<Vec>& rows, int dim) {
  if (dim <= 0) throw std::invalid_argument("save_dataset: dim must be positive");
  for (const Vec& r : rows) {
    if (static_cast<int>(r.size()) != dim) {
      throw std::invalid_argument("save_dataset: row dimension mismatch");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open dataset for writing: " + path);
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  const std::uint32_t d = static_cast<std::uint32_t>(dim);
  const std::uint64_t n = rows.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const Vec& r : rows) {
    out.write(reinterpret_cast<const char*>(r.data()),
              static_cast<std::streamsize>(r.size() * sizeof(double)));
  }
  if (!out) throw IoError("dataset write failed: " + path);
}

std::vector<Vec> load_dataset(const std::string& path, int* dim_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a dataset file (bad magic): " + path);
  }
  std::uint32_t version = 0, d = 0;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in) throw IoError("dataset truncated: " + path);
  if (version != kVersion) {
    throw IoError("unsupported dataset version " + std::to_string(version) + ": " + path);
  }
  if (d == 0 || d > (1u << 24)) throw IoError("implausible dataset dim: " + path);
  std::vector<Vec> rows(n, Vec(d));
  for (Vec& r : rows) {
    in.read(reinterpret_cast<char*>(r.data()),
            static_cast<std::streamsize>(r.size() * sizeof(double)));
    if (!in) throw IoError("dataset truncated: " + path);
  }
  if (dim_out) *dim_out = static_cast<int>(d);
  return rows;
}

}  // namespace bridgelab
