#pragma once

#include <string>
#include <vector>

#include "bridgelab/common.hpp"

namespace bridgelab {

// Flat binary dataset, magic "BRDS":
//   "BRDS" | u32 version=1 | u32 dim | u64 count | f64 rows, row-major little-endian
void save_dataset(const std::string& path, const std::vector<Vec>& rows, int dim);
std::vector<Vec> load_dataset(const std::string& path, int* dim_out = nullptr);

}  // namespace bridgelab
