#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "uwr/linalg.hpp"
#include "uwr/sense.hpp"
#include "uwr/volume.hpp"

namespace uwr {

enum class PvolType : std::uint32_t { Complex64 = 0, Complex128 = 1 };

// On-disk layout: "PVOL1\0", then little-endian u32 X Y Z T L dtype, then
// re/im pairs with x fastest, then y, z, t and coil outermost.
struct Pvol {
  std::uint32_t x = 1, y = 1, z = 1, t = 1, l = 1;
  PvolType type = PvolType::Complex128;
  std::vector<cplx> data;

  Dims dims() const noexcept { return {x, y, z}; }
  std::size_t voxels() const noexcept { return std::size_t{x} * y * z; }
  std::size_t expected_size() const noexcept { return voxels() * t * l; }
};

void write_pvol(const std::filesystem::path& path, const Pvol& vol);
Pvol read_pvol(const std::filesystem::path& path);

Pvol to_pvol(const VolumeSeries& series, PvolType type = PvolType::Complex128);
// Coil images of a single full-FOV frame (T = 1, L coils).
Pvol to_pvol(const std::vector<ComplexVolume>& coil_images, PvolType type = PvolType::Complex128);
Pvol to_pvol(const CoilDataset& d, PvolType type = PvolType::Complex128);

VolumeSeries series_from_pvol(const Pvol& p);
std::vector<ComplexVolume> coil_volumes_from_pvol(const Pvol& p);
// Reduced-FOV data; the full FOV comes from the sensitivity maps.
CoilDataset dataset_from_pvol(const Pvol& p, const Dims& full_fov);

nlohmann::json to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// "<name>.pvol" -> "<name>.json"
std::filesystem::path sidecar_path(const std::filesystem::path& pvol_path);

}  // namespace uwr
