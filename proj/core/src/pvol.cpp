#include "uwr/pvol.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "uwr/error.hpp"

namespace uwr {
namespace {

constexpr std::array<char, 6> kMagic{'P', 'V', 'O', 'L', '1', '\0'};
constexpr std::size_t kHeaderBytes = kMagic.size() + 6 * 4;

template <class U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <class U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v == 0 || v > 0xFFFFFFFFu) {
    throw Error(ErrorKind::InvalidArgument, std::string("PVOL ") + what + " out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_pvol(const std::filesystem::path& path, const Pvol& vol) {
  if (vol.data.size() != vol.expected_size()) {
    throw Error(ErrorKind::MalformedField, "PVOL payload length does not match header");
  }
  const bool single = vol.type == PvolType::Complex64;
  std::string buf;
  buf.reserve(kHeaderBytes + vol.data.size() * (single ? 8 : 16));
  buf.append(kMagic.data(), kMagic.size());
  for (std::uint32_t h : {vol.x, vol.y, vol.z, vol.t, vol.l, static_cast<std::uint32_t>(vol.type)}) {
    put_le(buf, h);
  }
  for (const cplx& c : vol.data) {
    if (single) {
      put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(c.real())));
      put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(c.imag())));
    } else {
      put_le(buf, std::bit_cast<std::uint64_t>(c.real()));
      put_le(buf, std::bit_cast<std::uint64_t>(c.imag()));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

Pvol read_pvol(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorKind::MalformedField, path.string() + " is not a PVOL file");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data()) + kMagic.size();
  Pvol out;
  out.x = get_le<std::uint32_t>(p);
  out.y = get_le<std::uint32_t>(p + 4);
  out.z = get_le<std::uint32_t>(p + 8);
  out.t = get_le<std::uint32_t>(p + 12);
  out.l = get_le<std::uint32_t>(p + 16);
  const std::uint32_t code = get_le<std::uint32_t>(p + 20);
  if (out.x == 0 || out.y == 0 || out.z == 0 || out.t == 0 || out.l == 0) {
    throw Error(ErrorKind::MalformedField, "PVOL header has a zero dimension");
  }
  if (code > 1) throw Error(ErrorKind::MalformedField, "unknown PVOL dtype " + std::to_string(code));
  out.type = static_cast<PvolType>(code);
  const std::size_t width = out.type == PvolType::Complex64 ? 8 : 16;
  const std::size_t n = out.expected_size();
  if (buf.size() - kHeaderBytes != n * width) {
    throw Error(ErrorKind::MalformedField, "PVOL payload length mismatch in " + path.string());
  }
  out.data.resize(n);
  const unsigned char* q = p + 24;
  for (std::size_t i = 0; i < n; ++i, q += width) {
    if (width == 8) {
      out.data[i] = cplx(std::bit_cast<float>(get_le<std::uint32_t>(q)),
                         std::bit_cast<float>(get_le<std::uint32_t>(q + 4)));
    } else {
      out.data[i] = cplx(std::bit_cast<double>(get_le<std::uint64_t>(q)),
                         std::bit_cast<double>(get_le<std::uint64_t>(q + 8)));
    }
  }
  return out;
}

Pvol to_pvol(const VolumeSeries& series, PvolType type) {
  Pvol p;
  const Dims d = series.dims();
  p.x = checked_u32(d.x, "X");
  p.y = checked_u32(d.y, "Y");
  p.z = checked_u32(d.z, "Z");
  p.t = checked_u32(series.frames(), "T");
  p.l = 1;
  p.type = type;
  p.data.reserve(p.expected_size());
  for (const auto& f : series) p.data.insert(p.data.end(), f.values().begin(), f.values().end());
  return p;
}

Pvol to_pvol(const std::vector<ComplexVolume>& coil_images, PvolType type) {
  if (coil_images.empty()) throw Error(ErrorKind::InvalidArgument, "no coil images");
  Pvol p;
  const Dims d = coil_images.front().dims();
  p.x = checked_u32(d.x, "X");
  p.y = checked_u32(d.y, "Y");
  p.z = checked_u32(d.z, "Z");
  p.t = 1;
  p.l = checked_u32(coil_images.size(), "L");
  p.type = type;
  p.data.reserve(p.expected_size());
  for (const auto& c : coil_images) {
    if (c.dims() != d) throw Error(ErrorKind::ShapeMismatch, "coil images differ in size");
    p.data.insert(p.data.end(), c.values().begin(), c.values().end());
  }
  return p;
}

Pvol to_pvol(const CoilDataset& d, PvolType type) {
  Pvol p;
  const Dims r = d.geometry().reduced_dims();
  p.x = checked_u32(r.x, "X");
  p.y = checked_u32(r.y, "Y");
  p.z = checked_u32(r.z, "Z");
  p.t = checked_u32(d.frames(), "T");
  p.l = checked_u32(d.coils(), "L");
  p.type = type;
  const auto s = d.samples();
  p.data.assign(s.begin(), s.end());
  return p;
}

VolumeSeries series_from_pvol(const Pvol& p) {
  if (p.l != 1) throw Error(ErrorKind::ShapeMismatch, "expected a single-channel PVOL, got L=" + std::to_string(p.l));
  std::vector<ComplexVolume> frames;
  const std::size_t n = p.voxels();
  for (std::size_t t = 0; t < p.t; ++t) {
    ComplexVolume v(p.dims());
    std::copy_n(p.data.begin() + static_cast<std::ptrdiff_t>(t * n), n, v.values().begin());
    frames.push_back(std::move(v));
  }
  return VolumeSeries(std::move(frames));
}

std::vector<ComplexVolume> coil_volumes_from_pvol(const Pvol& p) {
  if (p.t != 1) throw Error(ErrorKind::ShapeMismatch, "expected T=1 coil images");
  std::vector<ComplexVolume> out;
  const std::size_t n = p.voxels();
  for (std::size_t l = 0; l < p.l; ++l) {
    ComplexVolume v(p.dims());
    std::copy_n(p.data.begin() + static_cast<std::ptrdiff_t>(l * n), n, v.values().begin());
    out.push_back(std::move(v));
  }
  return out;
}

CoilDataset dataset_from_pvol(const Pvol& p, const Dims& full_fov) {
  if (p.x != full_fov.x || p.z != full_fov.z || p.y == 0 || full_fov.y % p.y != 0) {
    throw Error(ErrorKind::GeometryMismatch, "acquired data do not fit the sensitivity FOV");
  }
  const SenseGeometry g(full_fov, full_fov.y / p.y);
  CoilDataset d(g, p.l, p.t);
  std::copy(p.data.begin(), p.data.end(), d.samples().begin());
  return d;
}

nlohmann::json to_json(const CMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix cmatrix_from_json(const nlohmann::json& j) {
  try {
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        m(r, c) = cplx(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedField, std::string("bad matrix JSON: ") + e.what());
  }
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedField, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  f << doc.dump(2) << '\n';
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::filesystem::path sidecar_path(const std::filesystem::path& pvol_path) {
  auto p = pvol_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace uwr
