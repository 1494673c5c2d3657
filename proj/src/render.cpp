#include "sfw/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <zlib.h>

#include <fmt/format.h>

#include "sfw/error.hpp"

namespace sfw {
namespace {

constexpr std::array<Rgb, 8> kPalette = {{
    {255, 0, 0},      // 0
    {0, 200, 0},      // 1
    {0, 0, 255},      // 2
    {255, 220, 0},    // 3
    {255, 0, 255},    // 4
    {0, 220, 220},    // 5
    {255, 128, 0},    // 6
    {128, 0, 255},    // 7
}};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type,
               const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at,
                          static_cast<uInt>(out.size() - type_at));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

Rgb lerp(Rgb a, Rgb b, double t) {
  auto mix = [t](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (y - x) * t));
  };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGray{127, 127, 127};
constexpr Rgb kWallTint{140, 0, 0};

Rgb occupancy_color(CellState s) {
  switch (s) {
    case CellState::kFree: return kWhite;
    case CellState::kOccupied: return kBlack;
    case CellState::kUnknown: break;
  }
  return kGray;
}

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image must be non-empty");
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) set(x, y, fill);
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

Rgb k_color(int k) {
  if (k < 0) return kBlack;
  return kPalette[static_cast<std::size_t>(k) % kPalette.size()];
}

Image render_occupancy(const GridMap& map) {
  Image img(map.width(), map.height());
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      img.set(col, row, occupancy_color(map.state({col, row})));
    }
  }
  return img;
}

Image render_kgrid(const KGrid& kgrid) {
  Image img(kgrid.width(), kgrid.height());
  for (int row = 0; row < kgrid.height(); ++row) {
    for (int col = 0; col < kgrid.width(); ++col) {
      img.set(col, row, k_color(kgrid.at({col, row})));
    }
  }
  return img;
}

Image render_belief(const WallBeliefGrid& beliefs) {
  const auto& g = beliefs.geometry();
  Image img(g.width, g.height, kWhite);
  const double top = beliefs.max_belief();
  if (top <= 0.0) return img;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const double mu = beliefs.belief({col, row});
      if (mu > 0.0) img.set(col, row, lerp(kWhite, kWallTint, mu / top));
    }
  }
  return img;
}

void overlay_trajectory(Image& image, const GridGeometry& geometry,
                        std::span<const TrajectorySample> samples) {
  for (const auto& s : samples) {
    const CellIndex c = world_to_cell(geometry, s.position);
    image.set(c.col, c.row, k_color(s.k));
  }
}

Image render_reconstruction(const SparseResult& result,
                            std::span<const TrajectorySample> samples) {
  Image img = render_occupancy(result.occupancy);
  const auto& g = result.occupancy.geometry();
  const double top = result.beliefs.max_belief();
  if (top > 0.0) {
    for (int row = 0; row < g.height; ++row) {
      for (int col = 0; col < g.width; ++col) {
        const CellIndex c{col, row};
        const double mu = result.beliefs.belief(c);
        if (mu <= 0.0 || result.occupancy.state(c) == CellState::kOccupied) {
          continue;
        }
        img.set(col, row, lerp(img.at(col, row), kWallTint, mu / top));
      }
    }
  }
  overlay_trajectory(img, g, samples);
  return img;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width()));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height()));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit RGB, no interlace
  put_chunk(out, "IHDR", ihdr);

  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * image.height());
  const auto px = image.pixels();
  for (int y = 0; y < image.height(); ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), px.begin() + static_cast<std::ptrdiff_t>(y * stride),
               px.begin() + static_cast<std::ptrdiff_t>((y + 1) * stride));
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(),
                static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) != Z_OK) {
    throw Error(ErrorCode::kIoFailure, "zlib compression failed");
  }
  packed.resize(packed_size);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

void save_png(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot write {}", path.string()));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace sfw
