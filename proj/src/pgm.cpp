#include "sfw/pgm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include <fmt/format.h>

#include "sfw/error.hpp"
#include "sfw/keyvalue.hpp"

namespace sfw {
namespace {

// Skips whitespace and '#' comments, then reads one unsigned header token.
int read_header_int(std::istream& in) {
  for (;;) {
    const int ch = in.peek();
    if (ch == EOF) break;
    if (ch == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  std::string token;
  while (std::isdigit(in.peek())) token.push_back(static_cast<char>(in.get()));
  if (token.empty() || token.size() > 9) {
    throw Error(ErrorCode::kMalformedFile, "bad PGM header field");
  }
  return std::stoi(token);
}

}  // namespace

GridMap read_pgm(std::istream& in, double resolution, WorldPoint origin) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw Error(ErrorCode::kMalformedFile, "not a binary PGM (P5)");
  }
  const int width = read_header_int(in);
  const int height = read_header_int(in);
  const int maxval = read_header_int(in);
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kMalformedFile, "PGM has empty dimensions");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("unsupported PGM maxval {}", maxval));
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(in.get())) {
    throw Error(ErrorCode::kMalformedFile, "missing PGM raster separator");
  }

  GridGeometry geometry{width, height, resolution, origin};
  std::vector<std::uint8_t> cells(geometry.cell_count());
  in.read(reinterpret_cast<char*>(cells.data()),
          static_cast<std::streamsize>(cells.size()));
  if (static_cast<std::size_t>(in.gcount()) != cells.size()) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("PGM raster truncated: expected {} bytes, got {}",
                            cells.size(), in.gcount()));
  }
  return GridMap(geometry, std::move(cells));
}

void write_pgm(const GridMap& map, std::ostream& out) {
  out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  const auto cells = map.cells();
  out.write(reinterpret_cast<const char*>(cells.data()),
            static_cast<std::streamsize>(cells.size()));
}

GridMap load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot open {}", path.string()));
  }
  const auto meta = load_sidecar(path);
  if (meta) return read_pgm(in, meta->resolution, meta->origin);
  return read_pgm(in);
}

void save_pgm(const GridMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot write {}", path.string()));
  }
  write_pgm(map, out);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("write failed for {}", path.string()));
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
  return std::filesystem::path(image.string() + ".meta");
}

std::optional<GridGeometry> load_sidecar(const std::filesystem::path& image) {
  const auto path = sidecar_path(image);
  if (!std::filesystem::exists(path)) return std::nullopt;
  const auto kv = KeyValueFile::load(path);
  GridGeometry g;
  g.resolution = kv.get_double("resolution");
  g.origin.x = kv.has("origin_x") ? kv.get_double("origin_x") : 0.0;
  g.origin.y = kv.has("origin_y") ? kv.get_double("origin_y") : 0.0;
  return g;
}

void save_sidecar(const GridGeometry& geometry,
                  const std::filesystem::path& image) {
  KeyValueFile kv;
  kv.set("resolution", geometry.resolution);
  kv.set("origin_x", geometry.origin.x);
  kv.set("origin_y", geometry.origin.y);
  kv.save(sidecar_path(image));
}

}  // namespace sfw
