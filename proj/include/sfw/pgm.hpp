#ifndef SFW_PGM_HPP_
#define SFW_PGM_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>

#include "sfw/grid.hpp"

namespace sfw {

// Binary P5 PGM with maxval 255. Comment lines are accepted anywhere in the
// header. PGM carries no metric scale: loaded maps get the geometry passed in
// (resolution / origin) or the sidecar file next to the image when present.
GridMap read_pgm(std::istream& in, double resolution = 1.0,
                 WorldPoint origin = {});
void write_pgm(const GridMap& map, std::ostream& out);

GridMap load_pgm(const std::filesystem::path& path);
void save_pgm(const GridMap& map, const std::filesystem::path& path);

// Sidecar is "<image path>.meta" holding resolution, origin_x, origin_y.
std::filesystem::path sidecar_path(const std::filesystem::path& image);
std::optional<GridGeometry> load_sidecar(const std::filesystem::path& image);
void save_sidecar(const GridGeometry& geometry,
                  const std::filesystem::path& image);

}  // namespace sfw

#endif  // SFW_PGM_HPP_
