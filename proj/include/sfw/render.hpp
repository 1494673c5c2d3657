#ifndef SFW_RENDER_HPP_
#define SFW_RENDER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sfw/grid.hpp"
#include "sfw/kvis.hpp"
#include "sfw/sparse_inverse.hpp"

namespace sfw {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB raster, row 0 at the top.
class Image {
 public:
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  std::span<const std::uint8_t> pixels() const { return pixels_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

// k = 0 red, 1 green, 2 blue, 3 yellow; higher k cycle through further hues.
Rgb k_color(int k);

// Unknown gray(127), Free white, Occupied black.
Image render_occupancy(const GridMap& map);
// k palette; wall (Undefined) cells black.
Image render_kgrid(const KGrid& kgrid);
// White where no wall belief, shading to dark red at the grid's maximum.
Image render_belief(const WallBeliefGrid& beliefs);

// Colors each sample's cell with its k.
void overlay_trajectory(Image& image, const GridGeometry& geometry,
                        std::span<const TrajectorySample> samples);

// Reconstruction summary: occupancy with wall beliefs tinted in and the
// trajectory colored by k.
Image render_reconstruction(const SparseResult& result,
                            std::span<const TrajectorySample> samples);

std::vector<std::uint8_t> encode_png(const Image& image);
void save_png(const Image& image, const std::filesystem::path& path);

}  // namespace sfw

#endif  // SFW_RENDER_HPP_
