#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "pdeacc/energy.hpp"
#include "pdeacc/grid.hpp"

namespace pdeacc {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnsupportedFormat : public ImageError {
 public:
  using ImageError::ImageError;
};
class TruncatedImage : public ImageError {
 public:
  using ImageError::ImageError;
};
class NotGrayscale : public ImageError {
 public:
  using ImageError::ImageError;
};

/// Reads 8-bit grayscale PGM (P5 or P2, maxval 255) or PNG, scaled to [0, 1].
/// The format is detected from the file contents. dx defaults to the unit
/// domain spacing.
GridField read_image(const std::filesystem::path& path, double dx = 0.0);

enum class ImageFormat { PgmBinary, PgmAscii, Png };

/// Clamps to [0, 1] and stores round(255 u). The format follows the
/// extension (.png, otherwise binary PGM) unless given.
void write_image(const std::filesystem::path& path, const GridField& u);
void write_image(const std::filesystem::path& path, const GridField& u, ImageFormat format);

/// 8-bit samples the writer would store for u.
std::vector<std::uint8_t> quantize(const GridField& u);

/// Counter-based standard normal stream: sample i depends only on (seed, i).
/// Uniforms come from SplitMix64 of seed and counter; pairs go through the
/// Box-Muller transform.
double standard_normal(std::uint64_t seed, std::uint64_t index);

struct SyntheticPair {
  GridField clean;
  GridField noisy;
};

/// Centered square of side size/2 at 0.75 on a 0.25 background, plus
/// Gaussian noise of standard deviation 0.3. Neither image is clamped.
SyntheticPair noisy_square(std::size_t size, std::uint64_t seed, double sigma = 0.3);

/// Piecewise-smooth test scene on [0, 1]: a square, a disk, a ramp and a
/// stripe block.
GridField synthetic_scene(std::size_t size);

/// 10 log10(1 / MSE) for unit-range images; +inf when identical.
double psnr(const GridField& u, const GridField& ref);

/// true marks a missing sample.
struct InpaintMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<bool> missing;

  static InpaintMask none(std::size_t rows, std::size_t cols);
  /// Pixels at or above one half are missing.
  static InpaintMask from_image(const GridField& image);
  std::size_t missing_count() const;
};

struct InpaintSetup {
  ProblemSpec spec;
  GridField initial;  ///< nearest known sample copied into each missing cell
};

/// lambda = 0 on missing cells and lambda_known elsewhere.
InpaintSetup inpaint_spec(const GridField& g, const InpaintMask& mask, double lambda_known,
                          Regularizer regularizer, double damping = 0.0);

/// Multi-source breadth-first fill from known cells; ties resolve in
/// row-major discovery order.
GridField nearest_neighbor_fill(const GridField& g, const InpaintMask& mask);

}  // namespace pdeacc
