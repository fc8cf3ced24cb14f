#include "pdeacc/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

namespace pdeacc {

namespace {

using Bytes = std::vector<unsigned char>;

Bytes slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Header tokens of a PNM file, skipping whitespace and '#' comments.
class PnmReader {
 public:
  explicit PnmReader(const Bytes& bytes) : bytes_(bytes) {}

  std::string token() {
    skip();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
    if (t.empty()) throw TruncatedImage("PGM header ends early");
    return t;
  }

  long number() {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      throw UnsupportedFormat("malformed PGM number '" + t + "'");
    }
    return std::stol(t);
  }

  // Exactly one whitespace byte separates the header from binary samples.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size()) throw TruncatedImage("PGM raster missing");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const Bytes& bytes_;
  std::size_t pos_ = 0;
};

GridField read_pgm(const Bytes& bytes, double dx) {
  PnmReader rd(bytes);
  const std::string magic = rd.token();
  const long width = rd.number();
  const long height = rd.number();
  const long maxval = rd.number();
  if (width <= 0 || height <= 0) throw UnsupportedFormat("PGM has empty extent");
  if (maxval != 255) throw UnsupportedFormat("only 8-bit PGM (maxval 255) is supported");
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  const double spacing = dx > 0.0 ? dx : unit_domain_dx(h, w);
  GridField u(h, w, spacing);
  if (magic == "P5") {
    const std::size_t start = rd.raster_start();
    if (bytes.size() < start + w * h) throw TruncatedImage("PGM raster is truncated");
    for (std::size_t i = 0; i < w * h; ++i) u[i] = bytes[start + i] / 255.0;
  } else {
    for (std::size_t i = 0; i < w * h; ++i) {
      const long v = rd.number();
      if (v > 255) throw UnsupportedFormat("PGM sample exceeds maxval");
      u[i] = static_cast<double>(v) / 255.0;
    }
  }
  return u;
}

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct MemorySource {
  const Bytes* bytes;
  std::size_t pos;
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  *message = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void png_read_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemorySource*>(png_get_io_ptr(png));
  if (src->pos + count > src->bytes->size()) png_error(png, "PNG data is truncated");
  std::copy_n(src->bytes->data() + src->pos, count, out);
  src->pos += count;
}

GridField read_png(const Bytes& bytes, double dx) {
  std::string message;
  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  if (!g.png) throw ImageError("cannot initialize PNG reader");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw ImageError("cannot initialize PNG reader");

  MemorySource src{&bytes, 0};
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::vector<png_byte> pixels;
  std::string kind_error;

  if (setjmp(png_jmpbuf(g.png))) {
    if (message.find("truncated") != std::string::npos || message.find("Read Error") != std::string::npos) {
      throw TruncatedImage("PNG: " + message);
    }
    throw ImageError("PNG: " + message);
  }
  png_set_read_fn(g.png, &src, png_read_memory);
  png_read_info(g.png, g.info);
  png_get_IHDR(g.png, g.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 8) {
    kind_error = "PNG must be 8-bit grayscale without alpha";
  } else {
    pixels.resize(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + static_cast<std::size_t>(r) * width;
    png_read_image(g.png, rows.data());
  }
  if (!kind_error.empty()) throw NotGrayscale(kind_error);

  const double spacing = dx > 0.0 ? dx : unit_domain_dx(height, width);
  GridField u(height, width, spacing);
  for (std::size_t i = 0; i < pixels.size(); ++i) u[i] = pixels[i] / 255.0;
  return u;
}

void write_png(const std::filesystem::path& path, const GridField& u) {
  std::vector<std::uint8_t> pixels = quantize(u);
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw ImageError("cannot open " + path.string() + " for writing");

  std::string message;
  PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  if (!g.png) throw ImageError("cannot initialize PNG writer");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw ImageError("cannot initialize PNG writer");
  std::vector<png_bytep> rows(u.rows());
  for (std::size_t r = 0; r < u.rows(); ++r) rows[r] = pixels.data() + r * u.cols();
  if (setjmp(png_jmpbuf(g.png))) throw ImageError("PNG: " + message);
  png_init_io(g.png, fp.get());
  png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(u.cols()), static_cast<png_uint_32>(u.rows()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  png_write_image(g.png, rows.data());
  png_write_end(g.png, nullptr);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1) from the top 53 bits.
double uniform_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

GridField read_image(const std::filesystem::path& path, double dx) {
  const Bytes bytes = slurp(path);
  static constexpr unsigned char png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8, png_magic)) return read_png(bytes, dx);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5' || bytes[1] == '2') return read_pgm(bytes, dx);
    throw NotGrayscale("only grayscale PGM (P2/P5) is supported");
  }
  if (bytes.size() < 2) throw TruncatedImage("file too short to identify: " + path.string());
  throw UnsupportedFormat("unrecognized image format: " + path.string());
}

std::vector<std::uint8_t> quantize(const GridField& u) {
  std::vector<std::uint8_t> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = std::isnan(u[i]) ? 0.0 : std::clamp(u[i], 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return out;
}

void write_image(const std::filesystem::path& path, const GridField& u) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  write_image(path, u, ext == ".png" ? ImageFormat::Png : ImageFormat::PgmBinary);
}

void write_image(const std::filesystem::path& path, const GridField& u, ImageFormat format) {
  if (format == ImageFormat::Png) {
    write_png(path, u);
    return;
  }
  const std::vector<std::uint8_t> pixels = quantize(u);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot open " + path.string() + " for writing");
  if (format == ImageFormat::PgmBinary) {
    out << "P5\n" << u.cols() << ' ' << u.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  } else {
    out << "P2\n" << u.cols() << ' ' << u.rows() << "\n255\n";
    for (std::size_t r = 0; r < u.rows(); ++r) {
      for (std::size_t c = 0; c < u.cols(); ++c) {
        out << static_cast<int>(pixels[r * u.cols() + c]) << (c + 1 < u.cols() ? ' ' : '\n');
      }
    }
  }
  if (!out) throw ImageError("failed writing " + path.string());
}

double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t pair = index / 2;
  const std::uint64_t key = splitmix64(seed ^ 0xD1B54A32D192ED03ULL);
  const double u1 = uniform_open(splitmix64(key + 2 * pair));
  const double u2 = uniform_open(splitmix64(key + 2 * pair + 1));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return index % 2 == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

SyntheticPair noisy_square(std::size_t size, std::uint64_t seed, double sigma) {
  if (size < 16) throw std::invalid_argument("noisy square needs size >= 16");
  const double dx = unit_domain_dx(size, size);
  GridField clean(size, size, dx, 0.25);
  const std::size_t side = size / 2;
  const std::size_t lo = (size - side) / 2;
  for (std::size_t r = lo; r < lo + side; ++r) {
    for (std::size_t c = lo; c < lo + side; ++c) clean(r, c) = 0.75;
  }
  GridField noisy = clean;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += sigma * standard_normal(seed, i);
  return {std::move(clean), std::move(noisy)};
}

GridField synthetic_scene(std::size_t size) {
  if (size < 16) throw std::invalid_argument("synthetic scene needs size >= 16");
  const double n = static_cast<double>(size);
  GridField u(size, size, unit_domain_dx(size, size), 0.2);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double y = (static_cast<double>(r) + 0.5) / n;
      const double x = (static_cast<double>(c) + 0.5) / n;
      double v = 0.2 + 0.2 * x;  // ramp
      if (x > 0.1 && x < 0.45 && y > 0.1 && y < 0.45) v = 0.85;
      const double dxc = x - 0.7, dyc = y - 0.3;
      if (dxc * dxc + dyc * dyc < 0.15 * 0.15) v = 0.6;
      if (y > 0.6 && y < 0.9 && x > 0.15 && x < 0.85) {
        v = (static_cast<int>(std::floor(x * 20.0)) % 2 == 0) ? 0.9 : 0.1;
      }
      u(r, c) = v;
    }
  }
  return u;
}

double psnr(const GridField& u, const GridField& ref) {
  if (!u.same_shape(ref)) throw ShapeError("psnr needs images of equal shape");
  double mse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - ref[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

InpaintMask InpaintMask::none(std::size_t rows, std::size_t cols) {
  return {rows, cols, std::vector<bool>(rows * cols, false)};
}

InpaintMask InpaintMask::from_image(const GridField& image) {
  InpaintMask m = none(image.rows(), image.cols());
  for (std::size_t i = 0; i < image.size(); ++i) m.missing[i] = image[i] >= 0.5;
  return m;
}

std::size_t InpaintMask::missing_count() const {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true));
}

GridField nearest_neighbor_fill(const GridField& g, const InpaintMask& mask) {
  if (mask.rows != g.rows() || mask.cols != g.cols() || mask.missing.size() != g.size()) {
    throw ShapeError("mask does not match the image");
  }
  if (mask.missing_count() == g.size()) throw std::invalid_argument("mask covers the whole image");
  GridField out = g;
  std::vector<bool> known(g.size());
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < g.size(); ++i) {
    known[i] = !mask.missing[i];
    if (known[i]) frontier.push_back(i);
  }
  const std::size_t R = g.rows(), C = g.cols();
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const std::size_t r = i / C, c = i % C;
    auto visit = [&](std::size_t j) {
      if (known[j]) return;
      known[j] = true;
      out[j] = out[i];
      frontier.push_back(j);
    };
    if (r > 0) visit(i - C);
    if (c > 0) visit(i - 1);
    if (c + 1 < C) visit(i + 1);
    if (r + 1 < R) visit(i + C);
  }
  return out;
}

InpaintSetup inpaint_spec(const GridField& g, const InpaintMask& mask, double lambda_known,
                          Regularizer regularizer, double damping) {
  GridField initial = nearest_neighbor_fill(g, mask);
  ProblemSpec spec;
  spec.data = g;
  spec.fidelity_weight = GridField::zeros_like(g, lambda_known);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask.missing[i]) spec.fidelity_weight[i] = 0.0;
  }
  spec.regularizer = regularizer;
  spec.damping = damping;
  spec.validate();
  return {std::move(spec), std::move(initial)};
}

}  // namespace pdeacc
