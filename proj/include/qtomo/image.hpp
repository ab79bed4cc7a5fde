#pragma once
#include <cstddef>
#include <filesystem>
#include <vector>

namespace qtomo {

// n x n real pixel field on the fixed physical square [-1,1]^2.
// Row-major with row = y and col = x; pixel centers sit at -1 + (i+0.5)*2/n.
// Immutable by convention once filled; all pipelines share this type.
struct ImageGrid {
    int n = 0;
    std::vector<double> data;

    ImageGrid() = default;
    explicit ImageGrid(int side, double fill = 0.0);

    double& at(int y, int x) { return data[std::size_t(y) * n + x]; }
    double at(int y, int x) const { return data[std::size_t(y) * n + x]; }

    // physical coordinate of pixel center i along either axis
    double coord(int i) const { return -1.0 + (i + 0.5) * 2.0 / n; }
    double pixel_width() const { return 2.0 / n; }
};

struct Ellipse {
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_a = 0.0;    // semi-axis along the rotated x direction
    double semi_b = 0.0;    // semi-axis along the rotated y direction
    double rotation = 0.0;  // radians, counterclockwise
    double intensity = 0.0; // additive contribution
};

struct PhantomSpec {
    std::vector<Ellipse> ellipses;

    // semi-axes > 0 and every ellipse inside the unit disk
    // (||center|| + max semi-axis <= 1); throws std::invalid_argument
    void validate() const;
};

// The standard ten-ellipse head phantom (canonical geometry, "modified"
// contrast variant so values land in [0,1]). The same table is committed
// as data/shepp_logan.csv.
const PhantomSpec& shepp_logan_spec();

// Sum of ellipse intensities over all ellipses containing each pixel center.
ImageGrid rasterize(const PhantomSpec& spec, int n);

// Uniform disk, value v inside (pixel-center rule). Requires n >= 2 and the
// disk inside [-1,1]^2.
ImageGrid disk_phantom(int n, double cx, double cy, double r, double v);

// Shepp-Logan raster at side n (requires n >= 16).
ImageGrid shepp_logan(int n);

enum class ImageFormat {
    rimg,  // "RIMG1 <n> <n>\n" + n^2 little-endian float64, row-major; lossless
    pgm16, // binary PGM, maxval 65535, big-endian samples, min-max normalized
};

void write_image(const ImageGrid& img, const std::filesystem::path& path, ImageFormat format);

// Reads either format (sniffs the magic). pgm16 comes back as the normalized
// values in [0,1]-ish range divided out of 65535.
ImageGrid read_image(const std::filesystem::path& path);

} // namespace qtomo
