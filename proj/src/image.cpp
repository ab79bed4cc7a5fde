#include "qtomo/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qtomo/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "rimg/rsin payloads are written as raw little-endian doubles");

namespace qtomo {

ImageGrid::ImageGrid(int side, double fill) : n(side) {
    if (side < 1) throw std::invalid_argument("ImageGrid: side must be >= 1");
    data.assign(std::size_t(side) * side, fill);
}

void PhantomSpec::validate() const {
    for (const auto& e : ellipses) {
        if (!(e.semi_a > 0.0) || !(e.semi_b > 0.0))
            throw std::invalid_argument("PhantomSpec: semi-axes must be positive");
        double reach = std::hypot(e.center_x, e.center_y) + std::max(e.semi_a, e.semi_b);
        if (reach > 1.0 + 1e-12)
            throw std::invalid_argument("PhantomSpec: ellipse leaves the unit disk");
    }
}

// Canonical head-phantom table, "modified" contrast variant (the widely used
// one: background ellipse 1.0, interior 0.2, features +-0.1 / -0.2).
// Columns: intensity, semi_a, semi_b, center_x, center_y, rotation_deg.
// Mirrored in data/shepp_logan.csv.
static constexpr double kSheppLogan[10][6] = {
    { 1.0, 0.6900, 0.9200,  0.00,  0.0000,   0.0},
    {-0.8, 0.6624, 0.8740,  0.00, -0.0184,   0.0},
    {-0.2, 0.1100, 0.3100,  0.22,  0.0000, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22,  0.0000,  18.0},
    { 0.1, 0.2100, 0.2500,  0.00,  0.3500,   0.0},
    { 0.1, 0.0460, 0.0460,  0.00,  0.1000,   0.0},
    { 0.1, 0.0460, 0.0460,  0.00, -0.1000,   0.0},
    { 0.1, 0.0460, 0.0230, -0.08, -0.6050,   0.0},
    { 0.1, 0.0230, 0.0230,  0.00, -0.6050,   0.0},
    { 0.1, 0.0230, 0.0460,  0.06, -0.6050,   0.0},
};

const PhantomSpec& shepp_logan_spec() {
    static const PhantomSpec spec = [] {
        PhantomSpec s;
        for (const auto& row : kSheppLogan) {
            Ellipse e;
            e.intensity = row[0];
            e.semi_a = row[1];
            e.semi_b = row[2];
            e.center_x = row[3];
            e.center_y = row[4];
            e.rotation = row[5] * M_PI / 180.0;
            s.ellipses.push_back(e);
        }
        s.validate();
        return s;
    }();
    return spec;
}

ImageGrid rasterize(const PhantomSpec& spec, int n) {
    spec.validate();
    ImageGrid img(n);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < n; ++y) {
        double py = img.coord(y);
        for (int x = 0; x < n; ++x) {
            double px = img.coord(x);
            double v = 0.0;
            for (const auto& e : spec.ellipses) {
                double dx = px - e.center_x;
                double dy = py - e.center_y;
                double c = std::cos(e.rotation), s = std::sin(e.rotation);
                double u = dx * c + dy * s;
                double w = -dx * s + dy * c;
                double q = (u / e.semi_a) * (u / e.semi_a) + (w / e.semi_b) * (w / e.semi_b);
                if (q <= 1.0) v += e.intensity;
            }
            img.at(y, x) = v;
        }
    }
    return img;
}

ImageGrid disk_phantom(int n, double cx, double cy, double r, double v) {
    if (n < 2) throw std::invalid_argument("disk_phantom: n must be >= 2");
    if (!(r > 0.0)) throw std::invalid_argument("disk_phantom: radius must be positive");
    if (std::abs(cx) + r > 1.0 || std::abs(cy) + r > 1.0)
        throw std::invalid_argument("disk_phantom: disk exceeds the [-1,1]^2 extent");
    ImageGrid img(n);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < n; ++y) {
        double py = img.coord(y);
        for (int x = 0; x < n; ++x) {
            double px = img.coord(x);
            double dx = px - cx, dy = py - cy;
            img.at(y, x) = (dx * dx + dy * dy <= r * r) ? v : 0.0;
        }
    }
    return img;
}

ImageGrid shepp_logan(int n) {
    if (n < 16) throw std::invalid_argument("shepp_logan: n must be >= 16");
    return rasterize(shepp_logan_spec(), n);
}

// ---------------------------------------------------------------- file I/O

void write_image(const ImageGrid& img, const std::filesystem::path& path, ImageFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    if (format == ImageFormat::rimg) {
        out << "RIMG1 " << img.n << " " << img.n << "\n";
        out.write(reinterpret_cast<const char*>(img.data.data()),
                  std::streamsize(img.data.size() * sizeof(double)));
    } else {
        double lo = *std::min_element(img.data.begin(), img.data.end());
        double hi = *std::max_element(img.data.begin(), img.data.end());
        double scale = (hi > lo) ? 65535.0 / (hi - lo) : 0.0; // constant image -> zeros
        out << "P5\n" << img.n << " " << img.n << "\n65535\n";
        std::vector<unsigned char> bytes;
        bytes.reserve(img.data.size() * 2);
        for (double v : img.data) {
            long q = std::lround((v - lo) * scale);
            q = std::clamp(q, 0L, 65535L);
            bytes.push_back(static_cast<unsigned char>(q >> 8)); // PGM is big-endian
            bytes.push_back(static_cast<unsigned char>(q & 0xff));
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    }
    if (!out) throw io_error("short write: " + path.string());
}

static ImageGrid read_rimg(std::ifstream& in, const std::filesystem::path& path) {
    std::string header;
    if (!std::getline(in, header)) throw io_error("truncated header: " + path.string());
    std::istringstream hs(header);
    std::string magic;
    int rows = 0, cols = 0;
    hs >> magic >> rows >> cols;
    if (magic != "RIMG1" || rows <= 0 || cols <= 0)
        throw io_error("malformed rimg header: " + path.string());
    if (rows != cols) throw io_error("rimg images must be square: " + path.string());
    ImageGrid img(rows);
    in.read(reinterpret_cast<char*>(img.data.data()),
            std::streamsize(img.data.size() * sizeof(double)));
    if (in.gcount() != std::streamsize(img.data.size() * sizeof(double)))
        throw io_error("truncated rimg payload: " + path.string());
    for (double v : img.data)
        if (!std::isfinite(v)) throw io_error("non-finite value in rimg: " + path.string());
    return img;
}

static ImageGrid read_pgm16(std::ifstream& in, const std::filesystem::path& path) {
    // header: "P5" whitespace width height maxval, then a single whitespace byte
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') { // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (!std::isspace(c)) {
                tok.push_back(char(c));
                while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(char(in.get()));
                return tok;
            }
        }
        throw io_error("truncated pgm header: " + path.string());
    };
    if (next_token() != "P5") throw io_error("malformed pgm magic: " + path.string());
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw io_error("malformed pgm header: " + path.string());
    }
    if (w <= 0 || h <= 0 || maxval != 65535)
        throw io_error("unsupported pgm header (need square 16-bit): " + path.string());
    if (w != h) throw io_error("pgm images must be square: " + path.string());
    in.get(); // single whitespace separating header and payload
    std::vector<unsigned char> bytes(std::size_t(w) * h * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (in.gcount() != std::streamsize(bytes.size()))
        throw io_error("truncated pgm payload: " + path.string());
    ImageGrid img(w);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        unsigned v = (unsigned(bytes[2 * i]) << 8) | bytes[2 * i + 1];
        img.data[i] = double(v) / 65535.0;
    }
    return img;
}

ImageGrid read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path.string());
    int c0 = in.peek();
    if (c0 == 'R') return read_rimg(in, path);
    if (c0 == 'P') return read_pgm16(in, path);
    throw io_error("unrecognized image magic: " + path.string());
}

} // namespace qtomo
