#include "palmdt/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <string>

#include "palmdt/error.hpp"

namespace palmdt {

namespace {

void check_dimensions(int width, int height, std::size_t count) {
    if (width < GrayImage::kMinSide || height < GrayImage::kMinSide) {
        throw Error("image must be at least 16x16, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    }
    if (count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error("pixel count does not match image dimensions");
    }
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open image: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// PGM

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(const std::vector<std::uint8_t>& data) : data_(data) {}

    long next_int() {
        skip_space_and_comments();
        if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) {
            throw Error("malformed PGM header");
        }
        long value = 0;
        while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
            value = value * 10 + (data_[pos_] - '0');
            if (value > (1L << 30)) {
                throw Error("malformed PGM header");
            }
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() const { return pos_ + 1; }

private:
    void skip_space_and_comments() {
        while (pos_ < data_.size()) {
            if (data_[pos_] == '#') {
                while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
            } else if (std::isspace(data_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<std::uint8_t>& data_;
    std::size_t pos_ = 2;
};

GrayImage decode_pgm(const std::vector<std::uint8_t>& data, const LoadOptions& options) {
    PgmHeaderReader header(data);
    const long width = header.next_int();
    const long height = header.next_int();
    const long maxval = header.next_int();
    if (width == 0 || height == 0) {
        throw Error("zero-dimension image");
    }
    if (maxval <= 0 || maxval > 65535) {
        throw Error("malformed PGM header");
    }
    const bool wide = maxval > 255;
    if (wide && !options.downconvert_16bit) {
        throw Error("16-bit images are not supported (enable downconversion)");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t offset = header.raster_offset();
    const std::size_t bytes = count * (wide ? 2 : 1);
    if (offset + bytes > data.size()) {
        throw Error("truncated PGM raster");
    }
    std::vector<std::uint8_t> pixels(count);
    for (std::size_t i = 0; i < count; ++i) {
        long v = wide ? (data[offset + 2 * i] << 8) | data[offset + 2 * i + 1] : data[offset + i];
        long scale = wide ? 65535 : 255;
        if (maxval != scale) {
            v = (v * scale + maxval / 2) / maxval;
        }
        pixels[i] = static_cast<std::uint8_t>(wide ? (v >> 8) : v);
    }
    check_dimensions(static_cast<int>(width), static_cast<int>(height), count);
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

// ---------------------------------------------------------------------------
// PNG

struct PngReadHandle {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadHandle() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteHandle {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteHandle() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct MemoryReader {
    const std::vector<std::uint8_t>* data;
    std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
    auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (reader->pos + length > reader->data->size()) {
        png_error(png, "truncated stream");
    }
    std::copy_n(reader->data->data() + reader->pos, length, out);
    reader->pos += length;
}

// libpng reports failures by longjmp; the message is parked here and rethrown
// as an Error once control is back in C++ frames.
struct PngErrorSink {
    char message[256] = {};
};

[[noreturn]] void png_store_error(png_structp png, png_const_charp message) {
    auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "PNG: %s", message);
    png_longjmp(png, 1);
}

void png_quiet(png_structp, png_const_charp) {}

GrayImage decode_png(const std::vector<std::uint8_t>& data, const LoadOptions& options) {
    PngReadHandle h;
    PngErrorSink sink;
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_store_error, png_quiet);
    if (!h.png) throw Error("PNG: out of memory");
    h.info = png_create_info_struct(h.png);
    if (!h.info) throw Error("PNG: out of memory");

    MemoryReader reader{&data, 0};
    // Held by pointer: locals modified after setjmp are indeterminate after a longjmp.
    struct Buffers {
        std::vector<std::uint8_t> pixels;
        std::vector<png_bytep> rows;
    };
    const auto buffers = std::make_unique<Buffers>();
    if (setjmp(png_jmpbuf(h.png))) {
        throw Error(sink.message);
    }
    png_set_read_fn(h.png, &reader, read_from_memory);
    png_read_info(h.png, h.info);

    const png_uint_32 width = png_get_image_width(h.png, h.info);
    const png_uint_32 height = png_get_image_height(h.png, h.info);
    const int depth = png_get_bit_depth(h.png, h.info);
    const int color = png_get_color_type(h.png, h.info);
    if (width == 0 || height == 0) {
        throw Error("zero-dimension image");
    }
    if (depth == 16) {
        if (!options.downconvert_16bit) {
            throw Error("16-bit images are not supported (enable downconversion)");
        }
        png_set_strip_16(h.png);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(h.png);
    if (png_get_valid(h.png, h.info, PNG_INFO_tRNS)) png_set_strip_alpha(h.png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(h.png);
    png_read_update_info(h.png, h.info);
    const int channels = png_get_channels(h.png, h.info);
    if ((channels != 1 && channels != 3) || png_get_bit_depth(h.png, h.info) != 8) {
        throw Error("unsupported format");
    }

    auto& pixels = buffers->pixels;
    pixels.resize(static_cast<std::size_t>(width) * height * channels);
    buffers->rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        buffers->rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * channels;
    }
    png_read_image(h.png, buffers->rows.data());
    if (channels == 3) {
        // Rec. 601 luma.
        for (std::size_t i = 0, n = static_cast<std::size_t>(width) * height; i < n; ++i) {
            const double luma = 0.299 * pixels[3 * i] + 0.587 * pixels[3 * i + 1] + 0.114 * pixels[3 * i + 2];
            pixels[i] = static_cast<std::uint8_t>(std::lround(luma));
        }
        pixels.resize(static_cast<std::size_t>(width) * height);
    }
    png_read_end(h.png, nullptr);
    check_dimensions(static_cast<int>(width), static_cast<int>(height), pixels.size());
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

void write_bytes(const std::filesystem::path& path, const std::string& header,
                 std::span<const std::uint8_t> raster) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out << header;
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height, pixels_.size());
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill)) {}

BinaryImage::BinaryImage(int width, int height)
    : BinaryImage(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            static_cast<std::size_t>(std::max(height, 0)))) {}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width <= 0 || height <= 0) {
        throw Error("binary image dimensions must be positive");
    }
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error("bit count does not match image dimensions");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryImage::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

PointSet::PointSet(std::vector<Point> points) {
    std::set<Point> seen;
    points_.reserve(points.size());
    for (const Point& p : points) {
        if (seen.insert(p).second) {
            points_.push_back(p);
        }
    }
}

GrayImage load_grayscale(const std::filesystem::path& path, const LoadOptions& options) {
    if (!std::filesystem::exists(path)) {
        throw Error("missing file: " + path.string());
    }
    const std::vector<std::uint8_t> data = read_all(path);
    if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') {
        return decode_pgm(data, options);
    }
    static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (data.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), data.begin())) {
        return decode_png(data, options);
    }
    throw Error("unsupported format");
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
    const std::string header =
        "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    write_bytes(path, header, image.pixels());
}

void save_pgm(const BinaryImage& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> raster(mask.bits().size());
    std::transform(mask.bits().begin(), mask.bits().end(), raster.begin(),
                   [](std::uint8_t b) { return b ? std::uint8_t{0} : std::uint8_t{255}; });
    const std::string header =
        "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
    write_bytes(path, header, raster);
}

void save_png(const GrayImage& image, const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.string().c_str(), "wb"),
                                                          &std::fclose);
    if (!file) {
        throw Error("cannot write file: " + path.string());
    }
    PngWriteHandle h;
    PngErrorSink sink;
    h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_store_error, png_quiet);
    if (!h.png) throw Error("PNG: out of memory");
    h.info = png_create_info_struct(h.png);
    if (!h.info) throw Error("PNG: out of memory");
    if (setjmp(png_jmpbuf(h.png))) {
        throw Error(sink.message);
    }

    png_init_io(h.png, file.get());
    png_set_IHDR(h.png, h.info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(h.png, 9);
    png_write_info(h.png, h.info);
    for (int y = 0; y < image.height(); ++y) {
        png_write_row(h.png, image.pixels().data() + static_cast<std::size_t>(y) * image.width());
    }
    png_write_end(h.png, nullptr);
}

}  // namespace palmdt
