#include "framesift/image_io.hpp"

#include <fmt/format.h>
#include <png.h>
#include <zlib.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace framesift {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& path)
{
    std::string ext = path.extension().string();
    for (auto& ch : ext)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw Error(fmt::format("cannot open '{}': {}", path.string(), std::strerror(errno)));
    return f;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in)
{
    std::string tok;
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n')
                ch = in.get();
        } else if (std::isspace(ch)) {
            if (!tok.empty())
                break;
        } else {
            tok.push_back(static_cast<char>(ch));
        }
        ch = in.get();
    }
    return tok;
}

struct PnmHeader {
    ImageInfo info;
    std::streamoff data_offset = 0;
};

PnmHeader read_pnm_header(std::istream& in, const fs::path& path)
{
    const std::string magic = pnm_token(in);
    PnmHeader hdr;
    if (magic == "P6")
        hdr.info.channels = 3;
    else if (magic == "P5")
        hdr.info.channels = 1;
    else
        throw Error(fmt::format("'{}': unsupported PNM magic '{}'", path.string(), magic));
    try {
        hdr.info.width = std::stoi(pnm_token(in));
        hdr.info.height = std::stoi(pnm_token(in));
        const int maxval = std::stoi(pnm_token(in));
        if (maxval != 255)
            throw Error(fmt::format("'{}': only maxval 255 is supported", path.string()));
    } catch (const std::logic_error&) {
        throw Error(fmt::format("'{}': malformed PNM header", path.string()));
    }
    if (hdr.info.width <= 0 || hdr.info.height <= 0)
        throw Error(fmt::format("'{}': invalid dimensions", path.string()));
    hdr.data_offset = in.tellg();
    return hdr;
}

ImageInfo probe_png(const fs::path& path)
{
    auto f = open_file(path, "rb");
    std::array<unsigned char, 26> head{};
    if (std::fread(head.data(), 1, head.size(), f.get()) != head.size() ||
        png_sig_cmp(head.data(), 0, 8) != 0 || std::memcmp(head.data() + 12, "IHDR", 4) != 0)
        throw Error(fmt::format("'{}': not a PNG file", path.string()));
    auto be32 = [&](int at) {
        return (static_cast<std::uint32_t>(head[at]) << 24) | (head[at + 1] << 16) |
               (head[at + 2] << 8) | head[at + 3];
    };
    ImageInfo info;
    info.width = static_cast<int>(be32(16));
    info.height = static_cast<int>(be32(20));
    const int color_type = head[25];
    info.channels = (color_type & PNG_COLOR_MASK_COLOR) ? 3 : 1;
    return info;
}

FramePixels read_png(const fs::path& path)
{
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw Error(fmt::format("'{}': {}", path.string(), image.message));
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const int channels = color ? 3 : 1;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error(fmt::format("'{}': {}", path.string(), image.message));
    }
    return FramePixels(static_cast<int>(image.width), static_cast<int>(image.height), channels,
                       std::move(buf));
}

FramePixels read_pnm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot open '{}'", path.string()));
    const auto hdr = read_pnm_header(in, path);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(hdr.info.width) * hdr.info.height *
                                  hdr.info.channels);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw Error(fmt::format("'{}': truncated pixel data", path.string()));
    return FramePixels(hdr.info.width, hdr.info.height, hdr.info.channels, std::move(buf));
}

}  // namespace

ImageInfo probe_image(const fs::path& path)
{
    const auto ext = lower_ext(path);
    if (ext == ".png")
        return probe_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(fmt::format("cannot open '{}'", path.string()));
        return read_pnm_header(in, path).info;
    }
    throw Error(fmt::format("'{}': unsupported image extension", path.string()));
}

FramePixels read_image(const fs::path& path)
{
    const auto ext = lower_ext(path);
    if (ext == ".png")
        return read_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        return read_pnm(path);
    throw Error(fmt::format("'{}': unsupported image extension", path.string()));
}

void write_png(const fs::path& path, const FramePixels& image, int compression_level)
{
    auto f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw Error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        throw Error(fmt::format("'{}': PNG encoding failed", path.string()));
    }
    png_init_io(png, f.get());
    png_set_compression_level(png, std::clamp(compression_level, 0, 9));
    // Adaptive filtering dominates encode time on noisy frames; fast levels skip it.
    if (compression_level <= 1)
    {
        png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
        png_set_compression_strategy(png, Z_HUFFMAN_ONLY);
    }
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), 8,
                 image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width()) * image.channels();
    auto* base = const_cast<std::uint8_t*>(image.samples().data());
    for (int y = 0; y < image.height(); ++y)
        png_write_row(png, base + y * stride);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_ppm(const fs::path& path, const FramePixels& image)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(fmt::format("cannot write '{}'", path.string()));
    out << (image.channels() == 3 ? "P6" : "P5") << '\n'
        << image.width() << ' ' << image.height() << '\n'
        << 255 << '\n';
    const auto s = image.samples();
    out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size()));
    if (!out)
        throw Error(fmt::format("write failed for '{}'", path.string()));
}

void write_image(const fs::path& path, const FramePixels& image)
{
    const auto ext = lower_ext(path);
    if (ext == ".png")
        write_png(path, image);
    else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        write_ppm(path, image);
    else
        throw Error(fmt::format("'{}': unsupported image extension", path.string()));
}

BinaryMask read_mask(const fs::path& path)
{
    return BinaryMask::from_image(read_image(path));
}

void write_mask_png(const fs::path& path, const BinaryMask& mask)
{
    write_png(path, mask.to_image(255));
}

}  // namespace framesift
