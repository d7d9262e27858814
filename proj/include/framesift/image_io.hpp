#pragma once

#include "framesift/core.hpp"

#include <filesystem>

namespace framesift {

struct ImageInfo {
    int width = 0;
    int height = 0;
    int channels = 0;
};

/// Reads header fields only. Supports PNG and binary PPM/PGM (P6/P5, maxval 255).
ImageInfo probe_image(const std::filesystem::path& path);

/// Decodes PNG or P5/P6 into 8-bit gray or RGB. Alpha is dropped.
FramePixels read_image(const std::filesystem::path& path);

/// zlib level 0..9; lower is faster, output decodes identically.
void write_png(const std::filesystem::path& path, const FramePixels& image, int compression_level = 6);

/// P5 for one channel, P6 for three. Round-trips bit-exactly with read_image.
void write_ppm(const std::filesystem::path& path, const FramePixels& image);

/// Chooses the encoder from the file extension (.png, .ppm, .pgm).
void write_image(const std::filesystem::path& path, const FramePixels& image);

BinaryMask read_mask(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace framesift
