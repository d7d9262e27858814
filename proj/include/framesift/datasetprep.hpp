#pragma once

#include "framesift/core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string_view>

namespace framesift::datasetprep {

using Rgb = std::array<std::uint8_t, 3>;

enum class Shape { rectangular, circular };

Shape parse_shape(std::string_view name);
std::string_view to_string(Shape s);

struct GradientSpec {
    Shape shape = Shape::circular;
    Rgb inner_color{255, 255, 255};
    Rgb outer_color{0, 0, 0};
    /// Pixel-centre coordinates; defaults to the image centre.
    std::optional<std::array<double, 2>> center;
};

/// color = inner * ratio + outer * (1 - ratio), ratio = 1 - d clamped to
/// [0, 1]. Circular d is the Euclidean distance over the farthest-corner
/// distance; rectangular d is max(|dx|/hx, |dy|/hy) with hx, hy the largest
/// horizontal/vertical reach from the centre.
FramePixels gradient_background(int width, int height, const GradientSpec& spec);

/// Object where the mask is set, background elsewhere.
FramePixels composite(const FramePixels& object, const BinaryMask& mask, const FramePixels& background);

struct ColorRange {
    std::uint8_t lo = 0;
    std::uint8_t hi = 255;
};

struct RandomGradientOptions {
    ColorRange inner{200, 255};
    ColorRange outer{140, 230};
};

GradientSpec random_gradient(std::mt19937_64& rng, const RandomGradientOptions& options = {});

struct PrepOptions {
    std::filesystem::path images;
    std::filesystem::path masks;   // same relative layout as images
    std::filesystem::path output;  // mirrors the images tree
    std::uint64_t seed = 0;
    RandomGradientOptions colors;
};

/// Replaces the background of every image under `images` and writes
/// `manifest.csv` (input,output,shape,inner_rgb,outer_rgb,seed) into the
/// output root. Returns the number of images written.
std::size_t prepare_directory(const PrepOptions& options);

}  // namespace framesift::datasetprep
