#pragma once

#include "framesift/core.hpp"

#include <string_view>

namespace framesift::masking {

/// Per-pixel real raster (entropy in bits).
struct RealMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

enum class Binarize { otsu, fixed };

struct EntropySpec {
    int radius = 5;
    int bins = 256;
    Binarize binarize = Binarize::otsu;
    double fixed_threshold = 0.0;  // bits, used when binarize == fixed

    void validate() const;
};

Binarize parse_binarize(std::string_view name);
std::string_view to_string(Binarize b);

/// Shannon entropy (base 2) of the intensity histogram inside the square
/// neighbourhood of side 2*radius+1, clipped at the borders.
RealMap local_entropy(const FramePixels& gray, const EntropySpec& spec);

/// True marks textured pixels. Otsu mode quantizes [0, log2(bins)] into 256
/// levels and keeps levels above the Otsu threshold.
BinaryMask entropy_mask(const FramePixels& gray, const EntropySpec& spec);

/// product AND NOT hand AND entropy.
BinaryMask combine_masks(const BinaryMask& product, const BinaryMask& hand, const BinaryMask& entropy);

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

struct Contour {
    int region_id = 0;
    std::size_t area = 0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounds
    std::vector<Point> boundary;
};

/// 8-connected component labels, 0 for background, 1.. in raster order of
/// each component's first pixel.
struct Labels {
    int width = 0;
    int height = 0;
    int count = 0;
    std::vector<int> ids;
};

Labels label_components(const BinaryMask& mask);

/// One contour per 8-connected component. The boundary is a clockwise
/// Moore-neighbour trace starting at the component's topmost-leftmost pixel.
std::vector<Contour> find_contours(const BinaryMask& mask);

enum class ContourMode { max, rms };

ContourMode parse_contour_mode(std::string_view name);
std::string_view to_string(ContourMode m);

/// max: largest area (ties to smallest region id). rms: every contour with
/// area above the root-mean-square area, falling back to max when none is.
std::vector<Contour> select_contours(const std::vector<Contour>& contours, ContourMode mode);

/// Bounding box grown by `pad`, clipped to the frame.
Rect contour_rect(const Contour& contour, int pad, int frame_width, int frame_height);
FramePixels crop_to_contour(const FramePixels& frame, const Contour& contour, int pad);

}  // namespace framesift::masking
