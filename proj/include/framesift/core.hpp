#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace framesift {

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Round half away from zero, then clamp into the 8-bit range.
inline std::uint8_t saturate_u8(double v)
{
    const double r = std::round(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    bool operator==(const Rect&) const = default;
};

/// Row-major 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
class FramePixels {
public:
    FramePixels() = default;
    FramePixels(int width, int height, int channels);
    FramePixels(int width, int height, int channels, std::vector<std::uint8_t> samples);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return samples_.empty(); }

    std::span<const std::uint8_t> samples() const { return samples_; }
    std::span<std::uint8_t> samples() { return samples_; }

    std::uint8_t at(int x, int y, int c = 0) const { return samples_[offset(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return samples_[offset(x, y, c)]; }

    bool operator==(const FramePixels&) const = default;

private:
    std::size_t offset(int x, int y, int c) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> samples_;
};

/// Per-pixel boolean raster. Stored as bytes (0/1) rather than vector<bool>.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

    std::size_t count() const;
    bool same_shape(const BinaryMask& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// Export as a single-channel image with `maxval` for true pixels.
    FramePixels to_image(std::uint8_t maxval = 255) const;
    /// Any non-zero sample (in any channel) becomes true.
    static BinaryMask from_image(const FramePixels& image);

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

}  // namespace framesift
