#include "framesift/core.hpp"

#include <fmt/format.h>

#include <numeric>

namespace framesift {

namespace {

void check_shape(int width, int height, int channels)
{
    if (width <= 0 || height <= 0)
        throw Error(fmt::format("invalid raster size {}x{}", width, height));
    if (channels != 1 && channels != 3)
        throw Error(fmt::format("unsupported channel count {}", channels));
}

}  // namespace

FramePixels::FramePixels(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels)
{
    check_shape(width, height, channels);
    samples_.assign(pixel_count() * channels, 0);
}

FramePixels::FramePixels(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples))
{
    check_shape(width, height, channels);
    if (samples_.size() != pixel_count() * static_cast<std::size_t>(channels))
        throw Error(fmt::format("sample count {} does not match {}x{}x{}", samples_.size(), width,
                                height, channels));
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height)
{
    if (width < 0 || height < 0)
        throw Error(fmt::format("invalid mask size {}x{}", width, height));
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const
{
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

FramePixels BinaryMask::to_image(std::uint8_t maxval) const
{
    FramePixels out(width_, height_, 1);
    auto dst = out.samples();
    for (std::size_t i = 0; i < bits_.size(); ++i)
        dst[i] = bits_[i] ? maxval : 0;
    return out;
}

BinaryMask BinaryMask::from_image(const FramePixels& image)
{
    BinaryMask mask(image.width(), image.height());
    const auto src = image.samples();
    const int ch = image.channels();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        bool on = false;
        for (int c = 0; c < ch; ++c)
            on = on || src[i * ch + c] != 0;
        mask.set(i, on);
    }
    return mask;
}

}  // namespace framesift
