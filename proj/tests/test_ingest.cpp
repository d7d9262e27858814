#include "framesift/image_io.hpp"
#include "framesift/ingest.hpp"

#include "oracles.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <fstream>

using namespace framesift;
using namespace framesift::ingest;

namespace {

FramePixels gray_ramp(int w, int h)
{
    FramePixels f(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            f.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
    return f;
}

}  // namespace

TEST(LoadFrameDir, SortsNumericallyAndParsesIndices)
{
    oracle::TempDir dir;
    for (int i : {2, 1, 3})
        write_png(dir / fmt::format("{:06d}.png", i), FramePixels(4, 3, 3));
    const auto seq = load_frame_dir(dir.path(), 60.0);
    ASSERT_EQ(seq.size(), 3u);
    EXPECT_EQ(seq.frame_index(0), 1);
    EXPECT_EQ(seq.frame_index(2), 3);
    EXPECT_EQ(seq.width(), 4);
    EXPECT_DOUBLE_EQ(seq.time_of(3), 3.0 / 60.0);
    EXPECT_EQ(seq.video_id(), dir.path().filename().string());
}

TEST(LoadFrameDir, OutOfOrderNamesKeepNumericOrder)
{
    oracle::TempDir dir;
    write_ppm(dir / "000002.ppm", FramePixels(2, 2, 3, std::vector<std::uint8_t>(12, 2)));
    write_ppm(dir / "000001.ppm", FramePixels(2, 2, 3, std::vector<std::uint8_t>(12, 1)));
    const auto seq = load_frame_dir(dir.path(), 30.0, "v");
    ASSERT_EQ(seq.size(), 2u);
    EXPECT_EQ(seq.frame_index(0), 1);
    EXPECT_EQ(seq.frame(0).samples()[0], 1);
    EXPECT_EQ(seq.frame(1).samples()[0], 2);
}

TEST(LoadFrameDir, EmptyDirectoryIsAnError)
{
    oracle::TempDir dir;
    try {
        load_frame_dir(dir.path(), 30.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("no frames"), std::string::npos);
    }
}

TEST(LoadFrameDir, MixedDimensionsAreAnError)
{
    oracle::TempDir dir;
    write_png(dir / "000001.png", FramePixels(4, 3, 3));
    write_png(dir / "000002.png", FramePixels(5, 3, 3));
    EXPECT_THROW(load_frame_dir(dir.path(), 30.0), Error);
}

TEST(LoadFrameDir, UnreadableFileIsNamed)
{
    oracle::TempDir dir;
    write_png(dir / "000001.png", FramePixels(4, 3, 3));
    {
        std::ofstream out(dir / "000002.png", std::ios::binary);
        out << "garbage";
    }
    try {
        const auto seq = load_frame_dir(dir.path(), 30.0);
        seq.frame(1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("000002.png"), std::string::npos);
    }
}

TEST(FrameSequence, IndicesMustIncrease)
{
    std::vector<FrameSequence::Frame> frames{{2, FramePixels(2, 2, 1)}, {1, FramePixels(2, 2, 1)}};
    EXPECT_THROW(FrameSequence("v", 30.0, frames), Error);
    EXPECT_THROW(FrameSequence("v", 30.0, {}), Error);
}

TEST(CropRoi, SizesAndOffsets)
{
    const auto r = roi_rect(1920, 1080, 0.25);
    EXPECT_EQ(r, (Rect{240, 135, 1440, 810}));
    EXPECT_EQ(roi_rect(480, 270, 0.25), (Rect{60, 33, 360, 202}));

    const auto f = gray_ramp(4, 4);
    const auto c = crop_roi(f, 0.5);
    ASSERT_EQ(c.width(), 2);
    ASSERT_EQ(c.height(), 2);
    EXPECT_EQ(c.at(0, 0), f.at(1, 1));
    EXPECT_EQ(c.at(1, 1), f.at(2, 2));
}

TEST(CropRoi, ZeroFractionIsIdentity)
{
    const auto f = gray_ramp(7, 5);
    EXPECT_EQ(crop_roi(f, 0.0), f);
}

TEST(CropRoi, EmptyResultIsAnError)
{
    EXPECT_THROW(crop_roi(gray_ramp(3, 3), 0.9), Error);
    EXPECT_THROW(crop_roi(gray_ramp(3, 3), 1.0), Error);
}

TEST(CropRoi, ComposedCropsMatchCombinedFraction)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> frac(0.0, 0.6);
    std::uniform_int_distribution<int> dim(20, 400);
    for (int i = 0; i < 200; ++i) {
        const int w = dim(rng), h = dim(rng);
        const double f1 = frac(rng), f2 = frac(rng);
        const auto a = roi_rect(w, h, f1);
        const auto b = roi_rect(a.width, a.height, f2);
        const auto c = roi_rect(w, h, 1.0 - (1.0 - f1) * (1.0 - f2));
        EXPECT_LE(std::abs(b.width - c.width), 1) << w << "x" << h << " " << f1 << " " << f2;
        EXPECT_LE(std::abs(b.height - c.height), 1);
    }
}

TEST(BrightnessContrast, Examples)
{
    const FramePixels f(3, 1, 1, {100, 200, 0});
    EXPECT_EQ(adjust_brightness_contrast(f, 1.0, 0.0), f);
    EXPECT_EQ(adjust_brightness_contrast(f, 1.5, 0.0).at(1, 0), 255);
    EXPECT_EQ(adjust_brightness_contrast(f, 1.2, 10.0).at(0, 0), 130);
    EXPECT_EQ(adjust_brightness_contrast(f, 1.0, -5.0).at(2, 0), 0);
    EXPECT_THROW(adjust_brightness_contrast(f, 0.0, 0.0), Error);
}

TEST(ResizeBilinear, SameSizeIsIdentity)
{
    const auto f = gray_ramp(9, 6);
    EXPECT_EQ(resize_bilinear(f, 9, 6), f);
}

TEST(ResizeBilinear, ConstantStaysConstant)
{
    const FramePixels f(2, 2, 3, std::vector<std::uint8_t>(12, 77));
    const auto r = resize_bilinear(f, 13, 5);
    for (auto s : r.samples())
        EXPECT_EQ(s, 77);
}

TEST(ResizeBilinear, TwoPixelsToFour)
{
    // Corner pixel centres align: samples at x = 0, 1/3, 2/3, 1.
    const FramePixels f(2, 1, 1, {0, 255});
    const auto r = resize_bilinear(f, 4, 1);
    EXPECT_EQ(r, FramePixels(4, 1, 1, {0, 85, 170, 255}));
}

TEST(ResizeBilinear, InvalidSizeThrows)
{
    EXPECT_THROW(resize_bilinear(gray_ramp(3, 3), 0, 2), Error);
}

TEST(ToGrayscale, Examples)
{
    const FramePixels f(3, 1, 3, {255, 255, 255, 0, 0, 0, 255, 0, 0});
    const auto g = to_grayscale(f);
    EXPECT_EQ(g, FramePixels(3, 1, 1, {255, 0, 76}));
    EXPECT_EQ(to_grayscale(g), g);
}

TEST(ToGrayscale, GrayPixelsAreExact)
{
    FramePixels f(256, 1, 3);
    for (int v = 0; v < 256; ++v)
        for (int c = 0; c < 3; ++c)
            f.at(v, 0, c) = static_cast<std::uint8_t>(v);
    const auto g = to_grayscale(f);
    for (int v = 0; v < 256; ++v)
        EXPECT_EQ(g.at(v, 0), v);
}

TEST(ToGrayscale, MatchesRoundedLuma)
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> d(0, 255);
    for (int i = 0; i < 2000; ++i) {
        const int r = d(rng), g = d(rng), b = d(rng);
        const FramePixels f(1, 1, 3, {std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
        const long expect = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
        EXPECT_EQ(to_grayscale(f).at(0, 0), expect) << r << "," << g << "," << b;
    }
}

TEST(Preprocess, IsPureAndChained)
{
    std::mt19937_64 rng(1);
    FramePixels f(40, 30, 3);
    std::uniform_int_distribution<int> d(0, 255);
    for (auto& s : f.samples())
        s = static_cast<std::uint8_t>(d(rng));
    PreprocessSpec spec;
    spec.resize_width = 16;
    spec.resize_height = 12;
    const auto a = preprocess(f, spec);
    EXPECT_EQ(a, preprocess(f, spec));
    const auto manual = resize_bilinear(
        adjust_brightness_contrast(crop_roi(f, spec.crop_fraction), spec.gain, spec.bias), 16, 12);
    EXPECT_EQ(a, manual);
    EXPECT_EQ(roi_frame(f, spec), adjust_brightness_contrast(crop_roi(f, 0.25), 1.1, 5.0));
}
