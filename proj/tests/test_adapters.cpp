#include "framesift/adapters.hpp"
#include "framesift/image_io.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace framesift;
using namespace framesift::adapters;

namespace {

FramePixels noisy_rgb(int w, int h, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    FramePixels f(w, h, 3);
    for (auto& v : f.samples())
        v = static_cast<std::uint8_t>(rng() & 0xFF);
    return f;
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

}  // namespace

TEST(FrameKey, Format)
{
    EXPECT_EQ(frame_key("v1", 42), "v1/000042");
    EXPECT_EQ(frame_key("clip", 1234567), "clip/1234567");
}

TEST(Segmenter, NullFill)
{
    const auto f = noisy_rgb(10, 10, 1);
    const auto m = segment(SegmenterAdapter::null(), f, "v/000000");
    EXPECT_EQ(m.width(), 10);
    EXPECT_EQ(m.count(), 100u);
    EXPECT_EQ(SegmenterAdapter::null(false).segment(f, "v/000000").count(), 0u);
}

TEST(Segmenter, ManifestLookupIsBitExact)
{
    oracle::TempDir dir;
    std::mt19937_64 rng(2);
    const auto mask = oracle::random_mask(rng, 12, 8, 0.4);
    std::filesystem::create_directories(dir / "m");
    write_mask_png(dir / "m" / "a.png", mask);
    write_text(dir / "masks.csv", "frame_key,path\nv1/000042,m/a.png\n");
    const auto seg = SegmenterAdapter::manifest(dir / "masks.csv");
    const auto frame = noisy_rgb(12, 8, 3);
    EXPECT_EQ(seg.segment(frame, "v1/000042"), mask);
    EXPECT_EQ(seg.segment(frame, "v1/000042"), seg.segment(frame, "v1/000042"));
    try {
        seg.segment(frame, "v1/000043");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("v1/000043"), std::string::npos);
    }
    EXPECT_THROW(seg.segment(noisy_rgb(13, 8, 3), "v1/000042"), Error) << "dimension mismatch";
}

TEST(Segmenter, CommandPassesMaskThrough)
{
    oracle::TempDir dir;
    std::mt19937_64 rng(4);
    const auto mask = oracle::random_mask(rng, 9, 7, 0.5);
    BinaryMask inverted(9, 7);
    for (std::size_t i = 0; i < mask.size(); ++i)
        inverted.set(i, !mask[i]);
    write_mask_png(dir / "inv.png", inverted);
    // Referencing $IN in the template suppresses the appended arguments.
    const auto seg = SegmenterAdapter::command("cp '" + (dir / "inv.png").string() + "' \"$OUT\" #$IN");
    EXPECT_EQ(seg.segment(noisy_rgb(9, 7, 5), "k"), inverted);
    EXPECT_FALSE(seg.reentrant());

    // Default argument form: the frame itself comes back as a mask.
    const auto echo = SegmenterAdapter::command("cp");
    BinaryMask lit(6, 5);
    auto frame = FramePixels(6, 5, 3);
    frame.at(2, 3, 1) = 9;
    lit.set(2, 3, true);
    EXPECT_EQ(echo.segment(frame, "k"), lit);
}

TEST(Segmenter, CommandFailureCarriesDiagnostics)
{
    const auto seg = SegmenterAdapter::command("echo model exploded >&2; exit 3 #$IN");
    try {
        seg.segment(noisy_rgb(4, 4, 6), "v/000001");
        FAIL();
    } catch (const Error& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("exited with 3"), std::string::npos) << what;
        EXPECT_NE(what.find("model exploded"), std::string::npos) << what;
    }
    EXPECT_THROW(SegmenterAdapter::command("true").segment(noisy_rgb(4, 4, 6), "k"), Error)
        << "no mask written";
    EXPECT_THROW(SegmenterAdapter::command(""), Error);
}

TEST(Classifier, Constant)
{
    const auto c = ClassifierAdapter::constant(7);
    EXPECT_EQ(classify(c, noisy_rgb(3, 3, 1), "a"), (ClassPrediction{7, 1.0}));
    EXPECT_EQ(classify(c, noisy_rgb(5, 2, 2), "b"), (ClassPrediction{7, 1.0}));
    EXPECT_THROW(ClassifierAdapter::constant(0), Error);
    EXPECT_THROW(ClassifierAdapter::constant(117), Error);
}

TEST(Classifier, Manifest)
{
    oracle::TempDir dir;
    write_text(dir / "labels.csv", "frame_key,class_id\nv1/000042,23\nv1/000050,116\n");
    const auto c = ClassifierAdapter::manifest(dir / "labels.csv");
    const auto crop = noisy_rgb(4, 4, 1);
    EXPECT_EQ(c.classify(crop, "v1/000042"), (ClassPrediction{23, 1.0}));
    EXPECT_EQ(c.classify(crop, "v1/000050").class_id, 116);
    EXPECT_THROW(c.classify(crop, "v1/000043"), Error);

    const auto lenient = ClassifierAdapter::manifest(dir / "labels.csv", true);
    EXPECT_FALSE(lenient.predict(crop, "v1/000043").has_value());
    EXPECT_EQ(lenient.predict(crop, "v1/000042")->class_id, 23);

    write_text(dir / "bad.csv", "frame_key,class_id\nv1/000001,117\n");
    EXPECT_THROW(ClassifierAdapter::manifest(dir / "bad.csv"), Error);
}

TEST(Classifier, CommandParsesOutput)
{
    // `sh -c` swallows the appended "$IN" "$OUT" as positional parameters.
    auto emit = [](const std::string& line) {
        return ClassifierAdapter::command("sh -c 'echo " + line + "'");
    };
    const auto crop = noisy_rgb(4, 4, 1);
    EXPECT_EQ(emit("116 0.93").classify(crop, "k"), (ClassPrediction{116, 0.93}));
    EXPECT_THROW(emit("117 0.5").classify(crop, "k"), Error);
    EXPECT_THROW(emit("5 1.5").classify(crop, "k"), Error);
    EXPECT_THROW(emit("banana").classify(crop, "k"), Error);
    EXPECT_THROW(ClassifierAdapter::command("exit 1").classify(crop, "k"), Error);
}

TEST(Classifier, CommandRoundTripsCropBitExact)
{
    oracle::TempDir dir;
    const auto capture = dir / "seen.png";
    const auto c = ClassifierAdapter::command("cp \"$IN\" '" + capture.string() + "' && echo '3 0.5'");
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto crop = noisy_rgb(17 + int(seed), 11, seed);
        EXPECT_EQ(c.classify(crop, "k").class_id, 3);
        EXPECT_EQ(read_image(capture), crop);
    }
}

TEST(ParsePrediction, Lines)
{
    EXPECT_EQ(parse_prediction("  12 0.25\n"), (ClassPrediction{12, 0.25}));
    EXPECT_EQ(parse_prediction("1 0"), (ClassPrediction{1, 0.0}));
    EXPECT_THROW(parse_prediction("12"), Error);
    EXPECT_THROW(parse_prediction("12 0.5 extra"), Error);
    EXPECT_THROW(parse_prediction("12 nan"), Error);
    EXPECT_THROW(parse_prediction("0 0.5"), Error);
}
