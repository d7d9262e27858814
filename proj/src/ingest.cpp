#include "framesift/ingest.hpp"

#include "framesift/image_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace framesift::ingest {

namespace fs = std::filesystem;

FrameSequence::FrameSequence(std::string video_id, double frame_rate, std::vector<Frame> frames)
    : video_id_(std::move(video_id)), frame_rate_(frame_rate)
{
    if (!(frame_rate > 0.0))
        throw Error("frame rate must be positive");
    if (frames.empty())
        throw Error("no frames");
    width_ = frames.front().pixels.width();
    height_ = frames.front().pixels.height();
    channels_ = frames.front().pixels.channels();
    entries_.reserve(frames.size());
    for (auto& f : frames) {
        if (f.pixels.width() != width_ || f.pixels.height() != height_ ||
            f.pixels.channels() != channels_)
            throw Error(fmt::format("frame {} has mismatched dimensions", f.index));
        entries_.push_back({f.index, std::make_shared<const FramePixels>(std::move(f.pixels)), {}});
    }
    validate_order();
}

FrameSequence FrameSequence::from_files(std::string video_id, double frame_rate,
                                        std::vector<std::pair<std::int64_t, fs::path>> files)
{
    if (!(frame_rate > 0.0))
        throw Error("frame rate must be positive");
    if (files.empty())
        throw Error("no frames");
    FrameSequence seq;
    seq.video_id_ = std::move(video_id);
    seq.frame_rate_ = frame_rate;
    seq.entries_.reserve(files.size());
    bool first = true;
    for (auto& [index, file] : files) {
        ImageInfo info;
        try {
            info = probe_image(file);
        } catch (const Error& e) {
            throw Error(fmt::format("unreadable frame '{}': {}", file.string(), e.what()));
        }
        if (first) {
            seq.width_ = info.width;
            seq.height_ = info.height;
            seq.channels_ = info.channels;
            first = false;
        } else if (info.width != seq.width_ || info.height != seq.height_ ||
                   info.channels != seq.channels_) {
            throw Error(fmt::format("frame '{}' is {}x{}x{}, expected {}x{}x{}", file.string(),
                                    info.width, info.height, info.channels, seq.width_,
                                    seq.height_, seq.channels_));
        }
        seq.entries_.push_back({index, nullptr, std::move(file)});
    }
    seq.validate_order();
    return seq;
}

void FrameSequence::validate_order() const
{
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i].index <= entries_[i - 1].index)
            throw Error(fmt::format("frame indices not strictly increasing at {}",
                                    entries_[i].index));
}

FramePixels FrameSequence::frame(std::size_t pos) const
{
    const Entry& e = entries_.at(pos);
    if (e.pixels)
        return *e.pixels;
    FramePixels px;
    try {
        px = read_image(e.file);
    } catch (const Error& err) {
        throw Error(fmt::format("unreadable frame '{}': {}", e.file.string(), err.what()));
    }
    if (px.width() != width_ || px.height() != height_ || px.channels() != channels_)
        throw Error(fmt::format("frame '{}' changed dimensions", e.file.string()));
    return px;
}

std::optional<std::size_t> FrameSequence::position_of(std::int64_t frame_index) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), frame_index,
                               [](const Entry& e, std::int64_t v) { return e.index < v; });
    if (it == entries_.end() || it->index != frame_index)
        return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin());
}

FrameSequence load_frame_dir(const fs::path& dir, double frame_rate, std::string video_id)
{
    if (!fs::is_directory(dir))
        throw Error(fmt::format("'{}' is not a directory", dir.string()));
    std::vector<std::pair<std::int64_t, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension().string();
        if (ext != ".png" && ext != ".ppm" && ext != ".pgm")
            continue;
        const std::string stem = entry.path().stem().string();
        std::int64_t index = 0;
        const auto* end = stem.data() + stem.size();
        const auto res = std::from_chars(stem.data(), end, index);
        if (stem.empty() || res.ec != std::errc{} || res.ptr != end || index < 0)
            continue;
        files.emplace_back(index, entry.path());
    }
    if (files.empty())
        throw Error(fmt::format("no frames in '{}'", dir.string()));
    std::sort(files.begin(), files.end());
    for (std::size_t i = 1; i < files.size(); ++i)
        if (files[i].first == files[i - 1].first)
            throw Error(fmt::format("duplicate frame index {} ('{}')", files[i].first,
                                    files[i].second.string()));
    if (video_id.empty()) {
        auto canon = fs::weakly_canonical(dir);
        video_id = canon.filename().empty() ? canon.parent_path().filename().string()
                                            : canon.filename().string();
    }
    return FrameSequence::from_files(std::move(video_id), frame_rate, std::move(files));
}

Rect roi_rect(int width, int height, double crop_fraction)
{
    if (!(crop_fraction >= 0.0 && crop_fraction < 1.0))
        throw Error(fmt::format("crop fraction {} outside [0,1)", crop_fraction));
    const double keep = 1.0 - crop_fraction;
    Rect r;
    r.width = static_cast<int>(std::floor(keep * width));
    r.height = static_cast<int>(std::floor(keep * height));
    r.x = static_cast<int>(std::floor(crop_fraction / 2.0 * width));
    r.y = static_cast<int>(std::floor(crop_fraction / 2.0 * height));
    if (r.width <= 0 || r.height <= 0)
        throw Error(fmt::format("crop fraction {} leaves an empty region of {}x{}", crop_fraction,
                                width, height));
    return r;
}

FramePixels crop(const FramePixels& frame, const Rect& rect)
{
    if (rect.x < 0 || rect.y < 0 || rect.width <= 0 || rect.height <= 0 ||
        rect.x + rect.width > frame.width() || rect.y + rect.height > frame.height())
        throw Error(fmt::format("crop rect {}x{}+{}+{} outside {}x{} frame", rect.width,
                                rect.height, rect.x, rect.y, frame.width(), frame.height()));
    const int ch = frame.channels();
    FramePixels out(rect.width, rect.height, ch);
    const auto src = frame.samples();
    auto dst = out.samples();
    const std::size_t row = static_cast<std::size_t>(rect.width) * ch;
    for (int y = 0; y < rect.height; ++y) {
        const std::size_t from =
            (static_cast<std::size_t>(rect.y + y) * frame.width() + rect.x) * ch;
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row,
                    dst.begin() + static_cast<std::ptrdiff_t>(y * row));
    }
    return out;
}

FramePixels crop_roi(const FramePixels& frame, double crop_fraction)
{
    if (crop_fraction == 0.0)
        return frame;
    return crop(frame, roi_rect(frame.width(), frame.height(), crop_fraction));
}

FramePixels adjust_brightness_contrast(const FramePixels& frame, double gain, double bias)
{
    if (!(gain > 0.0))
        throw Error("gain must be positive");
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v)
        lut[v] = saturate_u8(gain * v + bias);
    FramePixels out = frame;
    for (auto& s : out.samples())
        s = lut[s];
    return out;
}

FramePixels resize_bilinear(const FramePixels& frame, int out_width, int out_height)
{
    if (out_width <= 0 || out_height <= 0)
        throw Error(fmt::format("invalid resize target {}x{}", out_width, out_height));
    if (out_width == frame.width() && out_height == frame.height())
        return frame;

    auto axis = [](int in, int out) {
        struct Tap {
            int i0, i1;
            double w;
        };
        std::vector<Tap> taps(out);
        for (int o = 0; o < out; ++o) {
            const double src = out == 1 ? (in - 1) / 2.0
                                        : static_cast<double>(o) * (in - 1) / (out - 1);
            int i0 = std::min(static_cast<int>(std::floor(src)), in - 1);
            int i1 = std::min(i0 + 1, in - 1);
            taps[o] = {i0, i1, src - i0};
        }
        return taps;
    };
    const auto xs = axis(frame.width(), out_width);
    const auto ys = axis(frame.height(), out_height);
    const int ch = frame.channels();
    FramePixels out(out_width, out_height, ch);
    for (int y = 0; y < out_height; ++y) {
        const auto& ty = ys[y];
        for (int x = 0; x < out_width; ++x) {
            const auto& tx = xs[x];
            for (int c = 0; c < ch; ++c) {
                const double top = frame.at(tx.i0, ty.i0, c) * (1.0 - tx.w) +
                                   frame.at(tx.i1, ty.i0, c) * tx.w;
                const double bottom = frame.at(tx.i0, ty.i1, c) * (1.0 - tx.w) +
                                      frame.at(tx.i1, ty.i1, c) * tx.w;
                out.at(x, y, c) = saturate_u8(top * (1.0 - ty.w) + bottom * ty.w);
            }
        }
    }
    return out;
}

FramePixels to_grayscale(const FramePixels& frame)
{
    if (frame.channels() == 1)
        return frame;
    FramePixels out(frame.width(), frame.height(), 1);
    const auto src = frame.samples();
    auto dst = out.samples();
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        // Integer form of round(0.299R + 0.587G + 0.114B); non-negative so
        // +500 truncation is round-half-away-from-zero.
        const int luma = 299 * src[3 * i] + 587 * src[3 * i + 1] + 114 * src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>((luma + 500) / 1000);
    }
    return out;
}

void PreprocessSpec::validate() const
{
    if (!(crop_fraction >= 0.0 && crop_fraction < 1.0))
        throw Error(fmt::format("ingest.crop_fraction {} outside [0,1)", crop_fraction));
    if (!(gain > 0.0))
        throw Error("ingest.gain must be positive");
    if ((resize_width == 0) != (resize_height == 0) || resize_width < 0 || resize_height < 0)
        throw Error("ingest.resize_width/resize_height must both be positive or both 0");
}

FramePixels roi_frame(const FramePixels& frame, const PreprocessSpec& spec)
{
    auto out = crop_roi(frame, spec.crop_fraction);
    if (spec.gain != 1.0 || spec.bias != 0.0)
        out = adjust_brightness_contrast(out, spec.gain, spec.bias);
    return out;
}

FramePixels preprocess(const FramePixels& frame, const PreprocessSpec& spec)
{
    auto out = roi_frame(frame, spec);
    if (spec.resize_width > 0)
        out = resize_bilinear(out, spec.resize_width, spec.resize_height);
    return out;
}

}  // namespace framesift::ingest
