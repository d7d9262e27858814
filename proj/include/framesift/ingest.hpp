#pragma once

#include "framesift/core.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace framesift::ingest {

/// Ordered frames of one video. Frames are either held in memory or read
/// from disk on access; the index/dimension invariants hold either way.
class FrameSequence {
public:
    struct Frame {
        std::int64_t index = 0;
        FramePixels pixels;
    };

    FrameSequence(std::string video_id, double frame_rate, std::vector<Frame> frames);

    /// Lazily loaded sequence. Headers are probed up front so dimension
    /// mismatches and unreadable files fail here rather than mid-run.
    static FrameSequence from_files(std::string video_id, double frame_rate,
                                    std::vector<std::pair<std::int64_t, std::filesystem::path>> files);

    const std::string& video_id() const { return video_id_; }
    double frame_rate() const { return frame_rate_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    std::int64_t frame_index(std::size_t pos) const { return entries_.at(pos).index; }
    FramePixels frame(std::size_t pos) const;
    std::optional<std::size_t> position_of(std::int64_t frame_index) const;
    double time_of(std::int64_t frame_index) const
    {
        return static_cast<double>(frame_index) / frame_rate_;
    }

private:
    struct Entry {
        std::int64_t index = 0;
        std::shared_ptr<const FramePixels> pixels;
        std::filesystem::path file;
    };

    FrameSequence() = default;
    void validate_order() const;

    std::string video_id_;
    double frame_rate_ = 0.0;
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<Entry> entries_;
};

/// Loads `%06d.png` / `%06d.ppm` style files sorted by their numeric stem.
/// The video id defaults to the directory name.
FrameSequence load_frame_dir(const std::filesystem::path& dir, double frame_rate,
                             std::string video_id = {});

/// Centered region keeping (1 - crop_fraction) of each axis.
Rect roi_rect(int width, int height, double crop_fraction);
FramePixels crop(const FramePixels& frame, const Rect& rect);
FramePixels crop_roi(const FramePixels& frame, double crop_fraction);

FramePixels adjust_brightness_contrast(const FramePixels& frame, double gain, double bias);

/// Bilinear resampling with output corner pixel centers mapped onto input
/// corner pixel centers (align-corners convention).
FramePixels resize_bilinear(const FramePixels& frame, int out_width, int out_height);

/// BT.601 luma. Single-channel input is returned unchanged.
FramePixels to_grayscale(const FramePixels& frame);

struct PreprocessSpec {
    double crop_fraction = 0.25;
    double gain = 1.1;
    double bias = 5.0;
    int resize_width = 224;   // 0 disables resizing
    int resize_height = 224;

    void validate() const;
};

/// ROI crop followed by brightness/contrast adjustment (native resolution).
FramePixels roi_frame(const FramePixels& frame, const PreprocessSpec& spec);

/// Full pre-signal chain: ROI crop, brightness/contrast, resize.
FramePixels preprocess(const FramePixels& frame, const PreprocessSpec& spec);

}  // namespace framesift::ingest
