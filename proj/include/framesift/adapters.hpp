#pragma once

#include "framesift/core.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace framesift::adapters {

inline constexpr int kNumClasses = 116;

struct ClassPrediction {
    int class_id = 0;
    double confidence = 0.0;

    bool operator==(const ClassPrediction&) const = default;
};

/// Seat for a product or hand segmentation model.
///
/// - null:             every pixel is foreground (or background, see
///                     `null_fill`); used when no model is present.
/// - manifest:         masks looked up by frame key in a CSV
///                     `frame_key,path` (paths relative to the CSV).
/// - external_command: the frame is written as PNG to $IN, the command is
///                     run as `cmd $IN $OUT`, and a PNG mask is read from $OUT.
class SegmenterAdapter {
public:
    enum class Kind { null, manifest, external_command };

    static SegmenterAdapter null(bool fill = true);
    static SegmenterAdapter manifest(const std::filesystem::path& csv);
    static SegmenterAdapter command(std::string command_template, bool reentrant = false);

    Kind kind() const { return kind_; }
    bool reentrant() const { return kind_ != Kind::external_command || reentrant_; }

    BinaryMask segment(const FramePixels& frame, std::string_view frame_key) const;

private:
    Kind kind_ = Kind::null;
    bool null_fill_ = true;
    bool reentrant_ = false;
    std::string command_;
    std::shared_ptr<const std::map<std::string, std::filesystem::path, std::less<>>> entries_;
};

/// Seat for the product classifier.
///
/// - constant:         fixed class, confidence 1.
/// - manifest:         CSV `frame_key,class_id`, confidence 1.
/// - external_command: crop written as PNG to $IN, command run as
///                     `cmd $IN $OUT`; stdout must hold `class_id confidence`.
class ClassifierAdapter {
public:
    enum class Kind { constant, manifest, external_command };

    static ClassifierAdapter constant(int class_id);
    /// With `skip_missing`, keys absent from the manifest mean "no product"
    /// and predict() returns nothing instead of failing.
    static ClassifierAdapter manifest(const std::filesystem::path& csv, bool skip_missing = false);
    static ClassifierAdapter command(std::string command_template, bool reentrant = false);

    Kind kind() const { return kind_; }
    bool reentrant() const { return kind_ != Kind::external_command || reentrant_; }

    ClassPrediction classify(const FramePixels& crop, std::string_view frame_key) const;
    std::optional<ClassPrediction> predict(const FramePixels& crop, std::string_view frame_key) const;

private:
    Kind kind_ = Kind::constant;
    int class_id_ = 1;
    bool reentrant_ = false;
    bool skip_missing_ = false;
    std::string command_;
    std::shared_ptr<const std::map<std::string, int, std::less<>>> labels_;
};

inline BinaryMask segment(const SegmenterAdapter& adapter, const FramePixels& frame,
                          std::string_view frame_key)
{
    return adapter.segment(frame, frame_key);
}

inline ClassPrediction classify(const ClassifierAdapter& adapter, const FramePixels& crop,
                                std::string_view frame_key)
{
    return adapter.classify(crop, frame_key);
}

/// Parses one `class_id confidence` line and validates the label space.
ClassPrediction parse_prediction(std::string_view line);

/// `<video_id>/<frame_index zero-padded to 6>`.
std::string frame_key(std::string_view video_id, std::int64_t frame_index);

}  // namespace framesift::adapters
