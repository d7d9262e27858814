#pragma once

#include "framesift/core.hpp"
#include "framesift/datasetprep.hpp"
#include "framesift/evaluation.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace framesift::synthgen {

using datasetprep::Rgb;

/// One product "scan": a textured rectangle that slides in from the frame
/// edge, rests at the tray centre, and slides out. With passes > 1 it
/// repeats (alternating direction), resting off-screen for gap_s between
/// passes.
struct EventSpec {
    int class_id = 1;
    double enter_t = 0.0;
    double exit_t = 0.0;
    Rgb color{200, 40, 40};
    double texture = 100.0;  // uniform luminance texture amplitude (levels)
    int texture_cell = 4;    // texture block size (px)
    double speed = 700.0;    // px/s while moving
    int passes = 1;
    double gap_s = 0.0;
    int width = 240;
    int height = 150;
    int y_offset = 0;
};

struct ScenarioSpec {
    std::string video_id = "synth";
    int width = 480;
    int height = 270;
    double frame_rate = 30.0;
    double duration_s = 30.0;
    std::vector<EventSpec> events;
    double noise = 2.0;          // Gaussian sigma, levels
    double blur = 1.0;           // motion blur length = blur * pixels moved per frame
    std::uint64_t seed = 1;
    double roi_crop_fraction = 0.25;
    bool hands = false;          // flat gray blob trailing each object
    std::string format = "png";  // png | ppm
    bool masks = false;          // also emit ground-truth product masks

    int frame_count() const;
    void validate() const;
};

/// Five single-pass events over 30 s at 30 fps, 480x270.
ScenarioSpec default_scenario();

/// Default scenario where three of the objects are scanned twice within
/// one event window, producing repeated detections of the same product.
ScenarioSpec duplicate_prone_scenario();

ScenarioSpec load_scenario(const std::filesystem::path& ini);
std::string to_ini(const ScenarioSpec& spec);

/// Renders one frame; deterministic for a given spec and frame number.
class Renderer {
public:
    explicit Renderer(ScenarioSpec spec);

    const ScenarioSpec& spec() const { return spec_; }
    FramePixels render(int frame) const;

    /// Object rectangle (before blur) of event `e` at time t, if on screen.
    std::optional<Rect> object_rect(std::size_t e, double t) const;
    /// Signed horizontal speed of event `e` at time t (0 while resting).
    double velocity(std::size_t e, double t) const;

    /// Events whose object overlaps the ROI crop at `frame`, with overlap area.
    std::vector<std::pair<std::size_t, int>> present(int frame) const;

private:
    ScenarioSpec spec_;
    Rect roi_;
    FramePixels background_;
    std::vector<FramePixels> sprites_;
    std::vector<std::int8_t> noise_pool_;
};

struct Output {
    std::filesystem::path frames_dir;
    std::filesystem::path gt_csv;
    std::filesystem::path labels_csv;  // classifier manifest
    std::filesystem::path masks_csv;   // segmenter manifest, empty unless masks
    std::vector<evaluation::GroundTruthEvent> gt;
};

/// Ground-truth windows: first and last frame where each object overlaps
/// the ROI crop region.
std::vector<evaluation::GroundTruthEvent> ground_truth(const Renderer& renderer);

/// Writes <video_id>/%06d.<format>, gt.csv, labels.csv, scenario.ini and
/// (optionally) masks/ + masks.csv under out_dir.
Output generate(const ScenarioSpec& spec, const std::filesystem::path& out_dir);

}  // namespace framesift::synthgen
