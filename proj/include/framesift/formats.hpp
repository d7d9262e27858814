#pragma once

#include "framesift/detect.hpp"
#include "framesift/evaluation.hpp"
#include "framesift/masking.hpp"
#include "framesift/selection.hpp"
#include "framesift/signals.hpp"
#include "framesift/smoothing.hpp"

#include <filesystem>
#include <iosfwd>

// File formats shared by the CLI and tests. Every writer has a stream form
// so output can be compared byte-for-byte without touching disk.
namespace framesift::formats {

// frame_index,value
void write_series(std::ostream& out, const signals::SignalSeries& series);
void write_series(const std::filesystem::path& path, const signals::SignalSeries& series);
signals::SignalSeries read_series(const std::filesystem::path& path, std::string video_id,
                                  double frame_rate);

// frame_index,colorfulness,b_ratio,sharpness
void write_metrics(std::ostream& out, const signals::FrameMetrics& metrics);
void write_metrics(const std::filesystem::path& path, const signals::FrameMetrics& metrics);

// frame_index,value,prominence
void write_peaks(std::ostream& out, const std::vector<smoothing::Peak>& peaks);
void write_peaks(const std::filesystem::path& path, const std::vector<smoothing::Peak>& peaks);
/// Frame indices listed in a peaks file.
std::vector<std::int64_t> read_peak_indices(const std::filesystem::path& path);

// frame_index,time_s,c_ratio,b_ratio,sharpness,cbt_value,kept
void write_candidates(std::ostream& out, const std::vector<selection::CandidateFrame>& c);
void write_candidates(const std::filesystem::path& path, const std::vector<selection::CandidateFrame>& c);
std::vector<selection::CandidateFrame> read_candidates(const std::filesystem::path& path);

// video_id,class_id,time_s with time floored to whole seconds
void write_detections_seconds(std::ostream& out, const std::vector<detect::Detection>& d);
void write_detections_seconds(const std::filesystem::path& path, const std::vector<detect::Detection>& d);
// video_id,class_id,frame_index,time_s
void write_detections(std::ostream& out, const std::vector<detect::Detection>& d);
void write_detections(const std::filesystem::path& path, const std::vector<detect::Detection>& d);
/// Reads either detection schema. Without a frame_index column the index
/// is reported as -1.
std::vector<detect::Detection> read_detections(const std::filesystem::path& path);

// video_id,class_id,t_start,t_end
void write_ground_truth(std::ostream& out, const std::vector<evaluation::GroundTruthEvent>& gt);
std::vector<evaluation::GroundTruthEvent> read_ground_truth(const std::filesystem::path& path);

// region_id,area,x0,y0,x1,y1
void write_contours(std::ostream& out, const std::vector<masking::Contour>& contours);

// class_id,tp,fp,fn,precision,recall,f1 then a macro row
void write_report(std::ostream& out, const evaluation::EvalReport& report);
void write_report(const std::filesystem::path& path, const evaluation::EvalReport& report);

/// Raw vs smoothed series with peak markers as a standalone SVG document.
std::string plot_svg(const signals::SignalSeries& raw, const signals::SignalSeries& smoothed,
                     const std::vector<smoothing::Peak>& peaks, std::string_view title);

}  // namespace framesift::formats
