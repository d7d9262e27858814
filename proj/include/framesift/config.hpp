#pragma once

#include "framesift/ingest.hpp"
#include "framesift/masking.hpp"
#include "framesift/selection.hpp"
#include "framesift/signals.hpp"
#include "framesift/smoothing.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace framesift {

struct AdapterSettings {
    std::string kind;          // null | manifest | external_command | constant
    std::string manifest;      // CSV path for manifest
    std::string command;       // template for external_command
    bool reentrant = false;
    int class_id = 1;          // constant classifier
    bool skip_missing = false; // manifest classifier: unlisted key = no product
};

enum class ClassUniverse { observed, fixed };

/// Every tunable of the detection and evaluation pipeline. The defaults
/// correspond to the colorfulness + max-contour + duplicate-removal run.
struct PipelineConfig {
    ingest::PreprocessSpec preprocess;

    signals::Metric peak_signal = signals::Metric::colorfulness;
    smoothing::SmoothingSpec smoothing;
    double min_prominence = 0.0;

    selection::SelectionSpec selection;

    bool segment = true;        // false: classify the whole ROI frame
    bool entropy_masking = true;
    masking::EntropySpec entropy;
    masking::ContourMode contour_mode = masking::ContourMode::max;
    int crop_pad = 0;
    bool re_segment = false;

    bool dedupe = true;
    double dedupe_window_s = 1.0;

    AdapterSettings product{"null", {}, {}, false, 1, false};
    AdapterSettings hand{"null", {}, {}, false, 1, false};
    AdapterSettings classifier{"constant", {}, {}, false, 1, false};

    ClassUniverse class_universe = ClassUniverse::observed;
    bool weighted_f1 = false;

    unsigned jobs = 0;

    void validate() const;
};

/// `section.key` names accepted by set_value(), in file order.
std::vector<std::string> config_keys();

void set_value(PipelineConfig& cfg, const std::string& dotted_key, const std::string& value);
std::string get_value(const PipelineConfig& cfg, const std::string& dotted_key);

/// Applies an INI file (`[section]` + `key = value`) on top of `cfg`.
/// Unknown sections or keys are errors. Relative adapter paths are resolved
/// against the file's directory.
void apply_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// Applies FRAMESIFT_<SECTION>_<KEY> variables from `env` (uppercase).
void apply_env(PipelineConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> current_environment();

std::string to_ini(const PipelineConfig& cfg);

}  // namespace framesift
