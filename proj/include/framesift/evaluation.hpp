#pragma once

#include "framesift/config.hpp"
#include "framesift/detect.hpp"

#include <map>
#include <string>

namespace framesift::evaluation {

struct GroundTruthEvent {
    std::string video_id;
    int class_id = 0;
    double t_start = 0.0;
    double t_end = 0.0;

    bool operator==(const GroundTruthEvent&) const = default;
};

struct ClassCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    bool operator==(const ClassCounts&) const = default;
    ClassCounts& operator+=(const ClassCounts& o)
    {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

using CountsByClass = std::map<int, ClassCounts>;

/// Greedy matching in detection time order. A detection is a true positive
/// when an unmatched event of the same video and class contains its time
/// (the earliest-ending such event is consumed). Unmatched detections count
/// as false positives under their predicted class, unmatched events as false
/// negatives under their true class.
CountsByClass match(const std::vector<detect::Detection>& detections,
                    const std::vector<GroundTruthEvent>& gt);

struct ClassScore {
    int class_id = 0;
    ClassCounts counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::vector<ClassScore> classes;  // ascending class id
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    ClassCounts totals;
};

double precision(const ClassCounts& c);
double recall(const ClassCounts& c);
double f1(double precision, double recall);

/// Unweighted mean of per-class F1. With ClassUniverse::fixed every class
/// 1..116 is averaged, absent ones scoring 0.
EvalReport score(const CountsByClass& counts, ClassUniverse universe = ClassUniverse::observed);

double macro_f1(const CountsByClass& counts, ClassUniverse universe = ClassUniverse::observed);

EvalReport evaluate(const std::vector<detect::Detection>& detections,
                    const std::vector<GroundTruthEvent>& gt,
                    ClassUniverse universe = ClassUniverse::observed);

std::string format_table(const EvalReport& report);

}  // namespace framesift::evaluation
