#include "framesift/evaluation.hpp"

#include "framesift/adapters.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace framesift::evaluation {

CountsByClass match(const std::vector<detect::Detection>& detections,
                    const std::vector<GroundTruthEvent>& gt)
{
    for (const auto& e : gt)
        if (e.t_start > e.t_end)
            throw Error(fmt::format("ground truth event for class {} has t_start > t_end", e.class_id));

    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].time_s < detections[b].time_s;
    });

    CountsByClass counts;
    std::vector<bool> used(gt.size(), false);
    for (std::size_t i : order) {
        const auto& d = detections[i];
        std::size_t best = gt.size();
        for (std::size_t j = 0; j < gt.size(); ++j) {
            const auto& e = gt[j];
            if (used[j] || e.class_id != d.class_id || e.video_id != d.video_id)
                continue;
            if (d.time_s < e.t_start || d.time_s > e.t_end)
                continue;
            if (best == gt.size() || e.t_end < gt[best].t_end)
                best = j;
        }
        if (best < gt.size()) {
            used[best] = true;
            ++counts[d.class_id].tp;
        } else {
            ++counts[d.class_id].fp;
        }
    }
    for (std::size_t j = 0; j < gt.size(); ++j)
        if (!used[j])
            ++counts[gt[j].class_id].fn;
    return counts;
}

double precision(const ClassCounts& c)
{
    return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ClassCounts& c)
{
    return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(double p, double r)
{
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvalReport score(const CountsByClass& counts, ClassUniverse universe)
{
    EvalReport rep;
    auto add = [&](int id, const ClassCounts& c) {
        ClassScore s;
        s.class_id = id;
        s.counts = c;
        s.precision = precision(c);
        s.recall = recall(c);
        s.f1 = f1(s.precision, s.recall);
        rep.classes.push_back(s);
        rep.totals += c;
    };
    if (universe == ClassUniverse::fixed) {
        for (const auto& [id, _] : counts)
            if (id < 1 || id > adapters::kNumClasses)
                throw Error(fmt::format("class {} outside the fixed 1..{} universe", id, adapters::kNumClasses));
        for (int id = 1; id <= adapters::kNumClasses; ++id) {
            const auto it = counts.find(id);
            add(id, it == counts.end() ? ClassCounts{} : it->second);
        }
    } else {
        for (const auto& [id, c] : counts)
            add(id, c);
    }
    if (rep.classes.empty())
        throw Error("macro F1 needs at least one class");

    double sum = 0.0;
    double weighted = 0.0;
    double support = 0.0;
    for (const auto& s : rep.classes) {
        sum += s.f1;
        const double sup = static_cast<double>(s.counts.tp + s.counts.fn);
        weighted += sup * s.f1;
        support += sup;
    }
    rep.macro_f1 = sum / static_cast<double>(rep.classes.size());
    rep.weighted_f1 = support == 0.0 ? 0.0 : weighted / support;
    return rep;
}

double macro_f1(const CountsByClass& counts, ClassUniverse universe)
{
    return score(counts, universe).macro_f1;
}

EvalReport evaluate(const std::vector<detect::Detection>& detections,
                    const std::vector<GroundTruthEvent>& gt, ClassUniverse universe)
{
    return score(match(detections, gt), universe);
}

std::string format_table(const EvalReport& report)
{
    std::string out = fmt::format("{:>6} {:>5} {:>5} {:>5} {:>9} {:>9} {:>9}\n", "class", "tp", "fp",
                                  "fn", "precision", "recall", "f1");
    for (const auto& s : report.classes) {
        if (s.counts == ClassCounts{})
            continue;
        out += fmt::format("{:>6} {:>5} {:>5} {:>5} {:>9.4f} {:>9.4f} {:>9.4f}\n", s.class_id,
                           s.counts.tp, s.counts.fp, s.counts.fn, s.precision, s.recall, s.f1);
    }
    out += fmt::format("classes: {}  tp: {}  fp: {}  fn: {}\n", report.classes.size(),
                       report.totals.tp, report.totals.fp, report.totals.fn);
    out += fmt::format("macro F1: {:.4f}  (support-weighted: {:.4f})\n", report.macro_f1,
                       report.weighted_f1);
    return out;
}

}  // namespace framesift::evaluation
