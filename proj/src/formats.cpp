#include "framesift/formats.hpp"

#include "framesift/csv.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace framesift::formats {

namespace fs = std::filesystem;
using csv::num;

namespace {

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(fmt::format("cannot write '{}'", path.string()));
    return out;
}

template <class Fn>
void to_file(const fs::path& path, Fn&& fn)
{
    auto out = open_out(path);
    fn(out);
    out.flush();
    if (!out)
        throw Error(fmt::format("write failed for '{}'", path.string()));
}

bool parse_flag(const std::string& s)
{
    if (s == "1" || s == "true")
        return true;
    if (s == "0" || s == "false")
        return false;
    throw Error(fmt::format("not a boolean: '{}'", s));
}

}  // namespace

void write_series(std::ostream& out, const signals::SignalSeries& s)
{
    out << "frame_index,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << s.frame_index[i] << ',' << num(s.values[i]) << '\n';
}

void write_series(const fs::path& path, const signals::SignalSeries& s)
{
    to_file(path, [&](std::ostream& o) { write_series(o, s); });
}

signals::SignalSeries read_series(const fs::path& path, std::string video_id, double frame_rate)
{
    const auto t = csv::read(path);
    const auto fi = t.column("frame_index");
    const auto vi = t.column("value");
    signals::SignalSeries s;
    s.video_id = std::move(video_id);
    s.frame_rate = frame_rate;
    for (const auto& row : t.rows) {
        s.frame_index.push_back(csv::to_int(row[fi]));
        s.values.push_back(csv::to_double(row[vi]));
    }
    s.validate();
    return s;
}

void write_metrics(std::ostream& out, const signals::FrameMetrics& m)
{
    out << "frame_index,colorfulness,b_ratio,sharpness\n";
    for (std::size_t i = 0; i < m.size(); ++i)
        out << m.frame_index[i] << ',' << num(m.colorfulness[i]) << ',' << num(m.b_ratio[i]) << ','
            << num(m.sharpness[i]) << '\n';
}

void write_metrics(const fs::path& path, const signals::FrameMetrics& m)
{
    to_file(path, [&](std::ostream& o) { write_metrics(o, m); });
}

void write_peaks(std::ostream& out, const std::vector<smoothing::Peak>& peaks)
{
    out << "frame_index,value,prominence\n";
    for (const auto& p : peaks)
        out << p.frame_index << ',' << num(p.value) << ',' << num(p.prominence) << '\n';
}

void write_peaks(const fs::path& path, const std::vector<smoothing::Peak>& peaks)
{
    to_file(path, [&](std::ostream& o) { write_peaks(o, peaks); });
}

std::vector<std::int64_t> read_peak_indices(const fs::path& path)
{
    const auto t = csv::read(path);
    const auto fi = t.column("frame_index");
    std::vector<std::int64_t> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows)
        out.push_back(csv::to_int(row[fi]));
    return out;
}

void write_candidates(std::ostream& out, const std::vector<selection::CandidateFrame>& cands)
{
    out << "frame_index,time_s,c_ratio,b_ratio,sharpness,cbt_value,kept\n";
    for (const auto& c : cands)
        out << c.frame_index << ',' << num(c.time_s) << ',' << num(c.c_ratio) << ',' << num(c.b_ratio)
            << ',' << num(c.sharpness) << ',' << num(c.cbt_value) << ',' << (c.kept ? 1 : 0) << '\n';
}

void write_candidates(const fs::path& path, const std::vector<selection::CandidateFrame>& c)
{
    to_file(path, [&](std::ostream& o) { write_candidates(o, c); });
}

std::vector<selection::CandidateFrame> read_candidates(const fs::path& path)
{
    const auto t = csv::read(path);
    const auto fi = t.column("frame_index"), ti = t.column("time_s"), ci = t.column("c_ratio"),
               bi = t.column("b_ratio"), si = t.column("sharpness"), vi = t.column("cbt_value"),
               ki = t.column("kept");
    std::vector<selection::CandidateFrame> out;
    for (const auto& row : t.rows) {
        selection::CandidateFrame c;
        c.frame_index = csv::to_int(row[fi]);
        c.time_s = csv::to_double(row[ti]);
        c.c_ratio = csv::to_double(row[ci]);
        c.b_ratio = csv::to_double(row[bi]);
        c.sharpness = csv::to_double(row[si]);
        c.cbt_value = csv::to_double(row[vi]);
        c.kept = parse_flag(row[ki]);
        out.push_back(c);
    }
    return out;
}

void write_detections_seconds(std::ostream& out, const std::vector<detect::Detection>& dets)
{
    out << "video_id,class_id,time_s\n";
    for (const auto& d : dets)
        out << d.video_id << ',' << d.class_id << ',' << static_cast<std::int64_t>(std::floor(d.time_s))
            << '\n';
}

void write_detections_seconds(const fs::path& path, const std::vector<detect::Detection>& d)
{
    to_file(path, [&](std::ostream& o) { write_detections_seconds(o, d); });
}

void write_detections(std::ostream& out, const std::vector<detect::Detection>& dets)
{
    out << "video_id,class_id,frame_index,time_s\n";
    for (const auto& d : dets)
        out << d.video_id << ',' << d.class_id << ',' << d.frame_index << ',' << num(d.time_s) << '\n';
}

void write_detections(const fs::path& path, const std::vector<detect::Detection>& d)
{
    to_file(path, [&](std::ostream& o) { write_detections(o, d); });
}

std::vector<detect::Detection> read_detections(const fs::path& path)
{
    const auto t = csv::read(path);
    const auto vi = t.column("video_id"), ci = t.column("class_id"), ti = t.column("time_s");
    const bool has_index = t.has_column("frame_index");
    const auto fi = has_index ? t.column("frame_index") : 0;
    std::vector<detect::Detection> out;
    for (const auto& row : t.rows) {
        detect::Detection d;
        d.video_id = row[vi];
        d.class_id = static_cast<int>(csv::to_int(row[ci]));
        d.frame_index = has_index ? csv::to_int(row[fi]) : -1;
        d.time_s = csv::to_double(row[ti]);
        out.push_back(std::move(d));
    }
    return out;
}

void write_ground_truth(std::ostream& out, const std::vector<evaluation::GroundTruthEvent>& gt)
{
    out << "video_id,class_id,t_start,t_end\n";
    for (const auto& e : gt)
        out << e.video_id << ',' << e.class_id << ',' << num(e.t_start) << ',' << num(e.t_end) << '\n';
}

std::vector<evaluation::GroundTruthEvent> read_ground_truth(const fs::path& path)
{
    const auto t = csv::read(path);
    const auto vi = t.column("video_id"), ci = t.column("class_id"), si = t.column("t_start"),
               ei = t.column("t_end");
    std::vector<evaluation::GroundTruthEvent> out;
    for (const auto& row : t.rows) {
        evaluation::GroundTruthEvent e{row[vi], static_cast<int>(csv::to_int(row[ci])),
                                       csv::to_double(row[si]), csv::to_double(row[ei])};
        if (e.t_start > e.t_end)
            throw Error(fmt::format("'{}': event with t_start > t_end", path.string()));
        out.push_back(std::move(e));
    }
    return out;
}

void write_contours(std::ostream& out, const std::vector<masking::Contour>& contours)
{
    out << "region_id,area,x0,y0,x1,y1\n";
    for (const auto& c : contours)
        out << c.region_id << ',' << c.area << ',' << c.x0 << ',' << c.y0 << ',' << c.x1 << ',' << c.y1
            << '\n';
}

void write_report(std::ostream& out, const evaluation::EvalReport& r)
{
    out << "class_id,tp,fp,fn,precision,recall,f1\n";
    for (const auto& c : r.classes)
        out << c.class_id << ',' << c.counts.tp << ',' << c.counts.fp << ',' << c.counts.fn << ','
            << num(c.precision) << ',' << num(c.recall) << ',' << num(c.f1) << '\n';
    out << "macro," << r.totals.tp << ',' << r.totals.fp << ',' << r.totals.fn << ",,,"
        << num(r.macro_f1) << '\n';
    out << "weighted," << r.totals.tp << ',' << r.totals.fp << ',' << r.totals.fn << ",,,"
        << num(r.weighted_f1) << '\n';
}

void write_report(const fs::path& path, const evaluation::EvalReport& r)
{
    to_file(path, [&](std::ostream& o) { write_report(o, r); });
}

namespace {

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string plot_svg(const signals::SignalSeries& raw, const signals::SignalSeries& smoothed,
                     const std::vector<smoothing::Peak>& peaks, std::string_view title)
{
    constexpr double W = 900, H = 360, L = 60, R = 20, T = 36, B = 40;
    const auto& xs = raw.frame_index;
    double x_lo = xs.empty() ? 0.0 : static_cast<double>(xs.front());
    double x_hi = xs.empty() ? 1.0 : static_cast<double>(xs.back());
    if (x_hi <= x_lo)
        x_hi = x_lo + 1.0;
    double y_lo = 0.0, y_hi = 0.0;
    bool first = true;
    for (const auto* s : {&raw, &smoothed})
        for (double v : s->values) {
            y_lo = first ? v : std::min(y_lo, v);
            y_hi = first ? v : std::max(y_hi, v);
            first = false;
        }
    if (y_hi <= y_lo)
        y_hi = y_lo + 1.0;
    const auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - y_lo) / (y_hi - y_lo) * (H - T - B); };

    const auto polyline = [&](const signals::SignalSeries& s, std::string_view color, double width) {
        std::string pts;
        for (std::size_t i = 0; i < s.size(); ++i)
            pts += fmt::format("{:.2f},{:.2f} ", px(static_cast<double>(s.frame_index[i])), py(s.values[i]));
        return fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
                           color, width, pts);
    };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        W, H, W, H, L, xml_escape(title));
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", L, H - B, W - R);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", L, T, H - B);
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
        L, H - B + 16, num(x_lo), W - R, H - B + 16, num(x_hi));
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n"
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
        L - 4, H - B, num(y_lo), L - 4, T + 8, num(y_hi));
    svg += polyline(raw, "#9aa5b1", 1);
    svg += polyline(smoothed, "#c0392b", 2);
    for (const auto& p : peaks)
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"#1f6feb\"/>\n",
                           px(static_cast<double>(p.frame_index)), py(p.value));
    svg += "</svg>\n";
    return svg;
}

}  // namespace framesift::formats
