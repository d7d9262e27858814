#include "framesift/config.hpp"

#include "framesift/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <functional>

extern char** environ;

namespace framesift {

namespace {

bool to_bool(const std::string& s)
{
    std::string v;
    for (char c : csv::trim(s))
        v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error(fmt::format("not a boolean: '{}'", s));
}

std::string from_bool(bool b)
{
    return b ? "true" : "false";
}

int to_int32(const std::string& s)
{
    return static_cast<int>(csv::to_int(s));
}

struct Field {
    std::string key;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define FS_REAL(name, member)                                                                 \
    Field{name, [](PipelineConfig& c, const std::string& v) { c.member = csv::to_double(v); }, \
          [](const PipelineConfig& c) { return csv::num(c.member); }}
#define FS_INT(name, member)                                                               \
    Field{name, [](PipelineConfig& c, const std::string& v) { c.member = to_int32(v); }, \
          [](const PipelineConfig& c) { return std::to_string(c.member); }}
#define FS_BOOL(name, member)                                                             \
    Field{name, [](PipelineConfig& c, const std::string& v) { c.member = to_bool(v); }, \
          [](const PipelineConfig& c) { return from_bool(c.member); }}

void add_adapter_fields(std::vector<Field>& f, const std::string& prefix,
                        AdapterSettings PipelineConfig::*slot)
{
    f.push_back({prefix + "", [slot](PipelineConfig& c, const std::string& v) { (c.*slot).kind = std::string(csv::trim(v)); },
                 [slot](const PipelineConfig& c) { return (c.*slot).kind; }});
    f.push_back({prefix + "_manifest", [slot](PipelineConfig& c, const std::string& v) { (c.*slot).manifest = std::string(csv::trim(v)); },
                 [slot](const PipelineConfig& c) { return (c.*slot).manifest; }});
    f.push_back({prefix + "_command", [slot](PipelineConfig& c, const std::string& v) { (c.*slot).command = std::string(csv::trim(v)); },
                 [slot](const PipelineConfig& c) { return (c.*slot).command; }});
    f.push_back({prefix + "_reentrant", [slot](PipelineConfig& c, const std::string& v) { (c.*slot).reentrant = to_bool(v); },
                 [slot](const PipelineConfig& c) { return from_bool((c.*slot).reentrant); }});
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f{
            FS_REAL("ingest.crop_fraction", preprocess.crop_fraction),
            FS_REAL("ingest.gain", preprocess.gain),
            FS_REAL("ingest.bias", preprocess.bias),
            FS_INT("ingest.resize_width", preprocess.resize_width),
            FS_INT("ingest.resize_height", preprocess.resize_height),
            Field{"signals.peak_signal",
                  [](PipelineConfig& c, const std::string& v) { c.peak_signal = signals::parse_metric(csv::trim(v)); },
                  [](const PipelineConfig& c) { return std::string(signals::to_string(c.peak_signal)); }},
            Field{"smoothing.method",
                  [](PipelineConfig& c, const std::string& v) { c.smoothing.method = smoothing::parse_method(csv::trim(v)); },
                  [](const PipelineConfig& c) { return std::string(smoothing::to_string(c.smoothing.method)); }},
            FS_INT("smoothing.window", smoothing.window),
            FS_INT("smoothing.polyorder", smoothing.polyorder),
            FS_REAL("smoothing.keep_fraction", smoothing.keep_fraction),
            FS_REAL("smoothing.min_prominence", min_prominence),
            FS_BOOL("selection.refine", selection.refine),
            FS_INT("selection.step", selection.step),
            FS_INT("selection.count", selection.count),
            FS_REAL("selection.sharpness_threshold", selection.sharpness_threshold),
            FS_REAL("selection.cbt_threshold", selection.cbt_threshold),
            FS_BOOL("masking.segment", segment),
            FS_BOOL("masking.entropy", entropy_masking),
            FS_INT("masking.entropy_radius", entropy.radius),
            FS_INT("masking.entropy_bins", entropy.bins),
            Field{"masking.entropy_binarize",
                  [](PipelineConfig& c, const std::string& v) { c.entropy.binarize = masking::parse_binarize(csv::trim(v)); },
                  [](const PipelineConfig& c) { return std::string(masking::to_string(c.entropy.binarize)); }},
            FS_REAL("masking.entropy_fixed_threshold", entropy.fixed_threshold),
            Field{"masking.contour_mode",
                  [](PipelineConfig& c, const std::string& v) { c.contour_mode = masking::parse_contour_mode(csv::trim(v)); },
                  [](const PipelineConfig& c) { return std::string(masking::to_string(c.contour_mode)); }},
            FS_INT("masking.crop_pad", crop_pad),
            FS_BOOL("masking.re_segment", re_segment),
            FS_BOOL("detect.dedupe", dedupe),
            FS_REAL("detect.dedupe_window_s", dedupe_window_s),
        };
        add_adapter_fields(f, "adapters.product", &PipelineConfig::product);
        add_adapter_fields(f, "adapters.hand", &PipelineConfig::hand);
        add_adapter_fields(f, "adapters.classifier", &PipelineConfig::classifier);
        f.push_back(Field{"adapters.classifier_class",
                          [](PipelineConfig& c, const std::string& v) { c.classifier.class_id = to_int32(v); },
                          [](const PipelineConfig& c) { return std::to_string(c.classifier.class_id); }});
        f.push_back(Field{"adapters.classifier_skip_missing",
                          [](PipelineConfig& c, const std::string& v) { c.classifier.skip_missing = to_bool(v); },
                          [](const PipelineConfig& c) { return std::string(c.classifier.skip_missing ? "true" : "false"); }});
        f.push_back(Field{"evaluation.class_universe",
                          [](PipelineConfig& c, const std::string& v) {
                              const auto s = csv::trim(v);
                              if (s == "observed")
                                  c.class_universe = ClassUniverse::observed;
                              else if (s == "fixed")
                                  c.class_universe = ClassUniverse::fixed;
                              else
                                  throw Error(fmt::format("unknown class universe '{}'", s));
                          },
                          [](const PipelineConfig& c) {
                              return std::string(c.class_universe == ClassUniverse::observed ? "observed" : "fixed");
                          }});
        f.push_back(FS_BOOL("evaluation.weighted", weighted_f1));
        return f;
    }();
    return table;
}

#undef FS_REAL
#undef FS_INT
#undef FS_BOOL

const Field& field(const std::string& key)
{
    for (const auto& f : fields())
        if (f.key == key)
            return f;
    throw Error(fmt::format("unknown config key '{}'", key));
}

void validate_adapter(const AdapterSettings& a, const char* slot, bool classifier)
{
    const bool ok = classifier ? (a.kind == "constant" || a.kind == "manifest" || a.kind == "external_command")
                               : (a.kind == "null" || a.kind == "manifest" || a.kind == "external_command");
    if (!ok)
        throw Error(fmt::format("adapters.{}: unknown kind '{}'", slot, a.kind));
    if (a.kind == "manifest" && a.manifest.empty())
        throw Error(fmt::format("adapters.{}_manifest is required for kind manifest", slot));
    if (a.kind == "external_command" && a.command.empty())
        throw Error(fmt::format("adapters.{}_command is required for kind external_command", slot));
}

}  // namespace

void PipelineConfig::validate() const
{
    preprocess.validate();
    smoothing.validate();
    if (min_prominence < 0.0)
        throw Error("smoothing.min_prominence must be >= 0");
    selection.validate();
    entropy.validate();
    if (crop_pad < 0)
        throw Error("masking.crop_pad must be >= 0");
    if (!(dedupe_window_s >= 0.0))
        throw Error("detect.dedupe_window_s must be >= 0");
    validate_adapter(product, "product", false);
    validate_adapter(hand, "hand", false);
    validate_adapter(classifier, "classifier", true);
    if (classifier.class_id < 1 || classifier.class_id > 116)
        throw Error("adapters.classifier_class outside 1..116");
}

std::vector<std::string> config_keys()
{
    std::vector<std::string> out;
    for (const auto& f : fields())
        out.push_back(f.key);
    return out;
}

void set_value(PipelineConfig& cfg, const std::string& dotted_key, const std::string& value)
{
    try {
        field(dotted_key).set(cfg, value);
    } catch (const Error& e) {
        throw Error(fmt::format("{}: {}", dotted_key, e.what()));
    }
}

std::string get_value(const PipelineConfig& cfg, const std::string& dotted_key)
{
    return field(dotted_key).get(cfg);
}

void apply_file(PipelineConfig& cfg, const std::filesystem::path& path)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    const auto base = path.parent_path();
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw Error(fmt::format("config '{}': key '{}' outside a section", path.string(), section));
        for (const auto& [key, node] : body) {
            const std::string dotted = section + "." + key;
            std::string value = node.get_value<std::string>();
            if (key.ends_with("_manifest") && !value.empty() &&
                std::filesystem::path(value).is_relative())
                value = (base / value).string();
            set_value(cfg, dotted, value);
        }
    }
}

void apply_env(PipelineConfig& cfg, const std::map<std::string, std::string>& env)
{
    for (const auto& key : config_keys()) {
        std::string name = "FRAMESIFT_";
        for (char c : key)
            name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const auto it = env.find(name);
        if (it != env.end())
            set_value(cfg, key, it->second);
    }
}

std::map<std::string, std::string> current_environment()
{
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        const auto eq = kv.find('=');
        if (eq != std::string_view::npos)
            env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
    return env;
}

std::string to_ini(const PipelineConfig& cfg)
{
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        const auto dot = f.key.find('.');
        const auto sec = f.key.substr(0, dot);
        if (sec != section) {
            if (!section.empty())
                out += '\n';
            out += fmt::format("[{}]\n", sec);
            section = sec;
        }
        out += fmt::format("{} = {}\n", f.key.substr(dot + 1), f.get(cfg));
    }
    return out;
}

}  // namespace framesift
