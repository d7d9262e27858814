#include "framesift/datasetprep.hpp"

#include "framesift/image_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace framesift::datasetprep {

namespace fs = std::filesystem;

Shape parse_shape(std::string_view name)
{
    if (name == "rectangular")
        return Shape::rectangular;
    if (name == "circular")
        return Shape::circular;
    throw Error(fmt::format("unknown gradient shape '{}'", name));
}

std::string_view to_string(Shape s)
{
    return s == Shape::rectangular ? "rectangular" : "circular";
}

FramePixels gradient_background(int width, int height, const GradientSpec& spec)
{
    FramePixels out(width, height, 3);
    const double cx = spec.center ? (*spec.center)[0] : (width - 1) / 2.0;
    const double cy = spec.center ? (*spec.center)[1] : (height - 1) / 2.0;
    const double hx = std::max(cx, (width - 1) - cx);
    const double hy = std::max(cy, (height - 1) - cy);
    const double corner = std::hypot(hx, hy);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = std::abs(x - cx);
            const double dy = std::abs(y - cy);
            double d = 0.0;
            if (spec.shape == Shape::circular) {
                d = corner > 0.0 ? std::hypot(dx, dy) / corner : 0.0;
            } else {
                const double rx = hx > 0.0 ? dx / hx : 0.0;
                const double ry = hy > 0.0 ? dy / hy : 0.0;
                d = std::max(rx, ry);
            }
            const double ratio = std::clamp(1.0 - d, 0.0, 1.0);
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = saturate_u8(spec.inner_color[c] * ratio + spec.outer_color[c] * (1.0 - ratio));
        }
    }
    return out;
}

FramePixels composite(const FramePixels& object, const BinaryMask& mask, const FramePixels& background)
{
    if (object.width() != background.width() || object.height() != background.height() ||
        object.channels() != background.channels() || mask.width() != object.width() ||
        mask.height() != object.height())
        throw Error("composite: object, mask and background dimensions differ");
    FramePixels out = background;
    const int ch = object.channels();
    const auto src = object.samples();
    auto dst = out.samples();
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(i * ch), ch,
                        dst.begin() + static_cast<std::ptrdiff_t>(i * ch));
    return out;
}

GradientSpec random_gradient(std::mt19937_64& rng, const RandomGradientOptions& options)
{
    auto channel = [&](ColorRange r) {
        if (r.lo > r.hi)
            throw Error("color range lo > hi");
        return static_cast<std::uint8_t>(std::uniform_int_distribution<int>(r.lo, r.hi)(rng));
    };
    GradientSpec spec;
    spec.shape = std::bernoulli_distribution(0.5)(rng) ? Shape::circular : Shape::rectangular;
    for (int c = 0; c < 3; ++c)
        spec.inner_color[c] = channel(options.inner);
    for (int c = 0; c < 3; ++c)
        spec.outer_color[c] = channel(options.outer);
    return spec;
}

namespace {

std::string rgb_field(const Rgb& c)
{
    return fmt::format("{} {} {}", c[0], c[1], c[2]);
}

}  // namespace

std::size_t prepare_directory(const PrepOptions& options)
{
    if (!fs::is_directory(options.images))
        throw Error(fmt::format("'{}' is not a directory", options.images.string()));
    std::vector<fs::path> inputs;
    for (const auto& e : fs::recursive_directory_iterator(options.images)) {
        if (!e.is_regular_file())
            continue;
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".ppm")
            inputs.push_back(fs::relative(e.path(), options.images));
    }
    std::sort(inputs.begin(), inputs.end());

    fs::create_directories(options.output);
    std::ofstream manifest(options.output / "manifest.csv");
    if (!manifest)
        throw Error(fmt::format("cannot write manifest in '{}'", options.output.string()));
    manifest << "input,output,shape,inner_rgb,outer_rgb,seed\n";

    std::mt19937_64 master(options.seed);
    for (const auto& rel : inputs) {
        const std::uint64_t item_seed = master();
        std::mt19937_64 rng(item_seed);
        const auto spec = random_gradient(rng, options.colors);

        const auto object = read_image(options.images / rel);
        if (object.channels() != 3)
            throw Error(fmt::format("'{}' is not an RGB image", (options.images / rel).string()));
        auto mask_path = options.masks / rel;
        if (!fs::exists(mask_path))
            mask_path.replace_extension(".png");
        const auto mask = read_mask(mask_path);
        const auto bg = gradient_background(object.width(), object.height(), spec);
        const auto out_rel = fs::path(rel).replace_extension(".png");
        const auto out_path = options.output / out_rel;
        fs::create_directories(out_path.parent_path());
        write_png(out_path, composite(object, mask, bg));
        manifest << rel.string() << ',' << out_rel.string() << ',' << to_string(spec.shape) << ','
                 << rgb_field(spec.inner_color) << ',' << rgb_field(spec.outer_color) << ','
                 << item_seed << '\n';
    }
    return inputs.size();
}

}  // namespace framesift::datasetprep
