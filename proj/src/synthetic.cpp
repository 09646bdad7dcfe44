#include "varigen/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "varigen/errors.hpp"
#include "varigen/png_io.hpp"

namespace varigen::data {

namespace {

struct ObjectParams {
    double cy, cx;        // center
    double radius;        // outer radius (or half-side for squares)
    double tint[3];       // per-channel multiplier
    double stripe_phase;  // texture stripe phase
    uint64_t noise_seed;
};

ObjectParams draw_object_params(const SynthSpec& spec, Rng& rng) {
    const double r = spec.resolution;
    ObjectParams p;
    p.cy = r / 2.0 + rng.uniform(-r / 32.0, r / 32.0);
    p.cx = r / 2.0 + rng.uniform(-r / 32.0, r / 32.0);
    p.radius = r * rng.uniform(0.30, 0.38);
    for (double& t : p.tint) t = 1.0 + rng.uniform(-0.12, 0.12);
    p.stripe_phase = rng.uniform(0.0, 1.0);
    p.noise_seed = rng.next_u64();
    return p;
}

// Deterministic per-pixel noise, independent of raster order.
double pixel_noise(uint64_t seed, int y, int x, int c) {
    const uint64_t h = splitmix64(seed ^ (static_cast<uint64_t>(y) << 40) ^
                                  (static_cast<uint64_t>(x) << 16) ^ static_cast<uint64_t>(c));
    return (static_cast<double>(h >> 11) * 0x1.0p-53) * 2.0 - 1.0;
}

double coverage(const SynthSpec& spec, const ObjectParams& p, int y, int x) {
    const double dy = y - p.cy, dx = x - p.cx;
    if (spec.category == "square") {
        const double d = std::max(std::abs(dy), std::abs(dx));
        return std::clamp(p.radius - d + 0.5, 0.0, 1.0);
    }
    const double d = std::sqrt(dy * dy + dx * dx);
    if (spec.category == "ring") {
        const double inner = 0.55 * p.radius;
        return std::clamp(p.radius - d + 0.5, 0.0, 1.0) * std::clamp(d - inner + 0.5, 0.0, 1.0);
    }
    return std::clamp(p.radius - d + 0.5, 0.0, 1.0);  // disk
}

double background_value(const SynthSpec& spec, const ObjectParams& p, int y, int x, int c) {
    return std::clamp(0.12 + 0.02 * pixel_noise(p.noise_seed ^ 0xb67u, y, x, c), 0.0, 1.0);
}

ImageTensor render_with(const SynthSpec& spec, const ObjectParams& p) {
    ImageTensor img(spec.resolution, spec.resolution, 3);
    for (int y = 0; y < spec.resolution; ++y) {
        for (int x = 0; x < spec.resolution; ++x) {
            const double alpha = coverage(spec, p, y, x);
            const double dy = y - p.cy, dx = x - p.cx;
            const double rr = std::sqrt(dy * dy + dx * dx) / p.radius;
            const double shade = 1.0 - 0.25 * rr * rr;
            const double stripe =
                1.0 + 0.06 * std::sin(2.0 * std::numbers::pi *
                                      (3.0 * y / spec.resolution + p.stripe_phase));
            for (int c = 0; c < 3; ++c) {
                const double obj = std::clamp(spec.base_color[c] * p.tint[c] * shade * stripe +
                                                  spec.noise_amp * pixel_noise(p.noise_seed, y, x, c),
                                              0.0, 1.0);
                const double bg = background_value(spec, p, y, x, c);
                img.at(y, x, c) = bg * (1.0 - alpha) + obj * alpha;
            }
        }
    }
    return img;
}

void paint_disk(ImageTensor& img, ImageTensor& mask, double cy, double cx, double radius,
                const double color[3]) {
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dy = y - cy, dx = x - cx;
            if (dy * dy + dx * dx > radius * radius) continue;
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
            mask.at(y, x, 0) = 1.0;
        }
    }
}

}  // namespace

ImageTensor render_good(const SynthSpec& spec, Rng& rng) {
    return render_with(spec, draw_object_params(spec, rng));
}

DefectRender render_defect(const SynthSpec& spec, const std::string& type, Rng& rng) {
    const ObjectParams p = draw_object_params(spec, rng);
    DefectRender out;
    out.type = type;
    out.image = render_with(spec, p);
    out.mask = ImageTensor(spec.resolution, spec.resolution, 1, 0.0);

    if (type == "scratch") {
        // Bright stroke along a random chord through the object.
        const double theta = rng.uniform(0.0, std::numbers::pi);
        const double offset = rng.uniform(-0.5, 0.5) * p.radius;
        const double nx = std::cos(theta), ny = std::sin(theta);
        const double mx = p.cx + nx * offset, my = p.cy + ny * offset;
        const double half = p.radius * 0.9;
        const double stroke = rng.uniform(0.6, 1.1);
        const double color[3] = {0.95, 0.93, 0.85};
        for (double t = -half; t <= half; t += 0.25) {
            paint_disk(out.image, out.mask, my + (-nx) * t, mx + ny * t, stroke, color);
        }
    } else if (type == "blob") {
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double dist = rng.uniform(0.0, 0.55) * p.radius;
        const double br = rng.uniform(spec.resolution / 16.0, spec.resolution / 10.0);
        const bool dark = rng.uniform() < 0.5;
        const double color_dark[3] = {0.07, 0.06, 0.08};
        const double color_sat[3] = {0.88, 0.18, 0.12};
        paint_disk(out.image, out.mask, p.cy + std::sin(ang) * dist, p.cx + std::cos(ang) * dist,
                   br, dark ? color_dark : color_sat);
    } else if (type == "missing") {
        // A bite out of the object edge, refilled with background texture.
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double br = rng.uniform(spec.resolution / 10.0, spec.resolution / 7.0);
        const double by = p.cy + std::sin(ang) * p.radius * 0.95;
        const double bx = p.cx + std::cos(ang) * p.radius * 0.95;
        for (int y = 0; y < spec.resolution; ++y) {
            for (int x = 0; x < spec.resolution; ++x) {
                const double dy = y - by, dx = x - bx;
                if (dy * dy + dx * dx > br * br) continue;
                if (coverage(spec, p, y, x) <= 0.0) continue;  // only object pixels change
                for (int c = 0; c < 3; ++c) out.image.at(y, x, c) = background_value(spec, p, y, x, c);
                out.mask.at(y, x, 0) = 1.0;
            }
        }
    } else {
        raise(ErrorCode::ConfigError, "unknown defect type: " + type);
    }
    return out;
}

SynthSpec parse_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open synth spec: " + path.string());
    SynthSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::string eq;
        ls >> eq;
        if (eq != "=") {
            raise(ErrorCode::ConfigError,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        if (key == "shapes") {
            ls >> spec.category;
        } else if (key == "seed") {
            ls >> spec.seed;
        } else if (key == "resolution") {
            ls >> spec.resolution;
        } else if (key == "textures") {
            // tokens like base:0.66,0.47,0.28 noise:0.03
            std::string tok;
            while (ls >> tok) {
                if (tok.rfind("base:", 0) == 0) {
                    std::sscanf(tok.c_str() + 5, "%lf,%lf,%lf", &spec.base_color[0],
                                &spec.base_color[1], &spec.base_color[2]);
                } else if (tok.rfind("noise:", 0) == 0) {
                    spec.noise_amp = std::stod(tok.substr(6));
                }
            }
        } else if (key == "defects") {
            std::string tok;
            while (ls >> tok) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos) continue;
                const std::string name = tok.substr(0, colon);
                const int count = std::stoi(tok.substr(colon + 1));
                if (name == "scratch") spec.scratch = count;
                else if (name == "blob") spec.blob = count;
                else if (name == "missing") spec.missing = count;
                else raise(ErrorCode::ConfigError, "unknown defect type in spec: " + name);
            }
        } else if (key == "counts") {
            std::string tok;
            while (ls >> tok) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos) continue;
                const std::string name = tok.substr(0, colon);
                const int count = std::stoi(tok.substr(colon + 1));
                if (name == "train_good") spec.train_good = count;
                else if (name == "test_good") spec.test_good = count;
                else raise(ErrorCode::ConfigError, "unknown count in spec: " + name);
            }
        } else {
            raise(ErrorCode::ConfigError, "unknown synth spec key: " + key);
        }
    }
    return spec;
}

std::filesystem::path make_synthetic_category(const SynthSpec& spec, Rng& rng,
                                              const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const fs::path category_root = out_dir / spec.category;
    fs::create_directories(category_root / "train" / "good");
    if (spec.test_good > 0) fs::create_directories(category_root / "test" / "good");

    char name[32];
    for (int i = 0; i < spec.train_good; ++i) {
        Rng img_rng = rng.derive("train_good", static_cast<uint64_t>(i));
        std::snprintf(name, sizeof(name), "%03d.png", i);
        write_image(category_root / "train" / "good" / name, render_good(spec, img_rng));
    }
    for (int i = 0; i < spec.test_good; ++i) {
        Rng img_rng = rng.derive("test_good", static_cast<uint64_t>(i));
        std::snprintf(name, sizeof(name), "%03d.png", i);
        write_image(category_root / "test" / "good" / name, render_good(spec, img_rng));
    }

    const struct {
        const char* type;
        int count;
    } defect_sets[] = {{"scratch", spec.scratch}, {"blob", spec.blob}, {"missing", spec.missing}};
    for (const auto& [type, count] : defect_sets) {
        if (count <= 0) continue;
        fs::create_directories(category_root / "test" / type);
        fs::create_directories(category_root / "ground_truth" / type);
        for (int i = 0; i < count; ++i) {
            Rng img_rng = rng.derive(std::string("defect.") + type, static_cast<uint64_t>(i));
            DefectRender render = render_defect(spec, type, img_rng);
            std::snprintf(name, sizeof(name), "%03d.png", i);
            write_image(category_root / "test" / type / name, render.image);
            char mask_name[40];
            std::snprintf(mask_name, sizeof(mask_name), "%03d_mask.png", i);
            write_image(category_root / "ground_truth" / type / mask_name, render.mask);
        }
    }
    return category_root;
}

}  // namespace varigen::data
