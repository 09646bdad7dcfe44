#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "varigen/image.hpp"
#include "varigen/rng.hpp"

namespace varigen::data {

/// Desk-scale stand-in for an industrial inspection category: textured object
/// renderings with controlled in-distribution variation, plus defect images
/// carrying planted anomalies with exact render-time masks.
struct SynthSpec {
    std::string category = "disk";  // also the shape family: disk | ring | square
    int resolution = 64;
    int train_good = 20;
    int test_good = 10;
    int scratch = 4;
    int blob = 3;
    int missing = 3;
    uint64_t seed = 0;
    std::array<double, 3> base_color = {0.66, 0.47, 0.28};
    double noise_amp = 0.03;

    int defect_total() const { return scratch + blob + missing; }
};

/// Flat key=value spec file with keys shapes, textures, defects, counts, seed.
SynthSpec parse_synth_spec(const std::filesystem::path& path);

/// One in-distribution rendering (center/radius/tint jitter + surface noise).
ImageTensor render_good(const SynthSpec& spec, Rng& rng);

struct DefectRender {
    ImageTensor image;
    ImageTensor mask;  // 1 channel, exactly the modified pixels
    std::string type;
};

/// A good rendering with one planted anomaly of the given type
/// (scratch | blob | missing).
DefectRender render_defect(const SynthSpec& spec, const std::string& type, Rng& rng);

/// Writes a layout-conforming dataset tree under out_dir/<category>/ and
/// returns the category root. Byte-identical for a fixed seed.
std::filesystem::path make_synthetic_category(const SynthSpec& spec, Rng& rng,
                                              const std::filesystem::path& out_dir);

}  // namespace varigen::data
