#include "varigen/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "varigen/errors.hpp"

namespace varigen::data {

namespace {

std::string fmt(const char* name, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s(%.4f)", name, value);
    return buf;
}

}  // namespace

ImageTensor op_random_crop(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    const double retain = rng.uniform(0.85, 0.95);
    const int ch = std::max(1, static_cast<int>(std::lround(retain * img.height)));
    const int cw = std::max(1, static_cast<int>(std::lround(retain * img.width)));
    const int oy = static_cast<int>(rng.uniform_int(0, img.height - ch));
    const int ox = static_cast<int>(rng.uniform_int(0, img.width - cw));
    ImageTensor crop(ch, cw, img.channels);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            for (int c = 0; c < img.channels; ++c) crop.at(y, x, c) = img.at(oy + y, ox + x, c);
    log.push_back(fmt("random_crop", retain));
    return resize_bilinear(crop, img.height, img.width);
}

ImageTensor op_color_jitter(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    const double brightness = rng.uniform(0.8, 1.2);
    const double contrast = rng.uniform(0.8, 1.2);
    double mean = 0.0;
    for (double v : img.data) mean += v;
    mean /= static_cast<double>(img.data.size());
    ImageTensor out(img.height, img.width, img.channels);
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double bright = img.data[i] * brightness;
        out.data[i] = std::clamp((bright - mean) * contrast + mean, 0.0, 1.0);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "color_jitter(brightness=%.4f,contrast=%.4f)", brightness,
                  contrast);
    log.push_back(buf);
    return out;
}

ImageTensor op_random_rotation(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    const double degrees = rng.uniform(-15.0, 15.0);
    log.push_back(fmt("random_rotation", degrees));
    return rotate_bilinear(img, degrees);
}

ImageTensor op_autocontrast(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    (void)rng;  // fixed 1% cutoff; kept in the op pool signature for uniformity
    ImageTensor out(img.height, img.width, img.channels);
    const size_t per_channel = static_cast<size_t>(img.height) * img.width;
    std::vector<double> sorted(per_channel);
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                sorted[static_cast<size_t>(y) * img.width + x] = img.at(y, x, c);
        std::sort(sorted.begin(), sorted.end());
        const size_t cut = static_cast<size_t>(std::floor(0.01 * (per_channel - 1)));
        const double lo = sorted[cut];
        const double hi = sorted[per_channel - 1 - cut];
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const double v = img.at(y, x, c);
                out.at(y, x, c) = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : v;
            }
        }
    }
    log.push_back("autocontrast(cutoff=0.01)");
    return out;
}

ImageTensor op_gaussian_blur(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    const double sigma = rng.uniform(0.5, 1.5);
    log.push_back(fmt("gaussian_blur", sigma));
    return gaussian_blur(img, sigma);
}

ImageTensor op_noise_reduction(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    (void)rng;
    log.push_back("noise_reduction(median3x3)");
    return median3x3(img);
}

ImageTensor op_adjust_sharpness(const ImageTensor& img, Rng& rng, std::vector<std::string>& log) {
    const double factor = rng.uniform(0.5, 2.0);
    const ImageTensor blurred = gaussian_blur(img, 1.0);
    ImageTensor out(img.height, img.width, img.channels);
    for (size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = std::clamp(blurred.data[i] + factor * (img.data[i] - blurred.data[i]), 0.0, 1.0);
    }
    log.push_back(fmt("adjust_sharpness", factor));
    return out;
}

namespace {

using OpFn = ImageTensor (*)(const ImageTensor&, Rng&, std::vector<std::string>&);

struct PoolEntry {
    const char* name;
    OpFn fn;
};

constexpr PoolEntry kRandomPool[] = {
    {"gaussian_blur", op_gaussian_blur},
    {"noise_reduction", op_noise_reduction},
    {"random_rotation", op_random_rotation},
    {"adjust_sharpness", op_adjust_sharpness},
    {"autocontrast", op_autocontrast},
    {"color_jitter", op_color_jitter},
};

}  // namespace

bool is_known_strategy(const std::string& name) {
    return name == "identity" || name == "strategies-1" || name == "strategies-2" ||
           name == "random-pick";
}

std::vector<std::string> known_strategies() {
    return {"identity", "strategies-1", "strategies-2", "random-pick"};
}

AugmentationBatch augment(const std::vector<ImageTensor>& originals, const std::string& strategy,
                          int n, Rng& rng) {
    if (originals.empty()) raise(ErrorCode::EmptyInput, "augment: no originals");
    if (n < 1) raise(ErrorCode::EmptyInput, "augment: N must be at least 1");
    if (!is_known_strategy(strategy)) {
        raise(ErrorCode::UnknownStrategy, "unknown augmentation strategy: " + strategy);
    }

    AugmentationBatch batch;
    batch.images.reserve(n);
    batch.ops.resize(n);
    batch.source_index.resize(n);
    for (int i = 0; i < n; ++i) {
        const int src = i % static_cast<int>(originals.size());
        batch.source_index[i] = src;
        const ImageTensor& base = originals[src];
        auto& log = batch.ops[i];

        if (strategy == "identity") {
            log.push_back("identity");
            batch.images.push_back(base);
        } else if (strategy == "strategies-1") {
            ImageTensor img = op_random_crop(base, rng, log);
            batch.images.push_back(op_color_jitter(img, rng, log));
        } else if (strategy == "strategies-2") {
            ImageTensor img = op_random_rotation(base, rng, log);
            batch.images.push_back(op_autocontrast(img, rng, log));
        } else {  // random-pick
            const auto& entry = kRandomPool[rng.uniform_int(0, std::size(kRandomPool) - 1)];
            batch.images.push_back(entry.fn(base, rng, log));
        }
    }
    return batch;
}

}  // namespace varigen::data
