#pragma once

#include <string>
#include <vector>

#include "varigen/image.hpp"
#include "varigen/rng.hpp"

namespace varigen::data {

/// Named strategies:
///   identity      — exact copies
///   strategies-1  — RandomCrop (retain 85–95%, resized back), ColorJitter ±0.2
///   strategies-2  — RandomRotation ±15°, RandomAutocontrast (1% cutoff)
///   random-pick   — one op per sample from {GaussianBlur, NoiseReduction,
///                   RandomRotation, RandomAdjustSharpness, RandomAutocontrast,
///                   ColorJitter}
bool is_known_strategy(const std::string& name);
std::vector<std::string> known_strategies();

struct AugmentationBatch {
    std::vector<ImageTensor> images;
    std::vector<std::vector<std::string>> ops;  // per-sample op descriptions with drawn params
    std::vector<int> source_index;              // round-robin original per sample
};

/// N augmented images; sample i transforms originals[i % count] with
/// parameters drawn in sample order from the passed stream. Output shape
/// equals input shape. Throws UnknownStrategy for unknown names.
AugmentationBatch augment(const std::vector<ImageTensor>& originals, const std::string& strategy,
                          int n, Rng& rng);

// Individual operations (exposed for tests); each appends its description.
ImageTensor op_random_crop(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_color_jitter(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_random_rotation(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_autocontrast(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_gaussian_blur(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_noise_reduction(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);
ImageTensor op_adjust_sharpness(const ImageTensor& img, Rng& rng, std::vector<std::string>& log);

}  // namespace varigen::data
