#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "varigen/image.hpp"
#include "varigen/rng.hpp"

namespace varigen::detector {

struct PatchFeatureGrid {
    int grid_h = 0;
    int grid_w = 0;
    int dim = 0;
    std::vector<double> values;  // (grid_h*grid_w) × dim, row-major

    const double* row(int i) const { return values.data() + static_cast<size_t>(i) * dim; }
    int count() const { return grid_h * grid_w; }
};

/// Deterministic patch feature extractor.
class FeatureBackbone {
public:
    virtual ~FeatureBackbone() = default;
    virtual const std::string& identifier() const = 0;
    virtual int patch_size() const = 0;
    virtual PatchFeatureGrid extract(const ImageTensor& image) const = 0;
};

/// Per 8×8 patch and channel: mean, standard deviation, mean |∇x|, mean |∇y|.
class ToyBackbone final : public FeatureBackbone {
public:
    const std::string& identifier() const override;
    int patch_size() const override { return 8; }
    PatchFeatureGrid extract(const ImageTensor& image) const override;
};

/// Pluggable production backbones (e.g. mid-level CNN activations registered
/// from python); "toy" is always available.
struct BackbonePluginFns {
    int patch_size = 8;
    std::function<PatchFeatureGrid(const ImageTensor&)> extract;
};
void register_backbone(const std::string& identifier, BackbonePluginFns fns);
void unregister_backbone(const std::string& identifier);
std::shared_ptr<const FeatureBackbone> make_backbone(const std::string& identifier);

struct FeatureBank {
    int dim = 0;
    std::vector<double> features;  // count × dim
    size_t count = 0;
    size_t source_images = 0;
    double coreset_fraction = 1.0;

    const double* row(size_t i) const { return features.data() + i * dim; }
};

/// Greedy farthest-point (k-center) subset of `count` rows; seeded random
/// start, ties to the smallest index. Returns selected row indices in
/// selection order.
std::vector<size_t> coreset_select(const std::vector<double>& features, size_t count, int dim,
                                   size_t keep, Rng& rng);

/// Pool patch features over the training images; a coreset_fraction below 1
/// keeps round(fraction * n) features by greedy farthest-point subsampling.
FeatureBank build_bank(const std::vector<ImageTensor>& train_images,
                       const FeatureBackbone& backbone, double coreset_fraction, Rng& rng);

struct AnomalyScore {
    double image_score = 0.0;
    ImageTensor score_map;  // H×W, 1 channel
};

/// Patch score = L2 distance to the nearest bank feature, upsampled
/// nearest-neighbor to image size, Gaussian-smoothed (sigma scaled from 4 px
/// at 64×64), image score = max of the map.
AnomalyScore score_image(const ImageTensor& image, const FeatureBank& bank,
                         const FeatureBackbone& backbone, double smooth_sigma_at_64 = 4.0);

/// Probability a random anomalous score exceeds a random normal one, ties
/// counted half (Mann-Whitney U, computed from exact integer pair counts).
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct TestImage {
    ImageTensor image;
    bool anomalous = false;
    ImageTensor mask;       // required when anomalous (1 channel, {0,1})
    std::string name;
};

struct EvalReport {
    double detection_auroc = 0.0;
    double segmentation_auroc = 0.0;
    std::vector<double> image_scores;
    std::vector<int> image_labels;
    std::vector<std::string> image_names;
    std::string scenario;
    size_t bank_size = 0;
    size_t train_originals = 0;
    size_t train_generated = 0;
};

/// Detection AUROC over image scores; segmentation AUROC over all pixels
/// pooled across the test set (mask pixels are positives).
EvalReport evaluate(const FeatureBank& bank, const FeatureBackbone& backbone,
                    const std::vector<TestImage>& test_set, double smooth_sigma_at_64 = 4.0);

}  // namespace varigen::detector
