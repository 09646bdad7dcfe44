#include "varigen/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "varigen/errors.hpp"

namespace varigen::detector {

const std::string& ToyBackbone::identifier() const {
    static const std::string id = "toy";
    return id;
}

PatchFeatureGrid ToyBackbone::extract(const ImageTensor& image) const {
    const int ps = patch_size();
    if (image.height < ps || image.width < ps) {
        raise(ErrorCode::UnsupportedImageShape, "image smaller than one patch");
    }
    PatchFeatureGrid grid;
    grid.grid_h = image.height / ps;
    grid.grid_w = image.width / ps;
    grid.dim = 4 * image.channels;
    grid.values.resize(static_cast<size_t>(grid.grid_h) * grid.grid_w * grid.dim);

    for (int gy = 0; gy < grid.grid_h; ++gy) {
        for (int gx = 0; gx < grid.grid_w; ++gx) {
            double* out = grid.values.data() +
                          (static_cast<size_t>(gy) * grid.grid_w + gx) * grid.dim;
            for (int c = 0; c < image.channels; ++c) {
                double sum = 0.0, sum_sq = 0.0, sum_gx = 0.0, sum_gy = 0.0;
                int n_gx = 0, n_gy = 0;
                for (int y = gy * ps; y < (gy + 1) * ps; ++y) {
                    for (int x = gx * ps; x < (gx + 1) * ps; ++x) {
                        const double v = image.at(y, x, c);
                        sum += v;
                        sum_sq += v * v;
                        if (x + 1 < (gx + 1) * ps) {
                            sum_gx += std::abs(image.at(y, x + 1, c) - v);
                            ++n_gx;
                        }
                        if (y + 1 < (gy + 1) * ps) {
                            sum_gy += std::abs(image.at(y + 1, x, c) - v);
                            ++n_gy;
                        }
                    }
                }
                const double n = static_cast<double>(ps) * ps;
                const double mean = sum / n;
                const double var = std::max(0.0, sum_sq / n - mean * mean);
                out[4 * c + 0] = mean;
                out[4 * c + 1] = std::sqrt(var);
                out[4 * c + 2] = sum_gx / n_gx;
                out[4 * c + 3] = sum_gy / n_gy;
            }
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Backbone registry

namespace {

std::mutex g_backbone_mutex;
std::map<std::string, BackbonePluginFns>& backbone_registry() {
    static std::map<std::string, BackbonePluginFns> r;
    return r;
}

class PluginBackbone final : public FeatureBackbone {
public:
    PluginBackbone(std::string id, BackbonePluginFns fns)
        : id_(std::move(id)), fns_(std::move(fns)) {}
    const std::string& identifier() const override { return id_; }
    int patch_size() const override { return fns_.patch_size; }
    PatchFeatureGrid extract(const ImageTensor& image) const override {
        return fns_.extract(image);
    }

private:
    std::string id_;
    BackbonePluginFns fns_;
};

}  // namespace

void register_backbone(const std::string& identifier, BackbonePluginFns fns) {
    if (identifier == "toy") raise(ErrorCode::ConfigError, "the 'toy' backbone name is reserved");
    if (fns.patch_size < 1 || !fns.extract) {
        raise(ErrorCode::ConfigError, "backbone plugin registration is incomplete");
    }
    std::lock_guard<std::mutex> lock(g_backbone_mutex);
    backbone_registry()[identifier] = std::move(fns);
}

void unregister_backbone(const std::string& identifier) {
    std::lock_guard<std::mutex> lock(g_backbone_mutex);
    backbone_registry().erase(identifier);
}

std::shared_ptr<const FeatureBackbone> make_backbone(const std::string& identifier) {
    if (identifier == "toy") return std::make_shared<ToyBackbone>();
    {
        std::lock_guard<std::mutex> lock(g_backbone_mutex);
        auto it = backbone_registry().find(identifier);
        if (it != backbone_registry().end()) {
            return std::make_shared<PluginBackbone>(identifier, it->second);
        }
    }
    raise(ErrorCode::BackendUnavailable,
          "feature backbone '" + identifier +
              "' is not bundled (pretrained backbones must be registered as plugins)");
}

// ---------------------------------------------------------------------------
// Bank

std::vector<size_t> coreset_select(const std::vector<double>& features, size_t count, int dim,
                                   size_t keep, Rng& rng) {
    if (count == 0 || keep == 0) raise(ErrorCode::EmptyInput, "coreset over an empty set");
    keep = std::min(keep, count);
    std::vector<size_t> selected;
    selected.reserve(keep);
    const size_t start = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(count) - 1));
    selected.push_back(start);

    auto sq_dist = [&](size_t a, size_t b) {
        const double* pa = features.data() + a * dim;
        const double* pb = features.data() + b * dim;
        double acc = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double d = pa[c] - pb[c];
            acc += d * d;
        }
        return acc;
    };

    std::vector<double> min_dist(count);
    for (size_t i = 0; i < count; ++i) min_dist[i] = sq_dist(i, start);
    while (selected.size() < keep) {
        size_t best = 0;
        double best_dist = -1.0;
        for (size_t i = 0; i < count; ++i) {
            if (min_dist[i] > best_dist) {  // strict: ties keep the smallest index
                best_dist = min_dist[i];
                best = i;
            }
        }
        selected.push_back(best);
        for (size_t i = 0; i < count; ++i) min_dist[i] = std::min(min_dist[i], sq_dist(i, best));
    }
    return selected;
}

FeatureBank build_bank(const std::vector<ImageTensor>& train_images,
                       const FeatureBackbone& backbone, double coreset_fraction, Rng& rng) {
    if (train_images.empty()) raise(ErrorCode::EmptyTrainingSet, "no training images for the bank");
    if (!(coreset_fraction > 0.0) || coreset_fraction > 1.0) {
        raise(ErrorCode::ConfigError, "coreset fraction must lie in (0, 1]");
    }
    FeatureBank bank;
    bank.source_images = train_images.size();
    bank.coreset_fraction = coreset_fraction;
    for (const auto& img : train_images) {
        const PatchFeatureGrid grid = backbone.extract(img);
        if (bank.dim == 0) bank.dim = grid.dim;
        if (grid.dim != bank.dim) {
            raise(ErrorCode::DimensionMismatch, "inconsistent feature dimensions across images");
        }
        bank.features.insert(bank.features.end(), grid.values.begin(), grid.values.end());
    }
    bank.count = bank.features.size() / bank.dim;

    if (coreset_fraction < 1.0) {
        const size_t keep = std::max<size_t>(
            1, static_cast<size_t>(std::lround(coreset_fraction * static_cast<double>(bank.count))));
        const auto indices = coreset_select(bank.features, bank.count, bank.dim, keep, rng);
        std::vector<double> kept;
        kept.reserve(indices.size() * bank.dim);
        for (size_t i : indices) {
            kept.insert(kept.end(), bank.features.begin() + i * bank.dim,
                        bank.features.begin() + (i + 1) * bank.dim);
        }
        bank.features = std::move(kept);
        bank.count = indices.size();
    }
    return bank;
}

AnomalyScore score_image(const ImageTensor& image, const FeatureBank& bank,
                         const FeatureBackbone& backbone, double smooth_sigma_at_64) {
    if (bank.count == 0) raise(ErrorCode::EmptyTrainingSet, "bank is empty");
    const PatchFeatureGrid grid = backbone.extract(image);
    if (grid.dim != bank.dim) {
        raise(ErrorCode::DimensionMismatch, "bank and backbone feature dimensions differ");
    }

    std::vector<double> patch_scores(static_cast<size_t>(grid.count()));
    for (int i = 0; i < grid.count(); ++i) {
        const double* f = grid.row(i);
        double best = std::numeric_limits<double>::infinity();
        for (size_t b = 0; b < bank.count; ++b) {
            const double* g = bank.row(b);
            double acc = 0.0;
            for (int c = 0; c < grid.dim; ++c) {
                const double d = f[c] - g[c];
                acc += d * d;
            }
            best = std::min(best, acc);
        }
        patch_scores[i] = std::sqrt(best);
    }

    // Nearest-neighbor upsample to pixel resolution, then Gaussian smoothing.
    ImageTensor map(image.height, image.width, 1);
    const int ps = backbone.patch_size();
    for (int y = 0; y < image.height; ++y) {
        const int gy = std::min(y / ps, grid.grid_h - 1);
        for (int x = 0; x < image.width; ++x) {
            const int gx = std::min(x / ps, grid.grid_w - 1);
            map.at(y, x, 0) = patch_scores[static_cast<size_t>(gy) * grid.grid_w + gx];
        }
    }
    const double sigma = smooth_sigma_at_64 * image.height / 64.0;
    if (sigma > 0.0) map = gaussian_blur(map, sigma);

    AnomalyScore result;
    result.score_map = std::move(map);
    result.image_score = *std::max_element(result.score_map.data.begin(),
                                           result.score_map.data.end());
    return result;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        raise(ErrorCode::DimensionMismatch, "auroc: scores and labels must pair up");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) raise(ErrorCode::NonFiniteLoss, "auroc: non-finite score");
    }
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        raise(ErrorCode::SingleClassInput, "auroc needs both classes present");
    }

    // Sort once; count (anomalous > normal) pairs exactly, ties as half.
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    uint64_t wins2 = 0;  // 2*wins + ties
    size_t i = 0;
    uint64_t neg_below = 0;
    while (i < order.size()) {
        size_t j = i;
        uint64_t pos_here = 0, neg_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] != 0 ? pos_here : neg_here)++;
            ++j;
        }
        wins2 += pos_here * (2 * neg_below + neg_here);
        neg_below += neg_here;
        i = j;
    }
    return static_cast<double>(wins2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(const FeatureBank& bank, const FeatureBackbone& backbone,
                    const std::vector<TestImage>& test_set, double smooth_sigma_at_64) {
    if (test_set.empty()) raise(ErrorCode::EmptyInput, "empty test set");
    bool any_pos = false, any_neg = false;
    for (const auto& t : test_set) {
        (t.anomalous ? any_pos : any_neg) = true;
        if (t.anomalous && t.mask.empty()) {
            raise(ErrorCode::MissingMask, "anomalous test image without mask: " + t.name);
        }
        if (t.anomalous && (t.mask.height != t.image.height || t.mask.width != t.image.width)) {
            raise(ErrorCode::ShapeMismatch, "mask shape differs from image: " + t.name);
        }
    }
    if (!any_pos || !any_neg) {
        raise(ErrorCode::SingleClassInput, "test set needs normal and anomalous images");
    }

    EvalReport report;
    report.bank_size = bank.count;
    std::vector<double> pixel_scores;
    std::vector<int> pixel_labels;
    for (const auto& t : test_set) {
        const AnomalyScore score = score_image(t.image, bank, backbone, smooth_sigma_at_64);
        report.image_scores.push_back(score.image_score);
        report.image_labels.push_back(t.anomalous ? 1 : 0);
        report.image_names.push_back(t.name);
        for (int y = 0; y < score.score_map.height; ++y) {
            for (int x = 0; x < score.score_map.width; ++x) {
                pixel_scores.push_back(score.score_map.at(y, x, 0));
                pixel_labels.push_back(t.anomalous && t.mask.at(y, x, 0) >= 0.5 ? 1 : 0);
            }
        }
    }
    report.detection_auroc = auroc(report.image_scores, report.image_labels);
    report.segmentation_auroc = auroc(pixel_scores, pixel_labels);
    return report;
}

}  // namespace varigen::detector
