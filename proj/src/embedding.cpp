#include "varigen/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>

#include "varigen/errors.hpp"
#include "varigen/rng.hpp"

namespace varigen::embedding {

EmbeddingVector normalize(const EmbeddingVector& v) {
    double norm_sq = 0.0;
    for (double x : v.values) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (!(norm > 1e-12)) raise(ErrorCode::ZeroVector, "cannot normalize a zero vector");
    EmbeddingVector out;
    out.values.resize(v.values.size());
    for (size_t i = 0; i < v.values.size(); ++i) out.values[i] = v.values[i] / norm;
    out.normalized = true;
    return out;
}

namespace {

void require_dims(const EmbeddingVector& a, const EmbeddingVector& b, const char* where) {
    if (a.dim() != b.dim()) {
        raise(ErrorCode::DimensionMismatch, std::string(where) + ": " + std::to_string(a.dim()) +
                                                " vs " + std::to_string(b.dim()));
    }
    if (a.dim() == 0) raise(ErrorCode::DimensionMismatch, std::string(where) + ": empty vectors");
}

}  // namespace

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_dims(a, b, "cosine_similarity");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (!(na > 0.0) || !(nb > 0.0)) raise(ErrorCode::ZeroVector, "cosine of a zero vector");
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_dims(a, b, "l2_distance");
    double acc = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Toy backend

namespace {

// Feature index -> (dim, sign) via FNV-1a on a tagged decimal name. The tag
// keeps image and text features in unrelated projections.
void hash_accumulate(std::vector<double>& acc, const std::string& name, double value) {
    const uint64_t h = fnv1a64(name);
    const size_t dim = h % acc.size();
    const double sign = ((h >> 32) & 1ULL) ? 1.0 : -1.0;
    acc[dim] += sign * value;
}

}  // namespace

const std::string& ToyBackend::identifier() const {
    static const std::string id = "toy";
    return id;
}

EmbeddingVector ToyBackend::embed_image(const ImageTensor& image) const {
    if (image.height < 8 || image.width < 8 || image.channels < 1) {
        raise(ErrorCode::UnsupportedImageShape,
              "toy backend needs at least 8x8 pixels, got " + std::to_string(image.height) + "x" +
                  std::to_string(image.width));
    }
    std::vector<double> acc(kDim, 0.0);

    // 4×4 per-channel mean pools.
    for (int c = 0; c < image.channels; ++c) {
        for (int gy = 0; gy < 4; ++gy) {
            const int r0 = gy * image.height / 4, r1 = (gy + 1) * image.height / 4;
            for (int gx = 0; gx < 4; ++gx) {
                const int c0 = gx * image.width / 4, c1 = (gx + 1) * image.width / 4;
                double sum = 0.0;
                for (int y = r0; y < r1; ++y)
                    for (int x = c0; x < c1; ++x) sum += image.at(y, x, c);
                const double mean = sum / (static_cast<double>(r1 - r0) * (c1 - c0));
                const int index = c * 16 + gy * 4 + gx;
                hash_accumulate(acc, "img:pool:" + std::to_string(index), mean);
            }
        }
    }

    // 8-bin histogram of gray gradient magnitudes over interior pixels,
    // bins equal-width on [0, sqrt(2)], normalized by pixel count.
    const ImageTensor gray = to_grayscale(image);
    double bins[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int count = 0;
    for (int y = 0; y + 1 < gray.height; ++y) {
        for (int x = 0; x + 1 < gray.width; ++x) {
            const double gx = gray.at(y, x + 1, 0) - gray.at(y, x, 0);
            const double gy = gray.at(y + 1, x, 0) - gray.at(y, x, 0);
            const double mag = std::sqrt(gx * gx + gy * gy);
            int b = static_cast<int>(mag / std::sqrt(2.0) * 8.0);
            if (b > 7) b = 7;
            bins[b] += 1.0;
            ++count;
        }
    }
    for (int b = 0; b < 8; ++b) {
        hash_accumulate(acc, "img:grad:" + std::to_string(b), bins[b] / count);
    }

    return normalize(EmbeddingVector{std::move(acc), false});
}

EmbeddingVector ToyBackend::embed_text(const std::string& text) const {
    std::string trimmed;
    {
        size_t b = text.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) raise(ErrorCode::EmptyText, "text is empty after trimming");
        size_t e = text.find_last_not_of(" \t\r\n");
        trimmed = text.substr(b, e - b + 1);
    }
    std::string lower;
    lower.reserve(trimmed.size());
    for (unsigned char ch : trimmed) lower.push_back(static_cast<char>(std::tolower(ch)));

    // Sentinel-padded character trigram counts.
    const std::string padded = "\x02\x02" + lower + "\x03\x03";
    std::map<std::string, int> counts;
    for (size_t i = 0; i + 3 <= padded.size(); ++i) counts[padded.substr(i, 3)]++;

    std::vector<double> acc(kDim, 0.0);
    for (const auto& [trigram, n] : counts) {
        hash_accumulate(acc, "txt:" + trigram, static_cast<double>(n));
    }
    return normalize(EmbeddingVector{std::move(acc), false});
}

// ---------------------------------------------------------------------------
// Backend registry

namespace {

std::mutex g_registry_mutex;
std::map<std::string, PluginBackendFns>& registry() {
    static std::map<std::string, PluginBackendFns> r;
    return r;
}

class PluginBackend final : public EmbeddingBackend {
public:
    PluginBackend(std::string id, PluginBackendFns fns) : id_(std::move(id)), fns_(std::move(fns)) {}

    const std::string& identifier() const override { return id_; }
    int embed_dim() const override { return fns_.embed_dim; }

    EmbeddingVector embed_image(const ImageTensor& image) const override {
        EmbeddingVector raw{fns_.embed_image(image), false};
        check_dim(raw);
        return normalize(raw);
    }
    EmbeddingVector embed_text(const std::string& text) const override {
        EmbeddingVector raw{fns_.embed_text(text), false};
        check_dim(raw);
        return normalize(raw);
    }

private:
    void check_dim(const EmbeddingVector& v) const {
        if (static_cast<int>(v.dim()) != fns_.embed_dim) {
            raise(ErrorCode::DimensionMismatch,
                  "plugin backend '" + id_ + "' returned dimension " + std::to_string(v.dim()) +
                      ", declared " + std::to_string(fns_.embed_dim));
        }
        for (double x : v.values) {
            if (!std::isfinite(x)) {
                raise(ErrorCode::BackendUnavailable,
                      "plugin backend '" + id_ + "' returned a non-finite entry");
            }
        }
    }

    std::string id_;
    PluginBackendFns fns_;
};

}  // namespace

void register_backend(const std::string& identifier, PluginBackendFns fns) {
    if (identifier == "toy") {
        raise(ErrorCode::ConfigError, "the 'toy' backend identifier is reserved");
    }
    if (fns.embed_dim <= 0 || !fns.embed_image || !fns.embed_text) {
        raise(ErrorCode::ConfigError, "plugin backend registration is incomplete");
    }
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    registry()[identifier] = std::move(fns);
}

void unregister_backend(const std::string& identifier) {
    std::lock_guard<std::mutex> lock(g_registry_mutex);
    registry().erase(identifier);
}

std::shared_ptr<const EmbeddingBackend> make_backend(const std::string& identifier) {
    if (identifier == "toy") return std::make_shared<ToyBackend>();
    {
        std::lock_guard<std::mutex> lock(g_registry_mutex);
        auto it = registry().find(identifier);
        if (it != registry().end()) {
            return std::make_shared<PluginBackend>(identifier, it->second);
        }
    }
    raise(ErrorCode::BackendUnavailable,
          "embedding backend '" + identifier +
              "' is not bundled (pretrained encoders must be registered as plugins)");
}

}  // namespace varigen::embedding
