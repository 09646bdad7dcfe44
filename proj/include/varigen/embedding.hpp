#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "varigen/image.hpp"

namespace varigen::embedding {

struct EmbeddingVector {
    std::vector<double> values;
    bool normalized = false;

    size_t dim() const { return values.size(); }
};

/// Scale to unit L2 norm. Throws ZeroVector on (near-)zero input.
EmbeddingVector normalize(const EmbeddingVector& v);

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// Shared text/image embedding space. Implementations must be deterministic
/// (identical input bytes yield identical vectors) and immutable after
/// construction; embed_* are safe to call from many threads.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual const std::string& identifier() const = 0;
    virtual int embed_dim() const = 0;
    virtual EmbeddingVector embed_image(const ImageTensor& image) const = 0;
    virtual EmbeddingVector embed_text(const std::string& text) const = 0;
};

/// Dependency-free deterministic embedder used for tests and desk-scale runs.
/// Images: 4×4 per-channel mean pools + 8-bin gradient-magnitude histogram,
/// hash-projected to 64 dims. Text: character-trigram counts of the lowercased
/// string, hash-projected to 64 dims. Both unit-normalized.
class ToyBackend final : public EmbeddingBackend {
public:
    static constexpr int kDim = 64;

    const std::string& identifier() const override;
    int embed_dim() const override { return kDim; }
    EmbeddingVector embed_image(const ImageTensor& image) const override;
    EmbeddingVector embed_text(const std::string& text) const override;
};

/// Hook for externally supplied encoders (e.g. a pretrained vision-language
/// model registered from python). Callables must be deterministic.
struct PluginBackendFns {
    int embed_dim = 0;
    std::function<std::vector<double>(const ImageTensor&)> embed_image;
    std::function<std::vector<double>(const std::string&)> embed_text;
};

void register_backend(const std::string& identifier, PluginBackendFns fns);
void unregister_backend(const std::string& identifier);

/// "toy" is always available; other identifiers (e.g. "vit-b-16") resolve to a
/// registered plugin or throw BackendUnavailable.
std::shared_ptr<const EmbeddingBackend> make_backend(const std::string& identifier);

}  // namespace varigen::embedding
