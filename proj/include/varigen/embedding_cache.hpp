#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <shared_mutex>
#include <string>

#include "varigen/embedding.hpp"

namespace varigen::embedding {

/// Stable cache keys: content digest over (backend id, input bytes). Images
/// are keyed by shape + raw sample bytes so copies of the same file share one
/// entry regardless of path.
std::string image_cache_key(const EmbeddingBackend& backend, const ImageTensor& image);
std::string text_cache_key(const EmbeddingBackend& backend, const std::string& text);

/// Persistent append-only embedding cache. Each record stores the hex digest,
/// the dimension, the raw little-endian 32-bit float payload and a trailing
/// length check; a record failing the check marks the tail corrupt, the valid
/// prefix is kept and rewritten. Vectors returned by get_or_compute are the
/// float32 round-trip of the computed embedding, so a miss and a later hit
/// return identical values. Writes are serialized; reads are shared.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path path);

    EmbeddingVector get_or_compute(const std::string& hex_key,
                                   const std::function<EmbeddingVector()>& compute);

    bool contains(const std::string& hex_key) const;
    size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    void load();
    void append_record(const std::string& hex_key, const std::vector<float>& payload);
    void rewrite_all();

    std::filesystem::path path_;
    std::map<std::string, std::vector<float>> entries_;
    mutable std::shared_mutex mutex_;
};

}  // namespace varigen::embedding
