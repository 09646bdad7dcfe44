#include "varigen/embedding_cache.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "varigen/digest.hpp"
#include "varigen/errors.hpp"

namespace varigen::embedding {

namespace {

constexpr char kMagic[4] = {'V', 'G', 'E', '1'};
constexpr size_t kDigestLen = 64;

void put_u32le(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::string& out, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32le(out, bits);
}

bool read_u32le(std::istream& in, uint32_t& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
        (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    return true;
}

std::vector<float> to_f32(const EmbeddingVector& v) {
    std::vector<float> out(v.values.size());
    for (size_t i = 0; i < v.values.size(); ++i) out[i] = static_cast<float>(v.values[i]);
    return out;
}

EmbeddingVector from_f32(const std::vector<float>& payload) {
    EmbeddingVector v;
    v.values.assign(payload.begin(), payload.end());
    v.normalized = true;  // cached vectors were normalized before storage
    return v;
}

}  // namespace

std::string image_cache_key(const EmbeddingBackend& backend, const ImageTensor& image) {
    std::string bytes = backend.identifier();
    bytes += "|image|";
    bytes += std::to_string(image.height) + "x" + std::to_string(image.width) + "x" +
             std::to_string(image.channels) + "|";
    const size_t head = bytes.size();
    bytes.resize(head + image.data.size() * sizeof(double));
    std::memcpy(bytes.data() + head, image.data.data(), image.data.size() * sizeof(double));
    return sha256_hex(bytes);
}

std::string text_cache_key(const EmbeddingBackend& backend, const std::string& text) {
    return sha256_hex(backend.identifier() + "|text|" + text);
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

void EmbeddingCache::load() {
    entries_.clear();
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // no cache yet

    bool corrupt_tail = false;
    while (true) {
        char magic[4];
        if (!in.read(magic, 4)) break;  // clean EOF
        if (std::memcmp(magic, kMagic, 4) != 0) {
            corrupt_tail = true;
            break;
        }
        std::string digest(kDigestLen, '\0');
        uint32_t dim = 0;
        if (!in.read(digest.data(), kDigestLen) || !read_u32le(in, dim) || dim == 0 ||
            dim > (1u << 20)) {
            corrupt_tail = true;
            break;
        }
        std::vector<float> payload(dim);
        if (!in.read(reinterpret_cast<char*>(payload.data()), dim * sizeof(float))) {
            corrupt_tail = true;
            break;
        }
        uint32_t trailer = 0;
        if (!read_u32le(in, trailer) || trailer != dim) {
            corrupt_tail = true;
            break;
        }
        entries_[digest] = std::move(payload);
    }
    in.close();
    if (corrupt_tail) rewrite_all();  // keep the valid prefix, drop the damage
}

void EmbeddingCache::rewrite_all() {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoFailure, "cannot rewrite cache file: " + path_.string());
    for (const auto& [digest, payload] : entries_) {
        std::string rec;
        rec.append(kMagic, 4);
        rec += digest;
        put_u32le(rec, static_cast<uint32_t>(payload.size()));
        for (float f : payload) put_f32le(rec, f);
        put_u32le(rec, static_cast<uint32_t>(payload.size()));
        out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    }
}

void EmbeddingCache::append_record(const std::string& hex_key, const std::vector<float>& payload) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) raise(ErrorCode::IoFailure, "cannot append to cache file: " + path_.string());
    std::string rec;
    rec.append(kMagic, 4);
    rec += hex_key;
    put_u32le(rec, static_cast<uint32_t>(payload.size()));
    for (float f : payload) put_f32le(rec, f);
    put_u32le(rec, static_cast<uint32_t>(payload.size()));
    out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    out.flush();
}

EmbeddingVector EmbeddingCache::get_or_compute(const std::string& hex_key,
                                               const std::function<EmbeddingVector()>& compute) {
    if (hex_key.size() != kDigestLen) {
        raise(ErrorCode::CacheCorrupt, "cache key must be a 64-char hex digest");
    }
    {
        std::shared_lock<std::shared_mutex> lock(mutex_);
        auto it = entries_.find(hex_key);
        if (it != entries_.end()) return from_f32(it->second);
    }
    EmbeddingVector fresh = compute();
    std::vector<float> payload = to_f32(fresh);
    {
        std::unique_lock<std::shared_mutex> lock(mutex_);
        auto [it, inserted] = entries_.emplace(hex_key, payload);
        if (inserted) append_record(hex_key, payload);
        return from_f32(it->second);
    }
}

bool EmbeddingCache::contains(const std::string& hex_key) const {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    return entries_.count(hex_key) != 0;
}

size_t EmbeddingCache::size() const {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    return entries_.size();
}

}  // namespace varigen::embedding
