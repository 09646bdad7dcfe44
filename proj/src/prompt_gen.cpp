#include "varigen/prompt_gen.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "varigen/embedding_cache.hpp"
#include "varigen/errors.hpp"
#include "varigen/rng.hpp"

namespace varigen::prompt {

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void append_unique(std::vector<std::string>& out, const std::vector<std::string>& words,
                   const std::string& exclude) {
    for (const auto& w : words) {
        if (w == exclude) continue;
        if (std::find(out.begin(), out.end(), w) == std::end(out)) out.push_back(w);
    }
}

std::vector<std::string> plural_singular_variants(const std::string& word) {
    std::vector<std::string> out;
    if (!word.empty() && word.back() == 's') {
        out.push_back(word.substr(0, word.size() - 1));  // crude singular
    } else {
        out.push_back(word + "s");
        if (!word.empty() && (word.back() == 'h' || word.back() == 'x')) out.push_back(word + "es");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

KeywordExpansion expand_keywords(const std::string& object_word, const Lexicon& lexicon,
                                 int t_max) {
    if (object_word.empty()) raise(ErrorCode::EmptyText, "object word is empty");
    if (t_max < 1) raise(ErrorCode::EmptyInput, "t_max must be at least 1");
    const std::string object = lowercase(object_word);

    KeywordExpansion result;
    if (!lexicon.contains(object)) {
        result.fallback = true;
        result.words = plural_singular_variants(object);
    } else {
        static const Relation kPriority[] = {Relation::Synonym, Relation::Hypernym,
                                             Relation::Hyponym, Relation::PartWhole};
        for (Relation rel : kPriority) {
            append_unique(result.words, lexicon.related(object, rel), object);
        }
    }
    if (static_cast<int>(result.words.size()) > t_max) result.words.resize(t_max);
    return result;
}

std::string render_template(const std::string& object_word, const std::string& status_word) {
    return "a " + object_word + " with " + status_word;
}

std::string naive_prompt(const std::string& object_word) {
    return "a photo of a " + object_word;
}

std::vector<PromptCandidate> build_candidates(const std::string& object_word,
                                              const std::vector<std::string>& words) {
    if (words.empty()) raise(ErrorCode::EmptyInput, "no status words to build candidates from");
    std::vector<PromptCandidate> out;
    out.reserve(words.size());
    for (size_t i = 0; i < words.size(); ++i) {
        const std::string& w = words[i];
        if (w.empty() || w.find('{') != std::string::npos || w.find('}') != std::string::npos) {
            raise(ErrorCode::EmptyText, "status word contains template braces or is empty: '" + w + "'");
        }
        out.push_back(PromptCandidate{object_word, w, render_template(object_word, w),
                                      static_cast<int>(i)});
    }
    return out;
}

std::vector<int> filter_outliers(const std::vector<PromptCandidate>& candidates,
                                 const embedding::EmbeddingVector& image_embedding,
                                 const std::vector<embedding::EmbeddingVector>& text_embeddings,
                                 double threshold, Comparator comparator) {
    if (threshold < 0.0 || threshold > 2.0) {
        raise(ErrorCode::ConfigError, "threshold must lie in [0, 2] for unit embeddings");
    }
    if (candidates.size() != text_embeddings.size()) {
        raise(ErrorCode::DimensionMismatch, "one text embedding per candidate required");
    }
    std::vector<int> kept;
    for (size_t j = 0; j < candidates.size(); ++j) {
        const double d = embedding::l2_distance(image_embedding, text_embeddings[j]);
        const bool pass = comparator == Comparator::Greater ? d > threshold : d < threshold;
        if (pass) kept.push_back(static_cast<int>(j));
    }
    if (kept.empty()) {
        raise(ErrorCode::EmptyPositiveSet, "no candidate satisfied the distance filter");
    }
    return kept;
}

namespace {

PromptSelection naive_fallback(const std::vector<PromptCandidate>& candidates,
                               const embedding::EmbeddingVector& image_embedding,
                               const std::string& object_word,
                               const embedding::EmbeddingBackend* backend) {
    PromptSelection sel;
    sel.candidates = candidates;
    sel.used_fallback = true;
    sel.best = PromptCandidate{object_word, "", naive_prompt(object_word), -1};
    if (backend != nullptr) {
        sel.best_score =
            embedding::cosine_similarity(image_embedding, backend->embed_text(sel.best.text));
    }
    sel.worst = sel.best;
    sel.worst_score = sel.best_score;
    return sel;
}

}  // namespace

PromptSelection select_best_prompt(const std::vector<PromptCandidate>& candidates,
                                   const std::vector<int>& positive_set,
                                   const embedding::EmbeddingVector& image_embedding,
                                   const std::vector<embedding::EmbeddingVector>& text_embeddings,
                                   const SelectOptions& options, const std::string& object_word,
                                   const embedding::EmbeddingBackend* backend_for_fallback) {
    if (positive_set.empty()) {
        if (options.fallback == Fallback::Error) {
            raise(ErrorCode::EmptyPositiveSet, "positive prompt set is empty");
        }
        return naive_fallback(candidates, image_embedding, object_word, backend_for_fallback);
    }
    if (candidates.size() != text_embeddings.size()) {
        raise(ErrorCode::DimensionMismatch, "one text embedding per candidate required");
    }

    std::vector<int> order = positive_set;
    if (options.mode == SelectionMode::Batched100) {
        // Historical variant: the positive set is shuffled and consumed in 100
        // deterministic batches with a running best. Full coverage, so the
        // result equals the exhaustive argmax.
        Rng rng(options.seed);
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(i) - 1))]);
        }
    }

    int best_idx = -1, worst_idx = -1;
    double best_score = 0.0, worst_score = 0.0;
    for (int j : order) {
        const double score = embedding::cosine_similarity(image_embedding, text_embeddings[j]);
        if (best_idx < 0 || score > best_score || (score == best_score && j < best_idx)) {
            best_idx = j;
            best_score = score;
        }
        if (worst_idx < 0 || score < worst_score || (score == worst_score && j < worst_idx)) {
            worst_idx = j;
            worst_score = score;
        }
    }

    PromptSelection sel;
    sel.candidates = candidates;
    sel.positive_set = positive_set;
    sel.best = candidates[best_idx];
    sel.best_score = best_score;
    sel.worst = candidates[worst_idx];
    sel.worst_score = worst_score;
    return sel;
}

embedding::EmbeddingVector originals_embedding(const std::vector<ImageTensor>& originals,
                                               const embedding::EmbeddingBackend& backend,
                                               ImageEmbeddingMode mode,
                                               embedding::EmbeddingCache* cache) {
    if (originals.empty()) raise(ErrorCode::EmptyImageSet, "no original images given");
    auto embed = [&](const ImageTensor& img) {
        if (cache != nullptr) {
            return cache->get_or_compute(embedding::image_cache_key(backend, img),
                                         [&] { return backend.embed_image(img); });
        }
        return backend.embed_image(img);
    };
    if (mode == ImageEmbeddingMode::Single) return embed(originals.front());

    std::vector<double> mean(static_cast<size_t>(backend.embed_dim()), 0.0);
    for (const auto& img : originals) {
        const auto e = embed(img);
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += e.values[i];
    }
    for (double& v : mean) v /= static_cast<double>(originals.size());
    return embedding::normalize(embedding::EmbeddingVector{std::move(mean), false});
}

PromptSelection select_prompt_for_images(const std::string& object_word,
                                         const std::vector<ImageTensor>& originals,
                                         const Lexicon& lexicon,
                                         const embedding::EmbeddingBackend& backend,
                                         const PromptRunOptions& options,
                                         embedding::EmbeddingCache* cache) {
    const auto expansion = expand_keywords(object_word, lexicon, options.t_max);
    const auto candidates = build_candidates(lowercase(object_word), expansion.words);

    std::vector<embedding::EmbeddingVector> text_embeddings;
    text_embeddings.reserve(candidates.size());
    for (const auto& cand : candidates) {
        if (cache != nullptr) {
            text_embeddings.push_back(
                cache->get_or_compute(embedding::text_cache_key(backend, cand.text),
                                      [&] { return backend.embed_text(cand.text); }));
        } else {
            text_embeddings.push_back(backend.embed_text(cand.text));
        }
    }

    const auto image_embedding =
        originals_embedding(originals, backend, options.image_embedding, cache);

    SelectOptions sel_opts{options.fallback, options.mode, options.seed};
    std::vector<int> positive;
    try {
        positive = filter_outliers(candidates, image_embedding, text_embeddings,
                                   options.threshold, options.comparator);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyPositiveSet || options.fallback == Fallback::Error) throw;
        // fall through with an empty positive set; selection applies the naive fallback
    }
    return select_best_prompt(candidates, positive, image_embedding, text_embeddings, sel_opts,
                              lowercase(object_word), &backend);
}

}  // namespace varigen::prompt
