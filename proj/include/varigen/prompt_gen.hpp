#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "varigen/embedding.hpp"
#include "varigen/lexicon.hpp"

namespace varigen::embedding {
class EmbeddingCache;
}

namespace varigen::prompt {

/// One candidate sentence, rendered verbatim as "a {object} with {status}".
struct PromptCandidate {
    std::string object_word;
    std::string status_word;
    std::string text;
    int index = 0;
};

struct KeywordExpansion {
    std::vector<std::string> words;
    bool fallback = false;  // object word missing from lexicon
};

/// Status-word expansion: relation priority synonyms, hypernyms, hyponyms,
/// part-whole; alphabetical within each; unique, lowercase, never the object
/// word itself; truncated to t_max. Missing headwords fall back to the
/// plural/singular variants of the object word, flagged.
KeywordExpansion expand_keywords(const std::string& object_word, const Lexicon& lexicon,
                                 int t_max);

std::vector<PromptCandidate> build_candidates(const std::string& object_word,
                                              const std::vector<std::string>& words);

std::string render_template(const std::string& object_word, const std::string& status_word);
std::string naive_prompt(const std::string& object_word);

enum class Comparator { Greater, Less };

/// Distance-based outlier filter: keep candidates whose L2 distance to the
/// image embedding satisfies the comparator against the threshold. Returns
/// candidate indices. Throws EmptyPositiveSet when nothing survives.
std::vector<int> filter_outliers(const std::vector<PromptCandidate>& candidates,
                                 const embedding::EmbeddingVector& image_embedding,
                                 const std::vector<embedding::EmbeddingVector>& text_embeddings,
                                 double threshold = 0.5,
                                 Comparator comparator = Comparator::Greater);

enum class Fallback { Error, Naive };
enum class SelectionMode { Exhaustive, Batched100 };

struct PromptSelection {
    std::vector<PromptCandidate> candidates;
    std::vector<int> positive_set;
    PromptCandidate best;
    double best_score = 0.0;
    PromptCandidate worst;  // diagnostic argmin
    double worst_score = 0.0;
    bool used_fallback = false;
};

struct SelectOptions {
    Fallback fallback = Fallback::Error;
    SelectionMode mode = SelectionMode::Exhaustive;
    uint64_t seed = 0;  // batched mode shuffle seed
};

/// Best prompt by cosine similarity over the positive set; ties broken by
/// smallest candidate index. positive_set may be empty only with
/// Fallback::Naive, which returns "a photo of a {object}" flagged.
PromptSelection select_best_prompt(const std::vector<PromptCandidate>& candidates,
                                   const std::vector<int>& positive_set,
                                   const embedding::EmbeddingVector& image_embedding,
                                   const std::vector<embedding::EmbeddingVector>& text_embeddings,
                                   const SelectOptions& options, const std::string& object_word,
                                   const embedding::EmbeddingBackend* backend_for_fallback);

enum class ImageEmbeddingMode { Single, Mean };

struct PromptRunOptions {
    int t_max = 1000;
    double threshold = 0.5;
    Comparator comparator = Comparator::Greater;
    Fallback fallback = Fallback::Error;
    SelectionMode mode = SelectionMode::Exhaustive;
    ImageEmbeddingMode image_embedding = ImageEmbeddingMode::Mean;
    uint64_t seed = 0;
};

/// Embedding of the original set used by Eq.-1-style selection: first image
/// (Single) or renormalized mean of per-image embeddings (Mean).
embedding::EmbeddingVector originals_embedding(const std::vector<ImageTensor>& originals,
                                               const embedding::EmbeddingBackend& backend,
                                               ImageEmbeddingMode mode,
                                               embedding::EmbeddingCache* cache = nullptr);

/// Full keyword-to-prompt stage: expand, render, embed, filter, select.
PromptSelection select_prompt_for_images(const std::string& object_word,
                                         const std::vector<ImageTensor>& originals,
                                         const Lexicon& lexicon,
                                         const embedding::EmbeddingBackend& backend,
                                         const PromptRunOptions& options,
                                         embedding::EmbeddingCache* cache = nullptr);

}  // namespace varigen::prompt
