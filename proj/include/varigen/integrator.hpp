#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varigen/embedding.hpp"
#include "varigen/prompt_gen.hpp"
#include "varigen/rng.hpp"
#include "varigen/vq_generator.hpp"

namespace varigen::integrator {

/// Renormalized mean of the per-image unit embeddings; a single image yields
/// its own embedding. Degenerate means (opposing embeddings) surface
/// ZeroVector from normalization.
embedding::EmbeddingVector visual_feature(const std::vector<ImageTensor>& images,
                                          const embedding::EmbeddingBackend& backend);

struct GenerationRound {
    int round_index = 0;  // 1-based
    std::vector<ImageTensor> images;  // cleared for non-best rounds in memory-lean mode
    embedding::EmbeddingVector visual_feature;  // empty when a stub scorer was used
    double score = 0.0;
    double generator_loss = 0.0;
    uint64_t seed_used = 0;
    std::vector<std::vector<std::string>> augment_ops;
};

struct RunResult {
    std::vector<GenerationRound> rounds;
    int alpha = 0;  // 1-based winning round (earliest among maximal scores)
    std::vector<ImageTensor> best_images;
    prompt::PromptSelection prompt;
    std::string config_digest;
    uint64_t seed = 0;
    int copies = 0;
};

/// Test seam: replaces the cosine-against-prompt scoring of one round's set.
using RoundScorer = std::function<double(int round_index, const std::vector<ImageTensor>& images)>;

struct RunOptions {
    int rounds = 20;          // L
    int copies = 30;          // M
    int augment_count = 8;    // N
    int steps_per_round = 1;
    std::string strategy = "random-pick";
    bool memory_lean = false;
    std::string config_digest;
    RoundScorer scorer;  // empty -> cosine(z_t, visual_feature)
};

/// L rounds of: augment originals, update the generator, generate a set of
/// copies, score it against the selected prompt's text embedding (computed
/// once per run). Returns the argmax round's images; rounds are strictly
/// sequential, earliest round wins ties.
RunResult run(const std::vector<ImageTensor>& originals, const prompt::PromptSelection& prompt_sel,
              vq::VqGenerator& generator, const embedding::EmbeddingBackend& backend,
              const RunOptions& options, Rng& rng);

/// Writes the winning images as lossless files plus a manifest holding the
/// prompt, per-round scores and seeds, alpha, and the config digest. Returns
/// the manifest path. Re-export of the same result is byte-identical.
std::filesystem::path export_best_set(const RunResult& result,
                                      const std::filesystem::path& out_dir);

}  // namespace varigen::integrator
