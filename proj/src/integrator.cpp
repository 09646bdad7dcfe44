#include "varigen/integrator.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "varigen/augment.hpp"
#include "varigen/digest.hpp"
#include "varigen/errors.hpp"
#include "varigen/png_io.hpp"

namespace varigen::integrator {

embedding::EmbeddingVector visual_feature(const std::vector<ImageTensor>& images,
                                          const embedding::EmbeddingBackend& backend) {
    if (images.empty()) raise(ErrorCode::EmptyImageSet, "visual_feature over an empty image set");
    std::vector<double> mean(static_cast<size_t>(backend.embed_dim()), 0.0);
    for (const auto& img : images) {
        const auto e = backend.embed_image(img);
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += e.values[i];
    }
    for (double& v : mean) v /= static_cast<double>(images.size());
    return embedding::normalize(embedding::EmbeddingVector{std::move(mean), false});
}

RunResult run(const std::vector<ImageTensor>& originals, const prompt::PromptSelection& prompt_sel,
              vq::VqGenerator& generator, const embedding::EmbeddingBackend& backend,
              const RunOptions& options, Rng& rng) {
    if (options.rounds < 1) raise(ErrorCode::EmptyInput, "at least one round required");
    if (options.copies < 1) raise(ErrorCode::EmptyInput, "at least one copy per round required");
    if (originals.empty()) raise(ErrorCode::EmptyImageSet, "no original images");

    // The prompt's text embedding is fixed once per run.
    embedding::EmbeddingVector z_t;
    if (!options.scorer) z_t = backend.embed_text(prompt_sel.best.text);

    RunResult result;
    result.prompt = prompt_sel;
    result.config_digest = options.config_digest;
    result.seed = rng.seed();
    result.copies = options.copies;
    result.rounds.reserve(options.rounds);

    int best_round = 0;
    double best_score = 0.0;
    for (int l = 1; l <= options.rounds; ++l) {
        Rng round_rng = rng.derive("round", static_cast<uint64_t>(l));

        Rng aug_rng = round_rng.derive("augment");
        data::AugmentationBatch batch =
            data::augment(originals, options.strategy, options.augment_count, aug_rng);

        GenerationRound round;
        round.round_index = l;
        round.augment_ops = batch.ops;

        for (int s = 0; s < options.steps_per_round; ++s) {
            Rng step_rng = round_rng.derive("train", static_cast<uint64_t>(s));
            const auto step =
                generator.train_step(originals, batch.images, options.copies, step_rng);
            round.generator_loss = step.loss_total;
        }

        // Generate under the updated parameters.
        Rng gen_rng = round_rng.derive("generate");
        round.seed_used = gen_rng.seed();
        auto [mean, variance] = generator.estimate_batch_statistics(batch.images);
        round.images = generator.generate_set(mean, variance, options.copies,
                                              generator.config().sampling_mode, gen_rng);

        if (options.scorer) {
            round.score = options.scorer(l, round.images);
        } else {
            round.visual_feature = visual_feature(round.images, backend);
            round.score = embedding::cosine_similarity(z_t, round.visual_feature);
        }

        const bool is_new_best = best_round == 0 || round.score > best_score;
        if (is_new_best) {
            best_round = l;
            best_score = round.score;
            result.best_images = round.images;
            if (options.memory_lean) {
                for (auto& r : result.rounds) r.images.clear();
            }
        } else if (options.memory_lean) {
            round.images.clear();
        }
        result.rounds.push_back(std::move(round));
    }

    result.alpha = best_round;
    if (!options.memory_lean) {
        result.best_images = result.rounds[static_cast<size_t>(result.alpha) - 1].images;
    }
    return result;
}

std::filesystem::path export_best_set(const RunResult& result,
                                      const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) {
        raise(ErrorCode::IoFailure, "cannot create export directory: " + out_dir.string());
    }

    char name[32];
    std::vector<std::string> files;
    for (size_t m = 0; m < result.best_images.size(); ++m) {
        std::snprintf(name, sizeof(name), "best_%03zu.png", m);
        data::write_image(out_dir / name, result.best_images[m]);
        files.push_back(name);
    }

    nlohmann::json manifest;
    manifest["run_id"] =
        sha256_hex(result.config_digest + "|" + std::to_string(result.seed) + "|" +
                   result.prompt.best.text)
            .substr(0, 16);
    manifest["config_digest"] = result.config_digest;
    manifest["seeds"] = {{"run", result.seed}};
    manifest["alpha"] = result.alpha;
    manifest["copies"] = result.copies;
    manifest["prompt"] = {{"text", result.prompt.best.text},
                          {"status_word", result.prompt.best.status_word},
                          {"object_word", result.prompt.best.object_word},
                          {"score", result.prompt.best_score},
                          {"worst_text", result.prompt.worst.text},
                          {"worst_score", result.prompt.worst_score},
                          {"fallback", result.prompt.used_fallback},
                          {"positive_set_size", result.prompt.positive_set.size()},
                          {"candidate_count", result.prompt.candidates.size()}};
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : result.rounds) {
        rounds.push_back({{"round", r.round_index},
                          {"loss", r.generator_loss},
                          {"score", r.score},
                          {"seed", r.seed_used},
                          {"augment_ops", r.augment_ops}});
    }
    manifest["rounds"] = rounds;
    manifest["files"] = files;

    const fs::path manifest_path = out_dir / "manifest.json";
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) raise(ErrorCode::IoFailure, "cannot write manifest: " + manifest_path.string());
    out << manifest.dump(2) << "\n";
    return manifest_path;
}

}  // namespace varigen::integrator
