#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "varigen/image.hpp"
#include "varigen/rng.hpp"

namespace varigen::vq {

enum class SamplingMode { Mean, MeanPlusSigma, MeanPlusSigmaEps };

SamplingMode parse_sampling_mode(const std::string& name);
const char* sampling_mode_name(SamplingMode mode);

struct GeneratorConfig {
    int K = 64;             // codebook size
    int latent_dim = 16;    // channels per latent position
    int grid = 8;           // latent grid side; positions = grid*grid
    double lambda = 1.0;    // weight of the VQ term in the total loss
    double beta = 0.25;     // commitment weight
    double learning_rate = 0.05;
    uint64_t seed = 0;
    SamplingMode sampling_mode = SamplingMode::MeanPlusSigmaEps;
    int resolution = 64;    // input/output image side; must equal grid * 8
    int hidden1 = 8;        // conv channel widths of the 3-level encoder/decoder
    int hidden2 = 16;
    bool scalar_variance_per_patch = false;  // one variance scalar per position
    bool stats_post_quantization = true;     // statistics over quantized grids

    void validate() const;
};

struct Codebook {
    int size = 0;
    int dim = 0;
    std::vector<double> values;  // size × dim, row-major

    double* row(int k) { return values.data() + static_cast<size_t>(k) * dim; }
    const double* row(int k) const { return values.data() + static_cast<size_t>(k) * dim; }
};

/// D × C latent grid; positions are row-major over the spatial grid. When
/// indices are present each row is an exact copy of the codebook row it names.
struct LatentGrid {
    int positions = 0;
    int dim = 0;
    std::vector<double> values;  // positions × dim, row-major
    std::vector<int> indices;    // empty, or one codebook index per position

    bool has_indices() const { return !indices.empty(); }
    double* row(int d) { return values.data() + static_cast<size_t>(d) * dim; }
    const double* row(int d) const { return values.data() + static_cast<size_t>(d) * dim; }
};

struct VarianceGrid {
    int positions = 0;
    int dim = 0;
    std::vector<double> values;  // elementwise variances, all ≥ 0
};

/// Nearest-codebook assignment (L2), ties broken by the smallest index.
/// Output rows are bit-identical copies of the chosen codebook rows. In
/// training the backward pass treats this step as identity on the latents
/// (straight-through contract).
LatentGrid quantize(const LatentGrid& latents, const Codebook& codebook);

/// Elementwise mean and population variance (divide by N) over N same-shape
/// grids. N = 1 yields an all-zero variance. With scalar_per_patch the
/// per-position variance is the channel mean, broadcast back over channels.
std::pair<LatentGrid, VarianceGrid> estimate_statistics(const std::vector<LatentGrid>& grids,
                                                        bool scalar_per_patch = false);

/// Draw one latent grid: Mean → E; MeanPlusSigma → E + √Σ;
/// MeanPlusSigmaEps → E + √Σ ⊙ ε with ε i.i.d. standard normal.
LatentGrid sample_latents(const LatentGrid& mean, const VarianceGrid& variance, SamplingMode mode,
                          Rng& rng);

/// Mean over the generated images of the per-pixel MSE against the paired
/// original: a single original pairs with every generated image; with several
/// originals each generated image pairs with its nearest original by pixel
/// MSE (ties to the smallest index).
double mse_loss(const std::vector<ImageTensor>& originals,
                const std::vector<ImageTensor>& generated);

struct Tensor {
    std::vector<int> shape;
    std::vector<double> values;

    size_t size() const { return values.size(); }
};

struct TrainStepResult {
    double loss_total = 0.0;
    double loss_mse = 0.0;
    double loss_vq = 0.0;
};

struct ObjectiveEval {
    double loss_total = 0.0;
    double loss_mse = 0.0;
    double loss_vq = 0.0;
    std::map<std::string, std::vector<double>> gradients;  // keyed by parameter name
};

/// Variance-aware vector-quantized autoencoder: a 3-level strided conv
/// encoder to a grid × grid latent map, nearest-codebook quantization, and a
/// mirrored upsampling decoder. Sampling decodes latents drawn around the
/// batch statistics (E, Σ). Training minimizes
///   total = mse + lambda * (recon + codebook + beta * commitment)
/// with Adam over encoder, decoder and codebook parameters. Gradient
/// contracts: quantization is identity on the backward pass; the codebook
/// term moves only the codebook, the commitment term only the encoder; the
/// sampling offset (√Σ or √Σ⊙ε) is a constant of the step.
class VqGenerator {
public:
    VqGenerator(const GeneratorConfig& config, Rng& init_rng);

    const GeneratorConfig& config() const { return config_; }
    const Codebook& codebook() const { return codebook_; }

    /// Continuous (pre-quantization) latents of one image.
    LatentGrid encode(const ImageTensor& image) const;

    /// Image in [0,1] from a latent grid (indices, if any, are ignored).
    ImageTensor decode(const LatentGrid& latents) const;

    /// (E, Σ) over a batch under the current parameters, honoring the
    /// post-quantization and scalar-per-patch configuration.
    std::pair<LatentGrid, VarianceGrid> estimate_batch_statistics(
        const std::vector<ImageTensor>& batch) const;

    std::vector<ImageTensor> generate_set(const LatentGrid& mean, const VarianceGrid& variance,
                                          int count, SamplingMode mode, Rng& rng) const;

    /// Convenience: statistics over `batch`, then `count` sampled decodes.
    std::vector<ImageTensor> generate_from_batch(const std::vector<ImageTensor>& batch, int count,
                                                 Rng& rng) const;

    /// Value of the VQ objective (reconstruction MSE per image + codebook and
    /// commitment terms summed over positions, averaged over the batch).
    double vq_objective(const std::vector<ImageTensor>& batch) const;

    /// Loss value and analytic parameter gradients at the current point.
    /// generation_offsets holds `count` constant offset grids (flattened
    /// positions × dim) added to E before decoding; pass an empty list to
    /// evaluate the VQ part only.
    ObjectiveEval evaluate_objective(const std::vector<ImageTensor>& originals,
                                     const std::vector<ImageTensor>& augmented,
                                     const std::vector<std::vector<double>>& generation_offsets)
        const;

    /// One Adam step on all parameters. Draws the generation offsets for the
    /// configured sampling mode from `rng`, evaluates, and updates. Throws
    /// NonFiniteLoss if the total is not finite.
    TrainStepResult train_step(const std::vector<ImageTensor>& originals,
                               const std::vector<ImageTensor>& augmented, int generated_count,
                               Rng& rng);

    // --- parameter access (tests, checkpoints) ---
    std::vector<std::string> parameter_names() const;
    const Tensor& parameter(const std::string& name) const;
    void set_parameter(const std::string& name, std::vector<double> values);
    size_t parameter_count() const;
    std::vector<double> flat_parameters() const;
    void set_flat_parameters(const std::vector<double>& flat);

    // --- optimizer state (checkpoints) ---
    int64_t adam_step_count() const { return adam_t_; }
    const std::map<std::string, Tensor>& adam_m() const { return adam_m_; }
    const std::map<std::string, Tensor>& adam_v() const { return adam_v_; }
    void restore_optimizer(int64_t t, std::map<std::string, Tensor> m,
                           std::map<std::string, Tensor> v);

private:
    void init_parameters(Rng& rng);
    void sync_codebook_view();

    GeneratorConfig config_;
    std::map<std::string, Tensor> params_;
    Codebook codebook_;  // view copy of params_["codebook"]
    std::map<std::string, Tensor> adam_m_;
    std::map<std::string, Tensor> adam_v_;
    int64_t adam_t_ = 0;
};

/// Self-describing checkpoint: JSON header (config, seed, tensor directory,
/// optimizer step) + little-endian float32 payload.
void save_checkpoint(const VqGenerator& generator, const std::string& path);
VqGenerator load_checkpoint(const std::string& path);

}  // namespace varigen::vq
