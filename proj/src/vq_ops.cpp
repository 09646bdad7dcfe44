#include <algorithm>
#include <cmath>
#include <limits>

#include "varigen/errors.hpp"
#include "varigen/vq_generator.hpp"

namespace varigen::vq {

SamplingMode parse_sampling_mode(const std::string& name) {
    if (name == "mean") return SamplingMode::Mean;
    if (name == "mean_plus_sigma") return SamplingMode::MeanPlusSigma;
    if (name == "mean_plus_sigma_eps") return SamplingMode::MeanPlusSigmaEps;
    raise(ErrorCode::ConfigError, "unknown sampling mode: " + name);
}

const char* sampling_mode_name(SamplingMode mode) {
    switch (mode) {
        case SamplingMode::Mean: return "mean";
        case SamplingMode::MeanPlusSigma: return "mean_plus_sigma";
        case SamplingMode::MeanPlusSigmaEps: return "mean_plus_sigma_eps";
    }
    return "?";
}

void GeneratorConfig::validate() const {
    if (K < 2) raise(ErrorCode::ConfigError, "generator.K must be at least 2");
    if (latent_dim < 1) raise(ErrorCode::ConfigError, "generator.latent_dim must be positive");
    if (grid < 1) raise(ErrorCode::ConfigError, "generator.grid must be positive");
    if (lambda < 0.0) raise(ErrorCode::ConfigError, "generator.lambda must be non-negative");
    if (beta < 0.0) raise(ErrorCode::ConfigError, "generator.beta must be non-negative");
    if (learning_rate < 0.0) raise(ErrorCode::ConfigError, "generator.lr must be non-negative");
    if (hidden1 < 1 || hidden2 < 1) raise(ErrorCode::ConfigError, "hidden widths must be positive");
    if (resolution != grid * 8) {
        raise(ErrorCode::ConfigError,
              "generator.resolution must equal generator.grid * 8 (three stride-2 levels); got " +
                  std::to_string(resolution) + " for grid " + std::to_string(grid));
    }
}

LatentGrid quantize(const LatentGrid& latents, const Codebook& codebook) {
    if (latents.dim != codebook.dim) {
        raise(ErrorCode::DimensionMismatch,
              "latent dim " + std::to_string(latents.dim) + " vs codebook dim " +
                  std::to_string(codebook.dim));
    }
    if (codebook.size < 1) raise(ErrorCode::DimensionMismatch, "empty codebook");

    LatentGrid out;
    out.positions = latents.positions;
    out.dim = latents.dim;
    out.values.resize(latents.values.size());
    out.indices.resize(latents.positions);
    for (int d = 0; d < latents.positions; ++d) {
        const double* z = latents.row(d);
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int k = 0; k < codebook.size; ++k) {
            const double* e = codebook.row(k);
            double dist = 0.0;
            for (int c = 0; c < latents.dim; ++c) {
                const double diff = z[c] - e[c];
                dist += diff * diff;
            }
            if (dist < best_dist) {  // strict: ties keep the smallest index
                best_dist = dist;
                best = k;
            }
        }
        out.indices[d] = best;
        std::copy(codebook.row(best), codebook.row(best) + latents.dim, out.row(d));
    }
    return out;
}

std::pair<LatentGrid, VarianceGrid> estimate_statistics(const std::vector<LatentGrid>& grids,
                                                        bool scalar_per_patch) {
    if (grids.empty()) raise(ErrorCode::EmptyInput, "no latent grids to aggregate");
    const int positions = grids[0].positions;
    const int dim = grids[0].dim;
    for (const auto& g : grids) {
        if (g.positions != positions || g.dim != dim) {
            raise(ErrorCode::ShapeMismatch, "latent grids must share one shape");
        }
    }
    const double n = static_cast<double>(grids.size());

    LatentGrid mean;
    mean.positions = positions;
    mean.dim = dim;
    mean.values.assign(static_cast<size_t>(positions) * dim, 0.0);
    for (const auto& g : grids) {
        for (size_t i = 0; i < mean.values.size(); ++i) mean.values[i] += g.values[i];
    }
    for (double& v : mean.values) v /= n;

    VarianceGrid var;
    var.positions = positions;
    var.dim = dim;
    var.values.assign(mean.values.size(), 0.0);
    if (grids.size() > 1) {
        for (const auto& g : grids) {
            for (size_t i = 0; i < var.values.size(); ++i) {
                const double d = g.values[i] - mean.values[i];
                var.values[i] += d * d;
            }
        }
        for (double& v : var.values) v /= n;  // population variance; N may be 1
    }
    if (scalar_per_patch) {
        for (int d = 0; d < positions; ++d) {
            double acc = 0.0;
            for (int c = 0; c < dim; ++c) acc += var.values[static_cast<size_t>(d) * dim + c];
            const double scalar = acc / dim;
            for (int c = 0; c < dim; ++c) var.values[static_cast<size_t>(d) * dim + c] = scalar;
        }
    }
    return {std::move(mean), std::move(var)};
}

LatentGrid sample_latents(const LatentGrid& mean, const VarianceGrid& variance, SamplingMode mode,
                          Rng& rng) {
    if (mean.positions != variance.positions || mean.dim != variance.dim) {
        raise(ErrorCode::ShapeMismatch, "mean and variance grids must share one shape");
    }
    for (double v : variance.values) {
        if (!(v >= 0.0)) raise(ErrorCode::NegativeVariance, "variance entry below zero");
    }
    LatentGrid out;
    out.positions = mean.positions;
    out.dim = mean.dim;
    out.values.resize(mean.values.size());
    switch (mode) {
        case SamplingMode::Mean:
            out.values = mean.values;
            break;
        case SamplingMode::MeanPlusSigma:
            for (size_t i = 0; i < out.values.size(); ++i) {
                out.values[i] = mean.values[i] + std::sqrt(variance.values[i]);
            }
            break;
        case SamplingMode::MeanPlusSigmaEps:
            for (size_t i = 0; i < out.values.size(); ++i) {
                out.values[i] = mean.values[i] + std::sqrt(variance.values[i]) * rng.normal();
            }
            break;
    }
    return out;
}

double mse_loss(const std::vector<ImageTensor>& originals,
                const std::vector<ImageTensor>& generated) {
    if (originals.empty()) raise(ErrorCode::EmptyInput, "mse_loss: no originals");
    if (generated.empty()) raise(ErrorCode::EmptyInput, "mse_loss: no generated images");
    double acc = 0.0;
    for (const auto& gen : generated) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& orig : originals) {
            best = std::min(best, mean_squared_error(orig, gen));
        }
        acc += best;
    }
    return acc / static_cast<double>(generated.size());
}

}  // namespace varigen::vq
