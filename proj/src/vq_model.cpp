#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "varigen/errors.hpp"
#include "varigen/vq_generator.hpp"

namespace varigen::vq {

namespace {

constexpr int kInChannels = 3;

// Planar C×H×W working buffer for the conv stack.
struct Volume {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;

    Volume() = default;
    Volume(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, 0.0) {}

    double& at(int ci, int y, int x) { return v[(static_cast<size_t>(ci) * h + y) * w + x]; }
    double at(int ci, int y, int x) const { return v[(static_cast<size_t>(ci) * h + y) * w + x]; }
};

Volume image_to_volume(const ImageTensor& img) {
    Volume vol(img.channels, img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) vol.at(c, y, x) = img.at(y, x, c);
    return vol;
}

ImageTensor volume_to_image(const Volume& vol) {
    ImageTensor img(vol.h, vol.w, vol.c);
    for (int y = 0; y < vol.h; ++y)
        for (int x = 0; x < vol.w; ++x)
            for (int c = 0; c < vol.c; ++c) img.at(y, x, c) = vol.at(c, y, x);
    return img;
}

// 3×3 convolution, pad 1. Weight layout [out_c, in_c, 3, 3].
Volume conv3x3_forward(const Volume& in, const Tensor& weight, const Tensor& bias, int stride) {
    const int out_c = weight.shape[0];
    const int in_c = weight.shape[1];
    const int out_h = (in.h + 2 - 3) / stride + 1;
    const int out_w = (in.w + 2 - 3) / stride + 1;
    Volume out(out_c, out_h, out_w);
    for (int oc = 0; oc < out_c; ++oc) {
        for (int oy = 0; oy < out_h; ++oy) {
            for (int ox = 0; ox < out_w; ++ox) {
                double acc = bias.values[oc];
                for (int ic = 0; ic < in_c; ++ic) {
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = oy * stride + ky - 1;
                        if (iy < 0 || iy >= in.h) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = ox * stride + kx - 1;
                            if (ix < 0 || ix >= in.w) continue;
                            acc += weight.values[((static_cast<size_t>(oc) * in_c + ic) * 3 + ky) * 3 + kx] *
                                   in.at(ic, iy, ix);
                        }
                    }
                }
                out.at(oc, oy, ox) = acc;
            }
        }
    }
    return out;
}

void conv3x3_backward(const Volume& in, const Tensor& weight, int stride, const Volume& gout,
                      Volume& gin, std::vector<double>& gweight, std::vector<double>& gbias) {
    const int out_c = weight.shape[0];
    const int in_c = weight.shape[1];
    gin = Volume(in.c, in.h, in.w);
    for (int oc = 0; oc < out_c; ++oc) {
        for (int oy = 0; oy < gout.h; ++oy) {
            for (int ox = 0; ox < gout.w; ++ox) {
                const double g = gout.at(oc, oy, ox);
                if (g == 0.0) continue;
                gbias[oc] += g;
                for (int ic = 0; ic < in_c; ++ic) {
                    for (int ky = 0; ky < 3; ++ky) {
                        const int iy = oy * stride + ky - 1;
                        if (iy < 0 || iy >= in.h) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int ix = ox * stride + kx - 1;
                            if (ix < 0 || ix >= in.w) continue;
                            const size_t wi = ((static_cast<size_t>(oc) * in_c + ic) * 3 + ky) * 3 + kx;
                            gweight[wi] += in.at(ic, iy, ix) * g;
                            gin.at(ic, iy, ix) += weight.values[wi] * g;
                        }
                    }
                }
            }
        }
    }
}

Volume tanh_forward(const Volume& in) {
    Volume out(in.c, in.h, in.w);
    for (size_t i = 0; i < in.v.size(); ++i) out.v[i] = std::tanh(in.v[i]);
    return out;
}

Volume tanh_backward(const Volume& out, const Volume& gout) {
    Volume gin(out.c, out.h, out.w);
    for (size_t i = 0; i < out.v.size(); ++i) gin.v[i] = gout.v[i] * (1.0 - out.v[i] * out.v[i]);
    return gin;
}

Volume sigmoid_forward(const Volume& in) {
    Volume out(in.c, in.h, in.w);
    for (size_t i = 0; i < in.v.size(); ++i) out.v[i] = 1.0 / (1.0 + std::exp(-in.v[i]));
    return out;
}

Volume sigmoid_backward(const Volume& out, const Volume& gout) {
    Volume gin(out.c, out.h, out.w);
    for (size_t i = 0; i < out.v.size(); ++i) gin.v[i] = gout.v[i] * out.v[i] * (1.0 - out.v[i]);
    return gin;
}

Volume upsample2_forward(const Volume& in) {
    Volume out(in.c, in.h * 2, in.w * 2);
    for (int c = 0; c < in.c; ++c)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x) out.at(c, y, x) = in.at(c, y / 2, x / 2);
    return out;
}

Volume upsample2_backward(const Volume& gout) {
    Volume gin(gout.c, gout.h / 2, gout.w / 2);
    for (int c = 0; c < gout.c; ++c)
        for (int y = 0; y < gout.h; ++y)
            for (int x = 0; x < gout.w; ++x) gin.at(c, y / 2, x / 2) += gout.at(c, y, x);
    return gin;
}

}  // namespace

// ---------------------------------------------------------------------------

VqGenerator::VqGenerator(const GeneratorConfig& config, Rng& init_rng) : config_(config) {
    config_.validate();
    init_parameters(init_rng);
}

void VqGenerator::init_parameters(Rng& rng) {
    auto add = [&](const std::string& name, std::vector<int> shape, double scale) {
        Tensor t;
        t.shape = std::move(shape);
        size_t n = 1;
        for (int s : t.shape) n *= static_cast<size_t>(s);
        t.values.resize(n);
        for (double& v : t.values) v = scale == 0.0 ? 0.0 : rng.normal() * scale;
        params_[name] = std::move(t);
    };
    auto conv_scale = [](int in_c) { return 1.0 / std::sqrt(static_cast<double>(in_c) * 9.0); };

    const int h1 = config_.hidden1, h2 = config_.hidden2, cl = config_.latent_dim;
    add("encoder.conv1.weight", {h1, kInChannels, 3, 3}, conv_scale(kInChannels));
    add("encoder.conv1.bias", {h1}, 0.0);
    add("encoder.conv2.weight", {h2, h1, 3, 3}, conv_scale(h1));
    add("encoder.conv2.bias", {h2}, 0.0);
    add("encoder.conv3.weight", {cl, h2, 3, 3}, conv_scale(h2));
    add("encoder.conv3.bias", {cl}, 0.0);
    add("decoder.conv1.weight", {h2, cl, 3, 3}, conv_scale(cl));
    add("decoder.conv1.bias", {h2}, 0.0);
    add("decoder.conv2.weight", {h1, h2, 3, 3}, conv_scale(h2));
    add("decoder.conv2.bias", {h1}, 0.0);
    add("decoder.conv3.weight", {kInChannels, h1, 3, 3}, conv_scale(h1));
    add("decoder.conv3.bias", {kInChannels}, 0.0);
    add("codebook", {config_.K, cl}, 0.5);

    // Redraw any duplicated codebook row; rows must be distinct at init.
    auto& cb = params_["codebook"].values;
    for (int k = 1; k < config_.K; ++k) {
        bool dup = true;
        while (dup) {
            dup = false;
            for (int j = 0; j < k && !dup; ++j) {
                dup = std::equal(cb.begin() + static_cast<size_t>(k) * cl,
                                 cb.begin() + static_cast<size_t>(k + 1) * cl,
                                 cb.begin() + static_cast<size_t>(j) * cl);
            }
            if (dup) {
                for (int c = 0; c < cl; ++c) cb[static_cast<size_t>(k) * cl + c] = rng.normal() * 0.5;
            }
        }
    }

    for (const auto& [name, t] : params_) {
        Tensor zero;
        zero.shape = t.shape;
        zero.values.assign(t.values.size(), 0.0);
        adam_m_[name] = zero;
        adam_v_[name] = std::move(zero);
    }
    sync_codebook_view();
}

void VqGenerator::sync_codebook_view() {
    const Tensor& cb = params_.at("codebook");
    codebook_.size = cb.shape[0];
    codebook_.dim = cb.shape[1];
    codebook_.values = cb.values;
}

// --- forward traces --------------------------------------------------------

namespace {

struct EncTrace {
    Volume x, a1, t1, a2, t2, z;
};

struct DecTrace {
    Volume zin, u1, a1, t1, u2, a2, t2, u3, a3, out;
};

}  // namespace

struct VqGeneratorDetail {
    static EncTrace encode_trace(const VqGenerator& g, const std::map<std::string, Tensor>& p,
                                 const ImageTensor& image) {
        const auto& cfg = g.config();
        if (image.height != cfg.resolution || image.width != cfg.resolution ||
            image.channels != kInChannels) {
            raise(ErrorCode::ShapeMismatch,
                  "encoder expects " + std::to_string(cfg.resolution) + "x" +
                      std::to_string(cfg.resolution) + "x3 input, got " +
                      std::to_string(image.height) + "x" + std::to_string(image.width) + "x" +
                      std::to_string(image.channels));
        }
        EncTrace tr;
        tr.x = image_to_volume(image);
        tr.a1 = conv3x3_forward(tr.x, p.at("encoder.conv1.weight"), p.at("encoder.conv1.bias"), 2);
        tr.t1 = tanh_forward(tr.a1);
        tr.a2 = conv3x3_forward(tr.t1, p.at("encoder.conv2.weight"), p.at("encoder.conv2.bias"), 2);
        tr.t2 = tanh_forward(tr.a2);
        tr.z = conv3x3_forward(tr.t2, p.at("encoder.conv3.weight"), p.at("encoder.conv3.bias"), 2);
        return tr;
    }

    static DecTrace decode_trace(const VqGenerator& g, const std::map<std::string, Tensor>& p,
                                 const LatentGrid& latents) {
        const auto& cfg = g.config();
        if (latents.positions != cfg.grid * cfg.grid || latents.dim != cfg.latent_dim) {
            raise(ErrorCode::ShapeMismatch,
                  "decoder expects a " + std::to_string(cfg.grid) + "x" + std::to_string(cfg.grid) +
                      " grid of " + std::to_string(cfg.latent_dim) + "-dim latents");
        }
        DecTrace tr;
        tr.zin = Volume(cfg.latent_dim, cfg.grid, cfg.grid);
        for (int gy = 0; gy < cfg.grid; ++gy)
            for (int gx = 0; gx < cfg.grid; ++gx)
                for (int c = 0; c < cfg.latent_dim; ++c)
                    tr.zin.at(c, gy, gx) = latents.values[(static_cast<size_t>(gy) * cfg.grid + gx) *
                                                              cfg.latent_dim + c];
        tr.u1 = upsample2_forward(tr.zin);
        tr.a1 = conv3x3_forward(tr.u1, p.at("decoder.conv1.weight"), p.at("decoder.conv1.bias"), 1);
        tr.t1 = tanh_forward(tr.a1);
        tr.u2 = upsample2_forward(tr.t1);
        tr.a2 = conv3x3_forward(tr.u2, p.at("decoder.conv2.weight"), p.at("decoder.conv2.bias"), 1);
        tr.t2 = tanh_forward(tr.a2);
        tr.u3 = upsample2_forward(tr.t2);
        tr.a3 = conv3x3_forward(tr.u3, p.at("decoder.conv3.weight"), p.at("decoder.conv3.bias"), 1);
        tr.out = sigmoid_forward(tr.a3);
        return tr;
    }

    static LatentGrid volume_to_grid(const Volume& vol) {
        LatentGrid grid;
        grid.positions = vol.h * vol.w;
        grid.dim = vol.c;
        grid.values.resize(static_cast<size_t>(grid.positions) * grid.dim);
        for (int gy = 0; gy < vol.h; ++gy)
            for (int gx = 0; gx < vol.w; ++gx)
                for (int c = 0; c < vol.c; ++c)
                    grid.values[(static_cast<size_t>(gy) * vol.w + gx) * vol.c + c] =
                        vol.at(c, gy, gx);
        return grid;
    }

    static void decode_backward(const std::map<std::string, Tensor>& p, const DecTrace& tr,
                                const Volume& gout_image,
                                std::map<std::string, std::vector<double>>& grads,
                                std::vector<double>& glatents /* positions×dim */) {
        Volume g = sigmoid_backward(tr.out, gout_image);
        Volume gu3;
        conv3x3_backward(tr.u3, p.at("decoder.conv3.weight"), 1, g, gu3,
                         grads["decoder.conv3.weight"], grads["decoder.conv3.bias"]);
        Volume gt2 = upsample2_backward(gu3);
        Volume ga2 = tanh_backward(tr.t2, gt2);
        Volume gu2;
        conv3x3_backward(tr.u2, p.at("decoder.conv2.weight"), 1, ga2, gu2,
                         grads["decoder.conv2.weight"], grads["decoder.conv2.bias"]);
        Volume gt1 = upsample2_backward(gu2);
        Volume ga1 = tanh_backward(tr.t1, gt1);
        Volume gu1;
        conv3x3_backward(tr.u1, p.at("decoder.conv1.weight"), 1, ga1, gu1,
                         grads["decoder.conv1.weight"], grads["decoder.conv1.bias"]);
        Volume gz = upsample2_backward(gu1);
        for (int gy = 0; gy < gz.h; ++gy)
            for (int gx = 0; gx < gz.w; ++gx)
                for (int c = 0; c < gz.c; ++c)
                    glatents[(static_cast<size_t>(gy) * gz.w + gx) * gz.c + c] +=
                        gz.at(c, gy, gx);
    }

    static void encode_backward(const std::map<std::string, Tensor>& p, const EncTrace& tr,
                                const std::vector<double>& glatents,
                                std::map<std::string, std::vector<double>>& grads) {
        Volume gz(tr.z.c, tr.z.h, tr.z.w);
        for (int gy = 0; gy < gz.h; ++gy)
            for (int gx = 0; gx < gz.w; ++gx)
                for (int c = 0; c < gz.c; ++c)
                    gz.at(c, gy, gx) =
                        glatents[(static_cast<size_t>(gy) * gz.w + gx) * gz.c + c];
        Volume gt2;
        conv3x3_backward(tr.t2, p.at("encoder.conv3.weight"), 2, gz, gt2,
                         grads["encoder.conv3.weight"], grads["encoder.conv3.bias"]);
        Volume ga2 = tanh_backward(tr.t2, gt2);
        Volume gt1;
        conv3x3_backward(tr.t1, p.at("encoder.conv2.weight"), 2, ga2, gt1,
                         grads["encoder.conv2.weight"], grads["encoder.conv2.bias"]);
        Volume ga1 = tanh_backward(tr.t1, gt1);
        Volume gx;
        conv3x3_backward(tr.x, p.at("encoder.conv1.weight"), 2, ga1, gx,
                         grads["encoder.conv1.weight"], grads["encoder.conv1.bias"]);
    }
};

LatentGrid VqGenerator::encode(const ImageTensor& image) const {
    EncTrace tr = VqGeneratorDetail::encode_trace(*this, params_, image);
    return VqGeneratorDetail::volume_to_grid(tr.z);
}

ImageTensor VqGenerator::decode(const LatentGrid& latents) const {
    DecTrace tr = VqGeneratorDetail::decode_trace(*this, params_, latents);
    ImageTensor img = volume_to_image(tr.out);
    img.clamp01();
    return img;
}

std::pair<LatentGrid, VarianceGrid> VqGenerator::estimate_batch_statistics(
    const std::vector<ImageTensor>& batch) const {
    if (batch.empty()) raise(ErrorCode::EmptyInput, "no images to estimate statistics from");
    std::vector<LatentGrid> grids;
    grids.reserve(batch.size());
    for (const auto& img : batch) {
        LatentGrid z = encode(img);
        grids.push_back(config_.stats_post_quantization ? quantize(z, codebook_) : std::move(z));
    }
    return estimate_statistics(grids, config_.scalar_variance_per_patch);
}

std::vector<ImageTensor> VqGenerator::generate_set(const LatentGrid& mean,
                                                   const VarianceGrid& variance, int count,
                                                   SamplingMode mode, Rng& rng) const {
    if (count < 1) raise(ErrorCode::EmptyInput, "generated count must be at least 1");
    std::vector<ImageTensor> out;
    out.reserve(count);
    for (int m = 0; m < count; ++m) {
        out.push_back(decode(sample_latents(mean, variance, mode, rng)));
    }
    return out;
}

std::vector<ImageTensor> VqGenerator::generate_from_batch(const std::vector<ImageTensor>& batch,
                                                          int count, Rng& rng) const {
    auto [mean, variance] = estimate_batch_statistics(batch);
    return generate_set(mean, variance, count, config_.sampling_mode, rng);
}

// --- objective and training ------------------------------------------------

ObjectiveEval VqGenerator::evaluate_objective(
    const std::vector<ImageTensor>& originals, const std::vector<ImageTensor>& augmented,
    const std::vector<std::vector<double>>& generation_offsets) const {
    if (augmented.empty()) raise(ErrorCode::EmptyInput, "augmented batch is empty");
    if (!generation_offsets.empty() && originals.empty()) {
        raise(ErrorCode::EmptyInput, "generation requires at least one original");
    }
    const int n = static_cast<int>(augmented.size());
    const int m_count = static_cast<int>(generation_offsets.size());
    const size_t grid_len = static_cast<size_t>(config_.grid) * config_.grid * config_.latent_dim;
    const double pixels = static_cast<double>(config_.resolution) * config_.resolution * kInChannels;

    ObjectiveEval eval;
    for (const auto& [name, t] : params_) {
        eval.gradients[name].assign(t.values.size(), 0.0);
    }

    // Encode + quantize the batch.
    std::vector<EncTrace> enc_traces;
    std::vector<LatentGrid> z_grids, zq_grids;
    enc_traces.reserve(n);
    for (const auto& img : augmented) {
        enc_traces.push_back(VqGeneratorDetail::encode_trace(*this, params_, img));
        z_grids.push_back(VqGeneratorDetail::volume_to_grid(enc_traces.back().z));
        zq_grids.push_back(quantize(z_grids.back(), codebook_));
    }
    const std::vector<LatentGrid>& stats_grids = config_.stats_post_quantization ? zq_grids : z_grids;
    auto [stats_mean, stats_var] = estimate_statistics(stats_grids, config_.scalar_variance_per_patch);
    (void)stats_var;  // offsets carry the variance contribution

    std::vector<std::vector<double>> glatents(n, std::vector<double>(grid_len, 0.0));
    std::vector<double> g_mean(grid_len, 0.0);

    // Generation path: decode E + offset_m, pair with the nearest original.
    double loss_mse = 0.0;
    for (int m = 0; m < m_count; ++m) {
        if (generation_offsets[m].size() != grid_len) {
            raise(ErrorCode::ShapeMismatch, "generation offset has the wrong length");
        }
        LatentGrid sample;
        sample.positions = stats_mean.positions;
        sample.dim = stats_mean.dim;
        sample.values.resize(grid_len);
        for (size_t i = 0; i < grid_len; ++i) {
            sample.values[i] = stats_mean.values[i] + generation_offsets[m][i];
        }
        DecTrace dtr = VqGeneratorDetail::decode_trace(*this, params_, sample);
        ImageTensor gen = volume_to_image(dtr.out);

        int best_o = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t o = 0; o < originals.size(); ++o) {
            const double err = mean_squared_error(originals[o], gen);
            if (err < best) {
                best = err;
                best_o = static_cast<int>(o);
            }
        }
        loss_mse += best;

        Volume gimg(dtr.out.c, dtr.out.h, dtr.out.w);
        const Volume orig_vol = image_to_volume(originals[best_o]);
        const double scale = 2.0 / (m_count * pixels);
        for (size_t i = 0; i < gimg.v.size(); ++i) {
            gimg.v[i] = scale * (dtr.out.v[i] - orig_vol.v[i]);
        }
        VqGeneratorDetail::decode_backward(params_, dtr, gimg, eval.gradients, g_mean);
    }
    if (m_count > 0) loss_mse /= m_count;

    // Mean statistics distribute their gradient evenly over the batch.
    if (m_count > 0) {
        for (int i = 0; i < n; ++i) {
            for (size_t j = 0; j < grid_len; ++j) glatents[i][j] += g_mean[j] / n;
        }
    }

    // Reconstruction + codebook + commitment terms.
    double loss_rec = 0.0, dist_sq_total = 0.0;
    auto& g_codebook = eval.gradients["codebook"];
    for (int i = 0; i < n; ++i) {
        DecTrace rtr = VqGeneratorDetail::decode_trace(*this, params_, zq_grids[i]);
        ImageTensor recon = volume_to_image(rtr.out);
        loss_rec += mean_squared_error(augmented[i], recon);

        Volume gimg(rtr.out.c, rtr.out.h, rtr.out.w);
        const Volume aug_vol = image_to_volume(augmented[i]);
        const double scale = config_.lambda * 2.0 / (n * pixels);
        for (size_t j = 0; j < gimg.v.size(); ++j) {
            gimg.v[j] = scale * (rtr.out.v[j] - aug_vol.v[j]);
        }
        VqGeneratorDetail::decode_backward(params_, rtr, gimg, eval.gradients, glatents[i]);

        for (int d = 0; d < zq_grids[i].positions; ++d) {
            const int k = zq_grids[i].indices[d];
            const double* z = z_grids[i].row(d);
            const double* e = codebook_.row(k);
            for (int c = 0; c < config_.latent_dim; ++c) {
                const double diff = z[c] - e[c];
                dist_sq_total += diff * diff;
                // codebook term pulls the code toward the (stop-gradient) latent
                g_codebook[static_cast<size_t>(k) * config_.latent_dim + c] +=
                    config_.lambda * 2.0 * (e[c] - z[c]) / n;
                // commitment term pulls the latent toward the (stop-gradient) code
                glatents[i][static_cast<size_t>(d) * config_.latent_dim + c] +=
                    config_.lambda * config_.beta * 2.0 * diff / n;
            }
        }
    }
    loss_rec /= n;
    const double loss_code = dist_sq_total / n;

    for (int i = 0; i < n; ++i) {
        VqGeneratorDetail::encode_backward(params_, enc_traces[i], glatents[i], eval.gradients);
    }

    eval.loss_mse = loss_mse;
    eval.loss_vq = loss_rec + loss_code + config_.beta * loss_code;
    eval.loss_total = loss_mse + config_.lambda * eval.loss_vq;
    return eval;
}

double VqGenerator::vq_objective(const std::vector<ImageTensor>& batch) const {
    const auto eval = evaluate_objective({}, batch, {});
    return eval.loss_vq;
}

TrainStepResult VqGenerator::train_step(const std::vector<ImageTensor>& originals,
                                        const std::vector<ImageTensor>& augmented,
                                        int generated_count, Rng& rng) {
    if (generated_count < 1) raise(ErrorCode::EmptyInput, "generated count must be at least 1");
    if (originals.empty()) raise(ErrorCode::EmptyInput, "train_step: no originals");

    auto [stats_mean, stats_var] = estimate_batch_statistics(augmented);
    (void)stats_mean;
    std::vector<std::vector<double>> offsets(static_cast<size_t>(generated_count),
                                             std::vector<double>(stats_var.values.size(), 0.0));
    switch (config_.sampling_mode) {
        case SamplingMode::Mean:
            break;
        case SamplingMode::MeanPlusSigma:
            for (auto& off : offsets) {
                for (size_t i = 0; i < off.size(); ++i) off[i] = std::sqrt(stats_var.values[i]);
            }
            break;
        case SamplingMode::MeanPlusSigmaEps:
            for (auto& off : offsets) {
                for (size_t i = 0; i < off.size(); ++i) {
                    off[i] = std::sqrt(stats_var.values[i]) * rng.normal();
                }
            }
            break;
    }

    const ObjectiveEval eval = evaluate_objective(originals, augmented, offsets);
    if (!std::isfinite(eval.loss_total)) {
        raise(ErrorCode::NonFiniteLoss,
              "total loss is not finite (mse=" + std::to_string(eval.loss_mse) +
                  ", vq=" + std::to_string(eval.loss_vq) + ")");
    }

    ++adam_t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
    for (auto& [name, t] : params_) {
        const auto& g = eval.gradients.at(name);
        auto& m = adam_m_[name].values;
        auto& v = adam_v_[name].values;
        for (size_t i = 0; i < t.values.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            t.values[i] -= config_.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }
    }
    sync_codebook_view();

    return TrainStepResult{eval.loss_total, eval.loss_mse, eval.loss_vq};
}

// --- parameter access ------------------------------------------------------

std::vector<std::string> VqGenerator::parameter_names() const {
    std::vector<std::string> names;
    names.reserve(params_.size());
    for (const auto& [name, t] : params_) names.push_back(name);
    return names;
}

const Tensor& VqGenerator::parameter(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) raise(ErrorCode::ConfigError, "unknown parameter: " + name);
    return it->second;
}

void VqGenerator::set_parameter(const std::string& name, std::vector<double> values) {
    auto it = params_.find(name);
    if (it == params_.end()) raise(ErrorCode::ConfigError, "unknown parameter: " + name);
    if (values.size() != it->second.values.size()) {
        raise(ErrorCode::ShapeMismatch, "parameter size mismatch for " + name);
    }
    it->second.values = std::move(values);
    if (name == "codebook") sync_codebook_view();
}

size_t VqGenerator::parameter_count() const {
    size_t n = 0;
    for (const auto& [name, t] : params_) n += t.values.size();
    return n;
}

std::vector<double> VqGenerator::flat_parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& [name, t] : params_) {
        flat.insert(flat.end(), t.values.begin(), t.values.end());
    }
    return flat;
}

void VqGenerator::set_flat_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) {
        raise(ErrorCode::ShapeMismatch, "flat parameter vector has the wrong length");
    }
    size_t off = 0;
    for (auto& [name, t] : params_) {
        std::copy(flat.begin() + off, flat.begin() + off + t.values.size(), t.values.begin());
        off += t.values.size();
    }
    sync_codebook_view();
}

void VqGenerator::restore_optimizer(int64_t t, std::map<std::string, Tensor> m,
                                    std::map<std::string, Tensor> v) {
    adam_t_ = t;
    adam_m_ = std::move(m);
    adam_v_ = std::move(v);
}

}  // namespace varigen::vq
