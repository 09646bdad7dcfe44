#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "varigen/image.hpp"

namespace varigen::quality {

/// SSIM with an 11×11 Gaussian window (sigma 1.5), C1=(0.01)^2, C2=(0.03)^2
/// for L=1, valid-window positions only, averaged over channels.
double ssim(const ImageTensor& a, const ImageTensor& b);

/// 10·log10(1/MSE) in dB for L=1. MSE of zero maps to +infinity.
double psnr_from_mse(double mse);
double psnr(const ImageTensor& a, const ImageTensor& b);

struct QualityRow {
    std::string label;
    double ssim = 0.0;
    double psnr_db = 0.0;  // +infinity when the set reproduces the original exactly
    std::map<std::string, double> plugin_metrics;
};

/// Optional metrics that need external models (inception-score, perceptual
/// distances, fidelity measures) plug in here; the core never computes them.
struct QualityPlugin {
    std::string name;
    std::function<double(const ImageTensor& original, const std::vector<ImageTensor>& set)> compute;
};

struct LabeledImageSet {
    std::string label;
    std::vector<ImageTensor> images;
};

/// One row per set: SSIM/PSNR averaged over the set against the original;
/// plugin columns included only when plugins are supplied. Order-preserving.
std::vector<QualityRow> quality_table(const ImageTensor& original,
                                      const std::vector<LabeledImageSet>& sets,
                                      const std::vector<QualityPlugin>& plugins = {});

/// Aligned text rendering of the table (inf rendered as "inf").
std::string format_quality_table(const std::vector<QualityRow>& rows);
/// Machine-readable tab-separated rendering.
std::string quality_table_tsv(const std::vector<QualityRow>& rows);

}  // namespace varigen::quality
