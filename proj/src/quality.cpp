#include "varigen/quality.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "varigen/errors.hpp"

namespace varigen::quality {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::vector<double>& ssim_window() {
    static const std::vector<double> window = [] {
        std::vector<double> w(kWindow * kWindow);
        double sum = 0.0;
        const int r = kWindow / 2;
        for (int y = -r; y <= r; ++y) {
            for (int x = -r; x <= r; ++x) {
                const double g = std::exp(-(y * y + x * x) / (2.0 * kSigma * kSigma));
                w[(y + r) * kWindow + (x + r)] = g;
                sum += g;
            }
        }
        for (double& v : w) v /= sum;
        return w;
    }();
    return window;
}

}  // namespace

double ssim(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "ssim");
    if (a.height < kWindow || a.width < kWindow) {
        raise(ErrorCode::ShapeMismatch, "ssim needs images of at least 11x11 pixels");
    }
    const auto& w = ssim_window();
    const int r = kWindow / 2;
    double total = 0.0;
    size_t positions = 0;
    for (int c = 0; c < a.channels; ++c) {
        for (int cy = r; cy < a.height - r; ++cy) {
            for (int cx = r; cx < a.width - r; ++cx) {
                double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
                for (int dy = -r; dy <= r; ++dy) {
                    for (int dx = -r; dx <= r; ++dx) {
                        const double weight = w[(dy + r) * kWindow + (dx + r)];
                        const double va = a.at(cy + dy, cx + dx, c);
                        const double vb = b.at(cy + dy, cx + dx, c);
                        mu_a += weight * va;
                        mu_b += weight * vb;
                        aa += weight * va * va;
                        bb += weight * vb * vb;
                        ab += weight * va * vb;
                    }
                }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
                const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
                total += num / den;
                ++positions;
            }
        }
    }
    return total / static_cast<double>(positions);
}

double psnr_from_mse(double mse) {
    if (mse < 0.0) raise(ErrorCode::ConfigError, "negative MSE");
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
    return psnr_from_mse(mean_squared_error(a, b));
}

std::vector<QualityRow> quality_table(const ImageTensor& original,
                                      const std::vector<LabeledImageSet>& sets,
                                      const std::vector<QualityPlugin>& plugins) {
    if (sets.empty()) raise(ErrorCode::EmptyInput, "quality_table: no image sets");
    std::vector<QualityRow> rows;
    rows.reserve(sets.size());
    for (const auto& set : sets) {
        if (set.images.empty()) {
            raise(ErrorCode::EmptyImageSet, "quality_table: empty set '" + set.label + "'");
        }
        QualityRow row;
        row.label = set.label;
        double ssim_acc = 0.0, psnr_acc = 0.0;
        bool psnr_inf = false;
        for (const auto& img : set.images) {
            ssim_acc += ssim(original, img);
            const double p = psnr(original, img);
            if (std::isinf(p)) {
                psnr_inf = true;
            } else {
                psnr_acc += p;
            }
        }
        row.ssim = ssim_acc / static_cast<double>(set.images.size());
        row.psnr_db = psnr_inf ? std::numeric_limits<double>::infinity()
                               : psnr_acc / static_cast<double>(set.images.size());
        for (const auto& plugin : plugins) {
            row.plugin_metrics[plugin.name] = plugin.compute(original, set.images);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string num(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::string format_quality_table(const std::vector<QualityRow>& rows) {
    std::ostringstream out;
    out << "label";
    out << "\tSSIM\tPSNR(dB)";
    if (!rows.empty()) {
        for (const auto& [name, v] : rows.front().plugin_metrics) out << "\t" << name;
    }
    out << "\n";
    for (const auto& row : rows) {
        out << row.label << "\t" << num(row.ssim) << "\t" << num(row.psnr_db);
        for (const auto& [name, v] : row.plugin_metrics) out << "\t" << num(v);
        out << "\n";
    }
    return out.str();
}

std::string quality_table_tsv(const std::vector<QualityRow>& rows) {
    return format_quality_table(rows);  // tab-separated already
}

}  // namespace varigen::quality
