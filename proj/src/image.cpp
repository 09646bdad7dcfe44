#include "varigen/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "varigen/errors.hpp"

namespace varigen {

void ImageTensor::clamp01() {
    for (double& v : data) v = std::clamp(v, 0.0, 1.0);
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* where) {
    if (!a.same_shape(b)) {
        raise(ErrorCode::ShapeMismatch,
              std::string(where) + ": " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                  "x" + std::to_string(a.channels) + " vs " + std::to_string(b.height) + "x" +
                  std::to_string(b.width) + "x" + std::to_string(b.channels));
    }
}

double mean_squared_error(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "mean_squared_error");
    if (a.data.empty()) raise(ErrorCode::ShapeMismatch, "mean_squared_error: empty image");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double sample_bilinear(const ImageTensor& img, double y, double x, int c) {
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, img.height - 1);
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, img.width - 1);
    const int y1 = clampi(y0 + 1, 0, img.height - 1);
    const int x1 = clampi(x0 + 1, 0, img.width - 1);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
    const double bot = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
    return top * (1 - fy) + bot * fy;
}

}  // namespace

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0 || img.empty()) {
        raise(ErrorCode::ShapeMismatch, "resize_bilinear: invalid target or empty input");
    }
    ImageTensor out(out_h, out_w, img.channels);
    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        const double src_y = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < out_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            for (int c = 0; c < img.channels; ++c) {
                out.at(y, x, c) = sample_bilinear(img, src_y, src_x, c);
            }
        }
    }
    return out;
}

ImageTensor resize_nearest(const ImageTensor& img, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0 || img.empty()) {
        raise(ErrorCode::ShapeMismatch, "resize_nearest: invalid target or empty input");
    }
    ImageTensor out(out_h, out_w, img.channels);
    for (int y = 0; y < out_h; ++y) {
        const int sy = std::min(img.height - 1, static_cast<int>(y * static_cast<int64_t>(img.height) / out_h));
        for (int x = 0; x < out_w; ++x) {
            const int sx = std::min(img.width - 1, static_cast<int>(x * static_cast<int64_t>(img.width) / out_w));
            for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = img.at(sy, sx, c);
        }
    }
    return out;
}

ImageTensor gaussian_blur(const ImageTensor& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    ImageTensor tmp(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * img.at(y, clampi(x + i, 0, img.width - 1), c);
                }
                tmp.at(y, x, c) = acc;
            }
        }
    }
    ImageTensor out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[i + radius] * tmp.at(clampi(y + i, 0, img.height - 1), x, c);
                }
                out.at(y, x, c) = acc;
            }
        }
    }
    return out;
}

ImageTensor rotate_bilinear(const ImageTensor& img, double degrees) {
    const double rad = degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    const double cy = (img.height - 1) / 2.0, cx = (img.width - 1) / 2.0;
    ImageTensor out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            // Inverse mapping: output pixel pulled from rotated source position.
            const double dy = y - cy, dx = x - cx;
            const double src_y = cy + (-sn * dx + cs * dy);
            const double src_x = cx + (cs * dx + sn * dy);
            for (int c = 0; c < img.channels; ++c) {
                out.at(y, x, c) = sample_bilinear(img, src_y, src_x, c);
            }
        }
    }
    return out;
}

ImageTensor median3x3(const ImageTensor& img) {
    ImageTensor out(img.height, img.width, img.channels);
    double window[9];
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        window[n++] = img.at(clampi(y + dy, 0, img.height - 1),
                                             clampi(x + dx, 0, img.width - 1), c);
                    }
                }
                std::nth_element(window, window + 4, window + 9);
                out.at(y, x, c) = window[4];
            }
        }
    }
    return out;
}

ImageTensor to_grayscale(const ImageTensor& img) {
    if (img.channels == 1) return img;
    ImageTensor out(img.height, img.width, 1);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int c = 0; c < img.channels; ++c) acc += img.at(y, x, c);
            out.at(y, x, 0) = acc / img.channels;
        }
    }
    return out;
}

ImageTensor quantize8(const ImageTensor& img) {
    ImageTensor out(img.height, img.width, img.channels);
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        out.data[i] = std::lround(v * 255.0) / 255.0;
    }
    return out;
}

std::vector<uint8_t> to_bytes8(const ImageTensor& img) {
    std::vector<uint8_t> bytes(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double v = std::clamp(img.data[i], 0.0, 1.0);
        bytes[i] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    return bytes;
}

ImageTensor from_bytes8(const std::vector<uint8_t>& bytes, int h, int w, int c) {
    if (bytes.size() != static_cast<size_t>(h) * w * c) {
        raise(ErrorCode::ShapeMismatch, "from_bytes8: byte count does not match shape");
    }
    ImageTensor out(h, w, c);
    for (size_t i = 0; i < bytes.size(); ++i) out.data[i] = bytes[i] / 255.0;
    return out;
}

}  // namespace varigen
