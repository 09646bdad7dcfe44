#pragma once

#include <cstdint>
#include <vector>

namespace varigen {

/// H×W×C image, row-major with interleaved channels, values nominally in [0,1].
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t value_count() const { return data.size(); }
    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    bool empty() const { return data.empty(); }

    void clamp01();
};

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* where);

/// Mean over all (pixel, channel) entries of the squared difference.
double mean_squared_error(const ImageTensor& a, const ImageTensor& b);

ImageTensor resize_bilinear(const ImageTensor& img, int out_h, int out_w);

/// Nearest-neighbor resize; keeps binary masks binary.
ImageTensor resize_nearest(const ImageTensor& img, int out_h, int out_w);

/// Separable Gaussian blur, replicate borders, kernel radius ceil(3*sigma).
ImageTensor gaussian_blur(const ImageTensor& img, double sigma);

/// Rotation about the image center, bilinear sampling, replicate fill.
ImageTensor rotate_bilinear(const ImageTensor& img, double degrees);

/// 3×3 median filter per channel, replicate borders.
ImageTensor median3x3(const ImageTensor& img);

/// Channel-mean grayscale (1 channel).
ImageTensor to_grayscale(const ImageTensor& img);

/// Quantize to 8-bit and back; the detector and exports operate on what an
/// 8-bit lossless file would round-trip.
ImageTensor quantize8(const ImageTensor& img);

std::vector<uint8_t> to_bytes8(const ImageTensor& img);
ImageTensor from_bytes8(const std::vector<uint8_t>& bytes, int h, int w, int c);

}  // namespace varigen
