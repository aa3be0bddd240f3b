#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace probdepth {

/// Dense row-major raster with 1 or 3 interleaved channels, values in [0,1]
/// for photometric data. Also used as a plain per-pixel scalar/vector field
/// (e.g. warp Jacobians), in which case only finiteness is required.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int c, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    double at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    double& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    /// Throws std::invalid_argument on shape/finiteness violations.
    void validate(const std::string& what = "ImageBuffer") const;
};

/// Per-pixel metric depth in meters, row-major.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    DepthMap() = default;
    DepthMap(int w, int h, double fill = 0.0);

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    double at(int x, int y) const { return data[index(x, y)]; }
    double& at(int x, int y) { return data[index(x, y)]; }

    void validate(const std::string& what = "DepthMap") const;
};

/// Per-pixel validity, nonzero = valid.
struct ValidMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    ValidMask() = default;
    ValidMask(int w, int h, std::uint8_t fill = 1);

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    bool at(int x, int y) const { return data[index(x, y)] != 0; }
    void set(int x, int y, bool v) { data[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const;
};

/// Element-wise AND of two masks of equal shape.
ValidMask mask_and(const ValidMask& a, const ValidMask& b);

} // namespace probdepth
