#include "probdepth/raster.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace probdepth {

ImageBuffer::ImageBuffer(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {}

void ImageBuffer::validate(const std::string& what) const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument(what + ": empty raster");
    if (channels != 1 && channels != 3)
        throw std::invalid_argument(what + ": channels must be 1 or 3");
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw std::invalid_argument(what + ": data length does not match dims");
    for (double v : data)
        if (!std::isfinite(v))
            throw std::invalid_argument(what + ": non-finite value");
}

DepthMap::DepthMap(int w, int h, double fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

void DepthMap::validate(const std::string& what) const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument(what + ": empty raster");
    if (data.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument(what + ": data length does not match dims");
    for (double v : data)
        if (!std::isfinite(v))
            throw std::invalid_argument(what + ": non-finite value");
}

ValidMask::ValidMask(int w, int h, std::uint8_t fill)
    : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

std::size_t ValidMask::count() const {
    std::size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
}

ValidMask mask_and(const ValidMask& a, const ValidMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mask_and: shape mismatch");
    ValidMask out(a.width, a.height, 0);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        out.data[i] = (a.data[i] != 0 && b.data[i] != 0) ? 1 : 0;
    return out;
}

} // namespace probdepth
