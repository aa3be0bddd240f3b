#pragma once

#include "probdepth/metrics.hpp"
#include "probdepth/raster.hpp"

#include <string>
#include <vector>

namespace probdepth {

/// In-memory PFM raster: 32-bit floats, top-down row order (the file stores
/// rows bottom-up; readers and writers flip). "Pf" is one channel, "PF"
/// three.
struct PfmData {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
};

/// Parses either endianness (the sign of the scale field); throws
/// std::runtime_error on malformed headers or truncated payloads.
PfmData read_pfm(const std::string& path);

/// Always writes little-endian (scale -1.0). Round-trips bit-exactly.
void write_pfm(const std::string& path, const PfmData& pfm);

PfmData pfm_from_depth(const DepthMap& depth);
PfmData pfm_from_image(const ImageBuffer& image);

/// NaN payload entries become invalid mask entries (value 0), not errors.
/// For depth maps, non-positive values are also marked invalid.
struct DepthWithMask {
    DepthMap depth;
    ValidMask valid;
};
struct ImageWithMask {
    ImageBuffer image;
    ValidMask valid;
};

DepthWithMask depth_from_pfm(const PfmData& pfm);
ImageWithMask image_from_pfm(const PfmData& pfm);

/// 8-bit binary PGM (P5); nonzero = valid.
ValidMask read_pgm_mask(const std::string& path);
void write_pgm_mask(const std::string& path, const ValidMask& mask);

/// step,loss,grad_norm rows, floats with 17 significant digits.
void write_trace_csv(const std::string& path, const std::vector<double>& loss,
                     const std::vector<double>& grad_norm);

/// fraction,pred,oracle,random rows.
void write_curve_csv(const std::string& path, const SparsificationCurve& curve);

/// Stable key order, floats with 17 significant digits (round-trip exact
/// for 64-bit values); equal reports serialize byte-identically.
void write_report(const std::string& path, const MetricReport& report);
std::string report_to_json(const MetricReport& report);

} // namespace probdepth
