#include "probdepth/formats.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace probdepth {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

float byteswap_float(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bits = ((bits & 0x000000ffu) << 24) | ((bits & 0x0000ff00u) << 8) |
           ((bits & 0x00ff0000u) >> 8) | ((bits & 0xff000000u) >> 24);
    std::memcpy(&v, &bits, 4);
    return v;
}

constexpr bool kHostLittle = std::endian::native == std::endian::little;

std::string next_token(std::istream& in) {
    std::string tok;
    in >> tok;
    return tok;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) fail(path, "unwritable path");
    return out;
}

} // namespace

PfmData read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const std::string tag = next_token(in);
    PfmData pfm;
    if (tag == "PF")
        pfm.channels = 3;
    else if (tag == "Pf")
        pfm.channels = 1;
    else
        fail(path, "malformed PFM header tag '" + tag + "'");
    const std::string ws = next_token(in), hs = next_token(in), ss = next_token(in);
    try {
        pfm.width = std::stoi(ws);
        pfm.height = std::stoi(hs);
    } catch (const std::exception&) {
        fail(path, "malformed PFM dimensions");
    }
    double scale = 0.0;
    try {
        scale = std::stod(ss);
    } catch (const std::exception&) {
        fail(path, "malformed PFM scale field");
    }
    if (pfm.width <= 0 || pfm.height <= 0) fail(path, "non-positive PFM dimensions");
    if (scale == 0.0) fail(path, "zero PFM scale");
    in.get(); // single whitespace byte separating header and payload

    const bool file_little = scale < 0.0;
    const std::size_t count =
        static_cast<std::size_t>(pfm.width) * pfm.height * pfm.channels;
    std::vector<float> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
        fail(path, "truncated PFM payload");
    if (file_little != kHostLittle)
        for (float& v : raw) v = byteswap_float(v);

    // file rows are bottom-up; store top-down
    pfm.data.resize(count);
    const std::size_t row = static_cast<std::size_t>(pfm.width) * pfm.channels;
    for (int y = 0; y < pfm.height; ++y)
        std::memcpy(&pfm.data[static_cast<std::size_t>(y) * row],
                    &raw[static_cast<std::size_t>(pfm.height - 1 - y) * row],
                    row * sizeof(float));
    return pfm;
}

void write_pfm(const std::string& path, const PfmData& pfm) {
    if (pfm.width <= 0 || pfm.height <= 0 ||
        pfm.data.size() !=
            static_cast<std::size_t>(pfm.width) * pfm.height * pfm.channels)
        throw std::invalid_argument("write_pfm: inconsistent raster");
    auto out = open_out(path, std::ios::binary);
    out << (pfm.channels == 3 ? "PF" : "Pf") << "\n"
        << pfm.width << " " << pfm.height << "\n"
        << "-1.0\n";
    const std::size_t row = static_cast<std::size_t>(pfm.width) * pfm.channels;
    std::vector<float> buf(row);
    for (int y = pfm.height - 1; y >= 0; --y) {
        std::memcpy(buf.data(), &pfm.data[static_cast<std::size_t>(y) * row],
                    row * sizeof(float));
        if (!kHostLittle)
            for (float& v : buf) v = byteswap_float(v);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(row * sizeof(float)));
    }
    if (!out) fail(path, "write failed");
}

PfmData pfm_from_depth(const DepthMap& depth) {
    PfmData pfm;
    pfm.width = depth.width;
    pfm.height = depth.height;
    pfm.channels = 1;
    pfm.data.reserve(depth.data.size());
    for (double v : depth.data) pfm.data.push_back(static_cast<float>(v));
    return pfm;
}

PfmData pfm_from_image(const ImageBuffer& image) {
    PfmData pfm;
    pfm.width = image.width;
    pfm.height = image.height;
    pfm.channels = image.channels;
    pfm.data.reserve(image.data.size());
    for (double v : image.data) pfm.data.push_back(static_cast<float>(v));
    return pfm;
}

DepthWithMask depth_from_pfm(const PfmData& pfm) {
    if (pfm.channels != 1)
        throw std::invalid_argument("depth_from_pfm: expected a single channel");
    DepthWithMask out;
    out.depth = DepthMap(pfm.width, pfm.height);
    out.valid = ValidMask(pfm.width, pfm.height, 0);
    for (std::size_t i = 0; i < pfm.data.size(); ++i) {
        const float v = pfm.data[i];
        if (std::isnan(v) || !(v > 0.0f)) {
            out.depth.data[i] = 0.0;
        } else {
            out.depth.data[i] = v;
            out.valid.data[i] = 1;
        }
    }
    return out;
}

ImageWithMask image_from_pfm(const PfmData& pfm) {
    ImageWithMask out;
    out.image = ImageBuffer(pfm.width, pfm.height, pfm.channels);
    out.valid = ValidMask(pfm.width, pfm.height, 1);
    for (int y = 0; y < pfm.height; ++y)
        for (int x = 0; x < pfm.width; ++x)
            for (int c = 0; c < pfm.channels; ++c) {
                const float v = pfm.data[pfm.index(x, y, c)];
                if (std::isnan(v)) {
                    out.image.at(x, y, c) = 0.0;
                    out.valid.set(x, y, false);
                } else {
                    out.image.at(x, y, c) = v;
                }
            }
    return out;
}

ValidMask read_pgm_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    if (next_token(in) != "P5") fail(path, "malformed PGM header");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        fail(path, "malformed PGM dimensions");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        fail(path, "unsupported PGM geometry");
    in.get();
    ValidMask mask(w, h, 0);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        fail(path, "truncated PGM payload");
    for (std::size_t i = 0; i < raw.size(); ++i) mask.data[i] = raw[i] != 0 ? 1 : 0;
    return mask;
}

void write_pgm_mask(const std::string& path, const ValidMask& mask) {
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<std::uint8_t> raw(mask.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = mask.data[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) fail(path, "write failed");
}

void write_trace_csv(const std::string& path, const std::vector<double>& loss,
                     const std::vector<double>& grad_norm) {
    if (loss.size() != grad_norm.size())
        throw std::invalid_argument("write_trace_csv: column length mismatch");
    auto out = open_out(path, std::ios::out);
    out << "step,loss,grad_norm\n";
    for (std::size_t i = 0; i < loss.size(); ++i)
        out << i << "," << format_g17(loss[i]) << "," << format_g17(grad_norm[i]) << "\n";
    if (!out) fail(path, "write failed");
}

void write_curve_csv(const std::string& path, const SparsificationCurve& curve) {
    auto out = open_out(path, std::ios::out);
    out << "fraction,pred,oracle,random\n";
    for (std::size_t i = 0; i < curve.fractions.size(); ++i)
        out << format_g17(curve.fractions[i]) << "," << format_g17(curve.pred[i]) << ","
            << format_g17(curve.oracle[i]) << "," << format_g17(curve.random_value)
            << "\n";
    if (!out) fail(path, "write failed");
}

std::string report_to_json(const MetricReport& report) {
    std::ostringstream out;
    out << "{\n";
    const auto field = [&](const char* key, double v, bool last = false) {
        out << "  \"" << key << "\": " << format_g17(v) << (last ? "\n" : ",\n");
    };
    field("abs_rel", report.abs_rel);
    field("rmse", report.rmse);
    field("delta1", report.delta1);
    field("ause_abs_rel", report.ause_abs_rel);
    field("aurg_abs_rel", report.aurg_abs_rel);
    field("ause_rmse", report.ause_rmse);
    field("aurg_rmse", report.aurg_rmse);
    field("ause_delta1", report.ause_delta1);
    field("aurg_delta1", report.aurg_delta1);
    field("aru", report.aru);
    field("rmsu", report.rmsu);
    out << "  \"n_frames\": " << report.n_frames << "\n";
    out << "}\n";
    return out.str();
}

void write_report(const std::string& path, const MetricReport& report) {
    auto out = open_out(path, std::ios::out);
    out << report_to_json(report);
    if (!out) fail(path, "write failed");
}

} // namespace probdepth
