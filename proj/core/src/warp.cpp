#include "probdepth/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {

struct Cell {
    int x0, y0, x1, y1;
    double fx, fy;
    bool clamped_u, clamped_v;
    bool in_bounds;
};

Cell locate(const ImageBuffer& image, double u, double v) {
    const int w = image.width, h = image.height;
    Cell c{};
    c.in_bounds = (u >= 0.0 && u <= w - 1.0 && v >= 0.0 && v <= h - 1.0);
    c.clamped_u = (u < 0.0 || u > w - 1.0);
    c.clamped_v = (v < 0.0 || v > h - 1.0);
    const double uc = c.clamped_u ? (u < 0.0 ? 0.0 : w - 1.0) : u;
    const double vc = c.clamped_v ? (v < 0.0 ? 0.0 : h - 1.0) : v;
    // floor, then keep the cell inside the image so x1 = x0+1 stays valid;
    // an integer interior coordinate lands on the right-sided cell.
    int x0 = static_cast<int>(std::floor(uc));
    int y0 = static_cast<int>(std::floor(vc));
    if (x0 > w - 2) x0 = w >= 2 ? w - 2 : 0;
    if (y0 > h - 2) y0 = h >= 2 ? h - 2 : 0;
    c.x0 = x0;
    c.y0 = y0;
    c.x1 = w >= 2 ? x0 + 1 : x0;
    c.y1 = h >= 2 ? y0 + 1 : y0;
    c.fx = uc - x0;
    c.fy = vc - y0;
    return c;
}

void check_coords(const ImageBuffer& image, double u, double v) {
    if (image.width <= 0 || image.height <= 0 || image.data.empty())
        throw std::invalid_argument("bilinear_sample: empty image");
    if (std::isnan(u) || std::isnan(v))
        throw std::domain_error("bilinear_sample: NaN coordinate");
}

} // namespace

BilinearSample bilinear_sample(const ImageBuffer& image, double u, double v) {
    check_coords(image, u, v);
    const Cell c = locate(image, u, v);
    BilinearSample out;
    out.in_bounds = c.in_bounds;
    for (int ch = 0; ch < image.channels; ++ch) {
        const double v00 = image.at(c.x0, c.y0, ch);
        const double v10 = image.at(c.x1, c.y0, ch);
        const double v01 = image.at(c.x0, c.y1, ch);
        const double v11 = image.at(c.x1, c.y1, ch);
        const double top = (1.0 - c.fx) * v00 + c.fx * v10;
        const double bot = (1.0 - c.fx) * v01 + c.fx * v11;
        out.values[ch] = (1.0 - c.fy) * top + c.fy * bot;
    }
    return out;
}

BilinearSampleGrad bilinear_sample_grad(const ImageBuffer& image, double u, double v) {
    check_coords(image, u, v);
    const Cell c = locate(image, u, v);
    BilinearSampleGrad out;
    out.in_bounds = c.in_bounds;
    for (int ch = 0; ch < image.channels; ++ch) {
        const double v00 = image.at(c.x0, c.y0, ch);
        const double v10 = image.at(c.x1, c.y0, ch);
        const double v01 = image.at(c.x0, c.y1, ch);
        const double v11 = image.at(c.x1, c.y1, ch);
        const double top = (1.0 - c.fx) * v00 + c.fx * v10;
        const double bot = (1.0 - c.fx) * v01 + c.fx * v11;
        out.values[ch] = (1.0 - c.fy) * top + c.fy * bot;
        out.du[ch] = c.clamped_u ? 0.0
                                 : (1.0 - c.fy) * (v10 - v00) + c.fy * (v11 - v01);
        out.dv[ch] = c.clamped_v ? 0.0
                                 : (1.0 - c.fx) * (v01 - v00) + c.fx * (v11 - v10);
    }
    return out;
}

WarpResult warp_image(const ImageBuffer& source, const DepthMap& depth,
                      const CameraIntrinsics& k, const RigidPose& pose,
                      TileOrigin origin) {
    if (source.width <= 0 || source.height <= 0)
        throw std::invalid_argument("warp_image: empty source");
    WarpResult out;
    out.image = ImageBuffer(depth.width, depth.height, source.channels);
    out.in_bounds = ValidMask(depth.width, depth.height, 0);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const Reprojection rp =
                reproject_pixel(x + origin.x0, y + origin.y0, depth.at(x, y), k, pose);
            if (!rp.valid) continue;
            const BilinearSample s = bilinear_sample(source, rp.u, rp.v);
            for (int ch = 0; ch < source.channels; ++ch)
                out.image.at(x, y, ch) = s.values[ch];
            out.in_bounds.set(x, y, s.in_bounds);
        }
    }
    return out;
}

ImageBuffer warp_jacobian_depth(const ImageBuffer& source, const DepthMap& depth,
                                const CameraIntrinsics& k, const RigidPose& pose,
                                TileOrigin origin) {
    return warp_image_with_jacobian(source, depth, k, pose, origin).ddepth;
}

WarpWithJacobian warp_image_with_jacobian(const ImageBuffer& source, const DepthMap& depth,
                                          const CameraIntrinsics& k, const RigidPose& pose,
                                          TileOrigin origin) {
    if (source.width <= 0 || source.height <= 0)
        throw std::invalid_argument("warp_image_with_jacobian: empty source");
    WarpWithJacobian out;
    out.image = ImageBuffer(depth.width, depth.height, source.channels);
    out.ddepth = ImageBuffer(depth.width, depth.height, source.channels);
    out.in_bounds = ValidMask(depth.width, depth.height, 0);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const double u_t = x + origin.x0;
            const double v_t = y + origin.y0;
            const double d = depth.at(x, y);
            const Reprojection rp = reproject_pixel(u_t, v_t, d, k, pose);
            if (!rp.valid) continue;
            const BilinearSampleGrad s = bilinear_sample_grad(source, rp.u, rp.v);
            const ReprojectionJacobian j =
                reproject_pixel_depth_jacobian(u_t, v_t, d, k, pose);
            for (int ch = 0; ch < source.channels; ++ch) {
                out.image.at(x, y, ch) = s.values[ch];
                out.ddepth.at(x, y, ch) =
                    s.du[ch] * j.du_ddepth + s.dv[ch] * j.dv_ddepth;
            }
            out.in_bounds.set(x, y, s.in_bounds);
        }
    }
    return out;
}

} // namespace probdepth
