#include "probdepth/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace probdepth {

namespace {
constexpr double kBehindCameraEps = 1e-9;
constexpr double kOrthoTol = 1e-9;

bool rotation_is_identity(const RigidPose& pose) {
    static constexpr std::array<double, 9> kId{1, 0, 0, 0, 1, 0, 0, 0, 1};
    return pose.rotation == kId;
}
} // namespace

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw std::invalid_argument("CameraIntrinsics: focal lengths must be > 0");
    if (!std::isfinite(cx) || !std::isfinite(cy))
        throw std::invalid_argument("CameraIntrinsics: principal point must be finite");
}

RigidPose RigidPose::translate(double tx, double ty, double tz) {
    RigidPose p;
    p.translation = {tx, ty, tz};
    return p;
}

Vec3 RigidPose::apply(const Vec3& p) const {
    const auto& r = rotation;
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z + translation[0],
            r[3] * p.x + r[4] * p.y + r[5] * p.z + translation[1],
            r[6] * p.x + r[7] * p.y + r[8] * p.z + translation[2]};
}

RigidPose RigidPose::inverse() const {
    RigidPose inv;
    const auto& r = rotation;
    inv.rotation = {r[0], r[3], r[6], r[1], r[4], r[7], r[2], r[5], r[8]};
    const auto& t = translation;
    inv.translation = {-(r[0] * t[0] + r[3] * t[1] + r[6] * t[2]),
                       -(r[1] * t[0] + r[4] * t[1] + r[7] * t[2]),
                       -(r[2] * t[0] + r[5] * t[1] + r[8] * t[2])};
    return inv;
}

bool RigidPose::is_identity() const {
    static const RigidPose id{};
    for (int i = 0; i < 9; ++i)
        if (rotation[i] != id.rotation[i]) return false;
    return translation[0] == 0 && translation[1] == 0 && translation[2] == 0;
}

void RigidPose::validate() const {
    const auto& r = rotation;
    // R^T R == I
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 3; ++k) dot += r[k * 3 + i] * r[k * 3 + j];
            const double expect = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - expect) > kOrthoTol)
                throw std::invalid_argument("RigidPose: rotation is not orthonormal");
        }
    }
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) -
                       r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    if (std::abs(det - 1.0) > kOrthoTol)
        throw std::invalid_argument("RigidPose: rotation determinant is not +1");
    for (double t : translation)
        if (!std::isfinite(t))
            throw std::invalid_argument("RigidPose: non-finite translation");
}

Reprojection reproject_pixel(double u, double v, double depth,
                             const CameraIntrinsics& k, const RigidPose& pose) {
    if (!(depth > 0.0))
        throw std::domain_error("reproject_pixel: depth must be > 0");
    if (pose.is_identity()) {
        // the identity map, kept exact so it holds bit-wise for every depth
        return {u, v, depth, true};
    }
    if (rotation_is_identity(pose) && pose.translation[2] == 0.0) {
        // in-plane translation simplifies to a pure pixel shift by the
        // disparity; the direct form keeps integer disparities exact
        Reprojection out;
        out.source_depth = depth;
        out.u = u + k.fx * pose.translation[0] / depth;
        out.v = v + k.fy * pose.translation[1] / depth;
        out.valid = true;
        return out;
    }
    const Vec3 ray = k.unproject(u, v);
    const Vec3 p = pose.apply({ray.x * depth, ray.y * depth, ray.z * depth});
    Reprojection out;
    out.source_depth = p.z;
    if (p.z <= kBehindCameraEps) {
        out.valid = false;
        return out;
    }
    out.u = k.fx * p.x / p.z + k.cx;
    out.v = k.fy * p.y / p.z + k.cy;
    out.valid = true;
    return out;
}

ReprojectionJacobian reproject_pixel_depth_jacobian(double u, double v, double depth,
                                                    const CameraIntrinsics& k,
                                                    const RigidPose& pose) {
    if (!(depth > 0.0))
        throw std::domain_error("reproject_pixel_depth_jacobian: depth must be > 0");
    if (pose.is_identity()) return {0.0, 0.0, true};
    if (rotation_is_identity(pose) && pose.translation[2] == 0.0) {
        return {-k.fx * pose.translation[0] / (depth * depth),
                -k.fy * pose.translation[1] / (depth * depth), true};
    }
    const Vec3 ray = k.unproject(u, v);
    const auto& r = pose.rotation;
    // q = R * ray is d(point)/d(depth); the translation is depth-independent.
    const Vec3 q{r[0] * ray.x + r[1] * ray.y + r[2] * ray.z,
                 r[3] * ray.x + r[4] * ray.y + r[5] * ray.z,
                 r[6] * ray.x + r[7] * ray.y + r[8] * ray.z};
    const Vec3 p = pose.apply({ray.x * depth, ray.y * depth, ray.z * depth});
    ReprojectionJacobian jac;
    if (p.z <= kBehindCameraEps) return jac;
    const double inv_z = 1.0 / p.z;
    jac.du_ddepth = k.fx * (q.x * p.z - p.x * q.z) * inv_z * inv_z;
    jac.dv_ddepth = k.fy * (q.y * p.z - p.y * q.z) * inv_z * inv_z;
    jac.valid = true;
    return jac;
}

} // namespace probdepth
