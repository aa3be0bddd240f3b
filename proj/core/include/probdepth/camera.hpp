#pragma once

#include <array>
#include <string>

namespace probdepth {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

/// Pinhole intrinsics. Pixel (0,0) is the center of the top-left pixel and
/// the homogeneous pixel ray is (u, v, 1)^T.
struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate() const;

    Vec3 unproject(double u, double v) const {
        return {(u - cx) / fx, (v - cy) / fy, 1.0};
    }
};

/// Rigid transform mapping target-frame points to source-frame points.
/// Rotation is row-major 3x3, orthonormal with det +1.
struct RigidPose {
    std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
    std::array<double, 3> translation{0, 0, 0};

    static RigidPose identity() { return {}; }
    /// Pure translation, identity rotation.
    static RigidPose translate(double tx, double ty, double tz);

    Vec3 apply(const Vec3& p) const;
    /// Inverse transform; exact because rotation is orthonormal (R^T, -R^T t).
    RigidPose inverse() const;

    bool is_identity() const;

    /// Orthonormality and det(+1) within 1e-9; throws std::invalid_argument.
    void validate() const;
};

/// Intrinsics plus the target-to-source motion: the full warp geometry.
struct CameraRig {
    CameraIntrinsics intrinsics;
    RigidPose pose; // T_{t->s}

    void validate() const {
        intrinsics.validate();
        pose.validate();
    }
};

/// Continuous source-image coordinate of a target pixel seen at a given
/// depth, plus the depth of the transformed point in the source frame.
/// `valid` is false when the point lands behind the source camera
/// (z <= 1e-9); that state is transient during optimization and is flagged
/// rather than thrown.
struct Reprojection {
    double u = 0.0;
    double v = 0.0;
    double source_depth = 0.0;
    bool valid = false;
};

/// p_s from the homogeneous pinhole model: unproject the target pixel ray,
/// scale by depth, move through the pose, project with K. Exact algebra, no
/// rounding. Throws std::domain_error for depth <= 0.
Reprojection reproject_pixel(double u, double v, double depth,
                             const CameraIntrinsics& k, const RigidPose& pose);

/// d p_s / d depth in closed form (same chain as reproject_pixel).
/// Zero and invalid when the point is behind the camera.
struct ReprojectionJacobian {
    double du_ddepth = 0.0;
    double dv_ddepth = 0.0;
    bool valid = false;
};

ReprojectionJacobian reproject_pixel_depth_jacobian(double u, double v, double depth,
                                                    const CameraIntrinsics& k,
                                                    const RigidPose& pose);

} // namespace probdepth
