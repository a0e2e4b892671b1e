#pragma once

#include "ntsplat/types.hpp"

namespace nts {

// Closest distance along a ray that still counts as "in front of" the camera.
inline constexpr double kTNear = 0.01;

// Scale anisotropy beyond this is treated as a degenerate covariance and the
// primitive is skipped with a diagnostic count.
inline constexpr double kMaxConditionNumber = 1e12;

struct GaussianPrimitive {
    Vec3 center = Vec3::Zero();
    Vec4 rotation = Vec4(1, 0, 0, 0);  // unit quaternion (w, x, y, z)
    Vec3 log_scale = Vec3::Zero();     // scale = exp(log_scale), per axis
    double opacity_logit = 0.0;        // opacity = sigmoid(opacity_logit)
    VecX base_color;                   // SH coefficients, (degree+1)^2 x 3, coefficient-major

    double opacity() const { return 1.0 / (1.0 + std::exp(-opacity_logit)); }
    Vec3 scale() const { return log_scale.array().exp(); }
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3(0, 0, -1);  // unit
    int pixel_row = 0;
    int pixel_col = 0;
};

struct ContributionPoint {
    double t_star = 0.0;
    Vec3 point = Vec3::Zero();
    double response = 0.0;  // Gaussian kernel value at `point`
    bool t_clamped = false; // max fell behind t_near and was clamped
};

// Rotation matrix from a quaternion; normalizes internally so gradients and
// finite differences stay well-defined for slightly off-unit inputs.
Mat3 rotation_matrix(const Vec4& quat);

// Adjoint of rotation_matrix including the normalization: given dL/dR,
// returns dL/dquat (for the raw, possibly non-unit quaternion).
Vec4 rotation_matrix_backward(const Vec4& quat, const Mat3& grad_rotation);

// Sigma = R S S^T R^T with S = diag(exp(log_scale)).
Mat3 covariance(const Vec4& quat, const Vec3& log_scale);

// Sigma^{-1} = R S^{-2} R^T, built from factors (no general inverse).
Mat3 precision(const Vec4& quat, const Vec3& log_scale);

bool covariance_degenerate(const Vec3& log_scale);

// x_local = S^{-1} R^T (point - center); sigma-normalized local frame.
Vec3 world_to_local(const Vec3& point, const GaussianPrimitive& prim);

inline double kernel_eval(const Vec3& local_point) {
    return std::exp(-0.5 * local_point.squaredNorm());
}

// Maximizer of the Gaussian along the ray over [t_near, inf), its location
// and the kernel response there. Caller must have ruled out degenerate
// covariance (see covariance_degenerate).
ContributionPoint ray_contribution_point(const Ray& ray, const GaussianPrimitive& prim);

}  // namespace nts
