#include "ntsplat/gaussian.hpp"

#include <cmath>

namespace nts {

Mat3 rotation_matrix(const Vec4& quat) {
    const double n = quat.norm();
    require(std::isfinite(n) && n > 0.0, "rotation_matrix: quaternion must be finite and nonzero");
    const double w = quat[0] / n, x = quat[1] / n, y = quat[2] / n, z = quat[3] / n;
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

Vec4 rotation_matrix_backward(const Vec4& quat, const Mat3& g) {
    const double n = quat.norm();
    const Vec4 u = quat / n;
    const double w = u[0], x = u[1], y = u[2], z = u[3];

    Vec4 du;
    // Contractions of dL/dR with dR/du for the unit quaternion u.
    du[0] = 2 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) + x * g(2, 1));
    du[1] = 2 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2 * x * g(1, 1) - w * g(1, 2) +
                 z * g(2, 0) + w * g(2, 1) - 2 * x * g(2, 2));
    du[2] = 2 * (-2 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) + z * g(1, 2) -
                 w * g(2, 0) + z * g(2, 1) - 2 * y * g(2, 2));
    du[3] = 2 * (-2 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) - 2 * z * g(1, 1) +
                 y * g(1, 2) + x * g(2, 0) + y * g(2, 1));

    // Through the normalization u = q / |q|.
    return (du - u * u.dot(du)) / n;
}

Mat3 covariance(const Vec4& quat, const Vec3& log_scale) {
    require(quat.allFinite() && log_scale.allFinite(), "covariance: non-finite parameters");
    const Mat3 r = rotation_matrix(quat);
    const Vec3 s2 = (2.0 * log_scale).array().exp();  // exp(log_scale)^2
    Mat3 sigma = r * s2.asDiagonal() * r.transpose();
    // Symmetrize exactly; the product is symmetric only up to rounding.
    sigma = (0.5 * (sigma + sigma.transpose())).eval();
    return sigma;
}

Mat3 precision(const Vec4& quat, const Vec3& log_scale) {
    const Mat3 r = rotation_matrix(quat);
    const Vec3 inv_s2 = (-2.0 * log_scale).array().exp();
    Mat3 p = r * inv_s2.asDiagonal() * r.transpose();
    p = (0.5 * (p + p.transpose())).eval();
    return p;
}

bool covariance_degenerate(const Vec3& log_scale) {
    if (!log_scale.allFinite()) return true;
    const double spread = log_scale.maxCoeff() - log_scale.minCoeff();
    // cond(Sigma) = exp(2 * spread)
    return 2.0 * spread > std::log(kMaxConditionNumber);
}

Vec3 world_to_local(const Vec3& point, const GaussianPrimitive& prim) {
    const Mat3 r = rotation_matrix(prim.rotation);
    const Vec3 inv_s = (-prim.log_scale).array().exp();
    return inv_s.asDiagonal() * (r.transpose() * (point - prim.center));
}

ContributionPoint ray_contribution_point(const Ray& ray, const GaussianPrimitive& prim) {
    const Mat3 prec = precision(prim.rotation, prim.log_scale);
    const Vec3 to_center = prim.center - ray.origin;
    const double denom = ray.direction.dot(prec * ray.direction);
    const double numer = ray.direction.dot(prec * to_center);

    ContributionPoint cp;
    const double t_raw = numer / denom;
    cp.t_clamped = t_raw < kTNear;
    cp.t_star = cp.t_clamped ? kTNear : t_raw;
    cp.point = ray.origin + cp.t_star * ray.direction;
    cp.response = kernel_eval(world_to_local(cp.point, prim));
    return cp;
}

}  // namespace nts
