#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nts {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Axis-aligned box used to map world positions into [-1,1]^3.
struct Bounds3 {
    Vec3 lo{-1.0, -1.0, -1.0};
    Vec3 hi{1.0, 1.0, 1.0};

    // Returns normalized coordinates; sets clamped[i] when the point lies
    // outside the box along axis i (lookup is pinned to the boundary there).
    Vec3 normalize(const Vec3& p, bool clamped[3]) const {
        Vec3 n;
        for (int i = 0; i < 3; ++i) {
            const double extent = hi[i] - lo[i];
            double t = 2.0 * (p[i] - lo[i]) / extent - 1.0;
            clamped[i] = (t < -1.0 || t > 1.0);
            n[i] = t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t);
        }
        return n;
    }

    // d(normalized)/d(world) along each axis, zero where clamped.
    Vec3 normalize_jacobian_diag(const bool clamped[3]) const {
        Vec3 j;
        for (int i = 0; i < 3; ++i)
            j[i] = clamped[i] ? 0.0 : 2.0 / (hi[i] - lo[i]);
        return j;
    }
};

// Row-major H x W x 3 image with double components.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;  // height*width*3

    Image() = default;
    Image(int h, int w, double fill = 0.0) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, fill) {}

    double& at(int r, int c, int ch) { return data[(static_cast<size_t>(r) * width + c) * 3 + ch]; }
    double at(int r, int c, int ch) const { return data[(static_cast<size_t>(r) * width + c) * 3 + ch]; }
    size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
};

// Counters for conditions that skip work instead of raising.
struct RenderDiagnostics {
    std::int64_t degenerate_covariance = 0;
    std::int64_t non_unit_view_dirs = 0;

    void reset() { *this = RenderDiagnostics{}; }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidParameter(msg);
}

}  // namespace nts
