#include "ntsplat/texture.hpp"

#include <cassert>
#include <cmath>

namespace nts {

namespace {

// Axis pair spanned by each plane, order (xy, xz, yz).
constexpr int kPlaneAxes[3][2] = {{0, 1}, {0, 2}, {1, 2}};

struct Lerp1D {
    int i0;
    double frac;
};

inline Lerp1D lerp_setup(double u, int tau) {
    if (tau == 1) return {0, 0.0};
    int i0 = static_cast<int>(std::floor(u));
    if (i0 > tau - 2) i0 = tau - 2;
    if (i0 < 0) i0 = 0;
    return {i0, u - i0};
}

inline double lerp_value(const double* v, int stride, int offset, const Lerp1D& l, int tau) {
    if (tau == 1) return v[offset];
    const double a = v[l.i0 * stride + offset];
    const double b = v[(l.i0 + 1) * stride + offset];
    return a + (b - a) * l.frac;
}

inline double lerp_slope(const double* v, int stride, int offset, const Lerp1D& l, int tau) {
    if (tau == 1) return 0.0;
    return v[(l.i0 + 1) * stride + offset] - v[l.i0 * stride + offset];
}

inline double grid_coord(double x, int tau) {
    return (x + kTextureBoxHalfExtent) / (2.0 * kTextureBoxHalfExtent) * (tau - 1);
}

inline double grid_coord_slope(int tau) { return (tau - 1) / (2.0 * kTextureBoxHalfExtent); }

inline bool outside_box(const Vec3& p) {
    return p.lpNorm<Eigen::Infinity>() > kTextureBoxHalfExtent;
}

}  // namespace

int plane2d_plane_for_scales(const Vec3& log_scale) {
    int axis = 0;
    for (int i = 1; i < 3; ++i)
        if (log_scale[i] < log_scale[axis]) axis = i;
    return 2 - axis;
}

void cp_plane_query(const double* v0, const double* v1, int tau, int channels, double u, double v,
                    double* out) {
    assert(u >= 0.0 && u <= tau - 1 + 1e-9 && v >= 0.0 && v <= tau - 1 + 1e-9);
    const Lerp1D lu = lerp_setup(u, tau);
    const Lerp1D lv = lerp_setup(v, tau);
    for (int c = 0; c < channels; ++c)
        out[c] = lerp_value(v0, channels, c, lu, tau) * lerp_value(v1, channels, c, lv, tau);
}

TexSample triplane_texture_query(const Vec3& local_point, const LocalTexture& tex,
                                 StructHash* hash) {
    TexSample s;
    if (tex.mode == TextureMode::disabled) return s;
    if (outside_box(local_point)) {
        if (hash) hash->add_bool(false);
        return s;
    }
    if (hash) hash->add_bool(true);
    s.in_box = true;

    const int tau = tex.tau;
    const int p_begin = tex.mode == TextureMode::plane2d ? tex.plane2d_index : 0;
    const int p_end = tex.mode == TextureMode::plane2d ? tex.plane2d_index + 1 : 3;
    const double weight = tex.mode == TextureMode::plane2d ? 1.0 : 1.0 / 3.0;

    for (int p = p_begin; p < p_end; ++p) {
        const double u = grid_coord(local_point[kPlaneAxes[p][0]], tau);
        const double v = grid_coord(local_point[kPlaneAxes[p][1]], tau);
        const Lerp1D lu = lerp_setup(u, tau);
        const Lerp1D lv = lerp_setup(v, tau);
        if (hash) {
            hash->add_int(lu.i0);
            hash->add_int(lv.i0);
        }
        const double* c0 = tex.color.data() + (2 * p) * 3 * tau;
        const double* c1 = tex.color.data() + (2 * p + 1) * 3 * tau;
        for (int c = 0; c < 3; ++c)
            s.color[c] += weight * lerp_value(c0, 3, c, lu, tau) * lerp_value(c1, 3, c, lv, tau);
        const double* a0 = tex.alpha.data() + (2 * p) * tau;
        const double* a1 = tex.alpha.data() + (2 * p + 1) * tau;
        s.alpha += weight * lerp_value(a0, 1, 0, lu, tau) * lerp_value(a1, 1, 0, lv, tau);
    }
    return s;
}

void triplane_texture_query_backward(const Vec3& local_point, const LocalTexture& tex,
                                     const Vec3& grad_color, double grad_alpha,
                                     double* grad_color_factors, double* grad_alpha_factors,
                                     Vec3& grad_local) {
    if (tex.mode == TextureMode::disabled || outside_box(local_point)) return;

    const int tau = tex.tau;
    const int p_begin = tex.mode == TextureMode::plane2d ? tex.plane2d_index : 0;
    const int p_end = tex.mode == TextureMode::plane2d ? tex.plane2d_index + 1 : 3;
    const double weight = tex.mode == TextureMode::plane2d ? 1.0 : 1.0 / 3.0;
    const double coord_slope = grid_coord_slope(tau);

    for (int p = p_begin; p < p_end; ++p) {
        const int ax_u = kPlaneAxes[p][0];
        const int ax_v = kPlaneAxes[p][1];
        const double u = grid_coord(local_point[ax_u], tau);
        const double v = grid_coord(local_point[ax_v], tau);
        const Lerp1D lu = lerp_setup(u, tau);
        const Lerp1D lv = lerp_setup(v, tau);

        auto backprop_plane = [&](const double* v0, const double* v1, int channels, int c,
                                  double g, double* g0, double* g1) {
            const double f0 = lerp_value(v0, channels, c, lu, tau);
            const double f1 = lerp_value(v1, channels, c, lv, tau);
            // factors
            if (tau == 1) {
                g0[c] += g * f1;
                g1[c] += g * f0;
            } else {
                g0[lu.i0 * channels + c] += g * f1 * (1.0 - lu.frac);
                g0[(lu.i0 + 1) * channels + c] += g * f1 * lu.frac;
                g1[lv.i0 * channels + c] += g * f0 * (1.0 - lv.frac);
                g1[(lv.i0 + 1) * channels + c] += g * f0 * lv.frac;
            }
            // coordinates
            grad_local[ax_u] += g * f1 * lerp_slope(v0, channels, c, lu, tau) * coord_slope;
            grad_local[ax_v] += g * f0 * lerp_slope(v1, channels, c, lv, tau) * coord_slope;
        };

        const double* c0 = tex.color.data() + (2 * p) * 3 * tau;
        const double* c1 = tex.color.data() + (2 * p + 1) * 3 * tau;
        double* gc0 = grad_color_factors + (2 * p) * 3 * tau;
        double* gc1 = grad_color_factors + (2 * p + 1) * 3 * tau;
        for (int c = 0; c < 3; ++c)
            backprop_plane(c0, c1, 3, c, weight * grad_color[c], gc0, gc1);

        const double* a0 = tex.alpha.data() + (2 * p) * tau;
        const double* a1 = tex.alpha.data() + (2 * p + 1) * tau;
        backprop_plane(a0, a1, 1, 0, weight * grad_alpha, grad_alpha_factors + (2 * p) * tau,
                       grad_alpha_factors + (2 * p + 1) * tau);
    }
}

double texture_l1_norm(const LocalTexture& tex) {
    if (tex.mode == TextureMode::disabled) return 0.0;
    const int tau = tex.tau;
    double total = 0.0;
    for (int p = 0; p < 3; ++p) {
        const double* c0 = tex.color.data() + (2 * p) * 3 * tau;
        const double* c1 = tex.color.data() + (2 * p + 1) * 3 * tau;
        for (int c = 0; c < 3; ++c) {
            double s0 = 0.0, s1 = 0.0;
            for (int i = 0; i < tau; ++i) {
                s0 += std::abs(c0[i * 3 + c]);
                s1 += std::abs(c1[i * 3 + c]);
            }
            total += s0 * s1;
        }
        const double* a0 = tex.alpha.data() + (2 * p) * tau;
        const double* a1 = tex.alpha.data() + (2 * p + 1) * tau;
        double s0 = 0.0, s1 = 0.0;
        for (int i = 0; i < tau; ++i) {
            s0 += std::abs(a0[i]);
            s1 += std::abs(a1[i]);
        }
        total += s0 * s1;
    }
    return total / (static_cast<double>(tau) * tau);
}

namespace {
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}

void texture_l1_norm_backward(const LocalTexture& tex, double grad, double* grad_color_factors,
                              double* grad_alpha_factors) {
    if (tex.mode == TextureMode::disabled) return;
    const int tau = tex.tau;
    const double scale = grad / (static_cast<double>(tau) * tau);
    for (int p = 0; p < 3; ++p) {
        const double* c0 = tex.color.data() + (2 * p) * 3 * tau;
        const double* c1 = tex.color.data() + (2 * p + 1) * 3 * tau;
        double* gc0 = grad_color_factors + (2 * p) * 3 * tau;
        double* gc1 = grad_color_factors + (2 * p + 1) * 3 * tau;
        for (int c = 0; c < 3; ++c) {
            double s0 = 0.0, s1 = 0.0;
            for (int i = 0; i < tau; ++i) {
                s0 += std::abs(c0[i * 3 + c]);
                s1 += std::abs(c1[i * 3 + c]);
            }
            for (int i = 0; i < tau; ++i) {
                gc0[i * 3 + c] += scale * sgn(c0[i * 3 + c]) * s1;
                gc1[i * 3 + c] += scale * sgn(c1[i * 3 + c]) * s0;
            }
        }
        const double* a0 = tex.alpha.data() + (2 * p) * tau;
        const double* a1 = tex.alpha.data() + (2 * p + 1) * tau;
        double* ga0 = grad_alpha_factors + (2 * p) * tau;
        double* ga1 = grad_alpha_factors + (2 * p + 1) * tau;
        double s0 = 0.0, s1 = 0.0;
        for (int i = 0; i < tau; ++i) {
            s0 += std::abs(a0[i]);
            s1 += std::abs(a1[i]);
        }
        for (int i = 0; i < tau; ++i) {
            ga0[i] += scale * sgn(a0[i]) * s1;
            ga1[i] += scale * sgn(a1[i]) * s0;
        }
    }
}

}  // namespace nts
