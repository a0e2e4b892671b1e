#pragma once

#include "ntsplat/struct_hash.hpp"
#include "ntsplat/types.hpp"

namespace nts {

// Local texture support: |coordinate| <= kTextureBoxHalfExtent per axis in
// the sigma-normalized splat frame; queries outside are discarded.
inline constexpr double kTextureBoxHalfExtent = 3.0;

enum class TextureMode { disabled = 0, triplane3d = 1, plane2d = 2 };

inline int color_factor_count(int tau) { return 6 * 3 * tau; }
inline int alpha_factor_count(int tau) { return 6 * tau; }

// CP-factorized per-splat RGBA texture. Each of the three planes (xy, xz, yz)
// is the outer product of a factor pair; factors are stored concatenated as
// [v0_xy, v1_xy, v0_xz, v1_xz, v0_yz, v1_yz]. Color factors hold tau texels
// of 3 interleaved channels (entry u*3+c); alpha factors hold tau entries.
struct LocalTexture {
    TextureMode mode = TextureMode::disabled;
    int tau = 4;
    int plane2d_index = 0;  // populated plane in plane2d mode
    VecX color;             // 18*tau
    VecX alpha;             // 6*tau

    static LocalTexture zeros(TextureMode mode, int tau, int plane2d_index = 0) {
        LocalTexture t;
        t.mode = mode;
        t.tau = tau;
        t.plane2d_index = plane2d_index;
        if (mode != TextureMode::disabled) {
            t.color = VecX::Zero(color_factor_count(tau));
            t.alpha = VecX::Zero(alpha_factor_count(tau));
        }
        return t;
    }
};

// Plane whose normal is the smallest-scale (flattest) axis: z -> xy, y -> xz,
// x -> yz. Ties resolve to the lowest axis index.
int plane2d_plane_for_scales(const Vec3& log_scale);

// Per-channel lerp(v0, u) * lerp(v1, v) over tau samples with `channels`
// interleaved channels. Equivalent to bilinearly sampling the materialized
// outer-product plane. u, v must lie in [0, tau-1].
void cp_plane_query(const double* v0, const double* v1, int tau, int channels, double u, double v,
                    double* out);

struct TexSample {
    Vec3 color = Vec3::Zero();
    double alpha = 0.0;
    bool in_box = false;
};

// Maps a sigma-local point into grid coordinates and averages the three plane
// queries (single plane in plane2d mode). Out-of-box points return zeros.
TexSample triplane_texture_query(const Vec3& local_point, const LocalTexture& tex,
                                 StructHash* hash = nullptr);

// Accumulates gradients into the factor buffers (layout of LocalTexture) and
// into grad_local. Out-of-box queries contribute exactly zero everywhere.
void triplane_texture_query_backward(const Vec3& local_point, const LocalTexture& tex,
                                     const Vec3& grad_color, double grad_alpha,
                                     double* grad_color_factors, double* grad_alpha_factors,
                                     Vec3& grad_local);

// (1/tau^2) * sum over planes and grid texels of the RGBA L1 norm, via the
// factored identity sum_{ij}|a_i b_j| = (sum|a|)(sum|b|) per channel.
double texture_l1_norm(const LocalTexture& tex);

// d(texture_l1_norm)/d(factors), scaled by `grad`, accumulated into buffers.
void texture_l1_norm_backward(const LocalTexture& tex, double grad, double* grad_color_factors,
                              double* grad_alpha_factors);

}  // namespace nts
