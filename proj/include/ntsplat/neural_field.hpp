#pragma once

#include "ntsplat/rng.hpp"
#include "ntsplat/struct_hash.hpp"
#include "ntsplat/texture.hpp"
#include "ntsplat/types.hpp"

#include <array>
#include <optional>

namespace nts {

// Three axis-aligned feature planes (xy, xz, yz), each height x width x
// channels, row-major with interleaved channels.
struct TriPlane {
    int height = 192;
    int width = 192;
    int channels = 16;
    std::array<std::vector<double>, 3> data;

    void allocate() {
        for (auto& p : data) p.assign(static_cast<size_t>(height) * width * channels, 0.0);
    }
    size_t plane_size() const { return static_cast<size_t>(height) * width * channels; }
    int feature_size() const { return 3 * channels; }
};

// Bilinear sample of one plane at normalized coords (a, b) in [-1,1]^2;
// a indexes columns, b indexes rows, texel centers at integer grid points.
void plane_sample(const std::vector<double>& plane, int height, int width, int channels, double a,
                  double b, double* out, StructHash* hash = nullptr);

void plane_sample_backward(const std::vector<double>& plane, int height, int width, int channels,
                           double a, double b, const double* grad_out, double* grad_plane,
                           double& grad_a, double& grad_b);

// Concatenated (xy, xz, yz) plane samples at the normalized center.
VecX global_feature(const TriPlane& planes, const Vec3& n_center, StructHash* hash = nullptr);

void global_feature_backward(const TriPlane& planes, const Vec3& n_center, const VecX& grad_feat,
                             std::array<std::vector<double>, 3>& grad_planes, Vec3& grad_n_center);

// Two-hidden-layer fully connected decoder. Weights are stored row-major per
// layer in one contiguous blob so the optimizer can treat the decoder as a
// single parameter class: [W1, b1, W2, b2, W3, b3].
struct Mlp {
    enum class Activation { rectifier, sine };

    Activation activation = Activation::rectifier;
    double omega0 = 30.0;
    int in_dim = 0;
    int hidden = 128;
    int out_dim = 0;
    std::vector<double> params;

    size_t w1() const { return 0; }
    size_t b1() const { return static_cast<size_t>(hidden) * in_dim; }
    size_t w2() const { return b1() + hidden; }
    size_t b2() const { return w2() + static_cast<size_t>(hidden) * hidden; }
    size_t w3() const { return b2() + hidden; }
    size_t b3() const { return w3() + static_cast<size_t>(out_dim) * hidden; }
    size_t param_count() const { return b3() + out_dim; }
};

struct MlpTrace {
    VecX input;
    VecX z1, h1;  // pre/post activation
    VecX z2, h2;
};

// init_zero_rows: output rows in [row_begin, row_end) pairs listed get zero
// initial weights (see GlobalField::init).
void mlp_init(Mlp& mlp, Rng& rng, const std::vector<std::pair<int, int>>& zero_rows,
              double small_row_scale);

void mlp_forward(const Mlp& mlp, const VecX& input, VecX& output, MlpTrace* trace,
                 StructHash* hash);

// grad_params accumulated into a buffer of mlp.param_count() doubles.
void mlp_backward(const Mlp& mlp, const MlpTrace& trace, const VecX& grad_output,
                  double* grad_params, VecX& grad_input);

// Global neural texture field: two tri-plane stacks plus two decoders. View
// direction is input only to the color decoder; time only when time_dep.
struct GlobalField {
    TriPlane color_planes;
    TriPlane alpha_planes;
    Mlp color_decoder;
    Mlp alpha_decoder;
    Bounds3 bounds;
    int tau = 4;
    bool view_dep = true;
    bool time_dep = false;
    bool freq_encoding = false;
    int freq_bands = 4;

    int encoded_pos_dim() const { return freq_encoding ? 3 * (1 + 2 * freq_bands) : 3; }
    int encoded_time_dim() const { return freq_encoding ? (1 + 2 * freq_bands) : 1; }
    int color_in_dim() const {
        return color_planes.feature_size() + encoded_pos_dim() + 3 + (time_dep ? encoded_time_dim() : 0);
    }
    int alpha_in_dim() const {
        return alpha_planes.feature_size() + encoded_pos_dim() + (time_dep ? encoded_time_dim() : 0);
    }

    // Planes ~ U(-1e-2, 1e-2); decoder hidden layers fan-in scaled; final
    // layer rows for the v1 factor of every plane zeroed so all textures
    // start exactly at zero while still receiving gradient through v0.
    void init(Rng& rng, int plane_h, int plane_w, int plane_c, int hidden_width);
};

struct DecodeTrace {
    Vec3 n_center;
    bool bounds_clamped[3] = {false, false, false};
    Vec3 view_dir_unit = Vec3::Zero();
    VecX color_input, alpha_input;
    MlpTrace color_mlp, alpha_mlp;
};

// Decodes the CP texture factors for one splat. `view_dir` is normalized if
// needed (counted in diag). Time must be present iff field.time_dep.
LocalTexture decode_texture(const GlobalField& field, const Vec3& center, const Vec3& view_dir,
                            std::optional<double> time, TextureMode mode, int plane2d_index,
                            DecodeTrace* trace, StructHash* hash = nullptr,
                            RenderDiagnostics* diag = nullptr);

struct GlobalFieldGrads {
    std::array<std::vector<double>, 3> color_planes;
    std::array<std::vector<double>, 3> alpha_planes;
    std::vector<double> color_decoder;
    std::vector<double> alpha_decoder;

    void allocate(const GlobalField& field);
    void set_zero();
};

// Backward of decode_texture. Factor gradients follow the LocalTexture
// layout; returns gradients w.r.t. the raw center and the (pre-normalization)
// view direction direction vector.
void decode_texture_backward(const GlobalField& field, const LocalTexture& tex,
                             const DecodeTrace& trace, const double* grad_color_factors,
                             const double* grad_alpha_factors, GlobalFieldGrads& grads,
                             Vec3& grad_center, Vec3& grad_view_dir_unit);

}  // namespace nts
