#include "ntsplat/neural_field.hpp"

#include <cmath>

namespace nts {

namespace {

constexpr int kPlaneAxes[3][2] = {{0, 1}, {0, 2}, {1, 2}};

struct Cell {
    int i0;
    double frac;
};

inline Cell cell_setup(double coord, int extent) {
    if (extent == 1) return {0, 0.0};
    int i0 = static_cast<int>(std::floor(coord));
    if (i0 > extent - 2) i0 = extent - 2;
    if (i0 < 0) i0 = 0;
    return {i0, coord - i0};
}

// Positional encoding [x, sin(2^l pi x), cos(2^l pi x)] for l in [0, bands).
void encode_scalar(double x, bool enabled, int bands, std::vector<double>& out) {
    out.push_back(x);
    if (!enabled) return;
    double freq = M_PI;
    for (int l = 0; l < bands; ++l) {
        out.push_back(std::sin(freq * x));
        out.push_back(std::cos(freq * x));
        freq *= 2.0;
    }
}

// dL/dx given gradient over the encoded block; returns entries consumed.
double encode_scalar_backward(double x, bool enabled, int bands, const double* grad, int& used) {
    double gx = grad[0];
    used = 1;
    if (!enabled) return gx;
    double freq = M_PI;
    for (int l = 0; l < bands; ++l) {
        gx += grad[used] * freq * std::cos(freq * x);
        gx -= grad[used + 1] * freq * std::sin(freq * x);
        used += 2;
        freq *= 2.0;
    }
    return gx;
}

}  // namespace

void plane_sample(const std::vector<double>& plane, int height, int width, int channels, double a,
                  double b, double* out, StructHash* hash) {
    const double u = (a + 1.0) * 0.5 * (width - 1);
    const double v = (b + 1.0) * 0.5 * (height - 1);
    const Cell cu = cell_setup(u, width);
    const Cell cv = cell_setup(v, height);
    if (hash) {
        hash->add_int(cu.i0);
        hash->add_int(cv.i0);
    }
    const int u1 = width == 1 ? 0 : cu.i0 + 1;
    const int v1 = height == 1 ? 0 : cv.i0 + 1;
    const double w00 = (1 - cu.frac) * (1 - cv.frac);
    const double w10 = cu.frac * (1 - cv.frac);
    const double w01 = (1 - cu.frac) * cv.frac;
    const double w11 = cu.frac * cv.frac;
    const size_t r0 = (static_cast<size_t>(cv.i0) * width + cu.i0) * channels;
    const size_t r1 = (static_cast<size_t>(cv.i0) * width + u1) * channels;
    const size_t r2 = (static_cast<size_t>(v1) * width + cu.i0) * channels;
    const size_t r3 = (static_cast<size_t>(v1) * width + u1) * channels;
    for (int c = 0; c < channels; ++c)
        out[c] = w00 * plane[r0 + c] + w10 * plane[r1 + c] + w01 * plane[r2 + c] + w11 * plane[r3 + c];
}

void plane_sample_backward(const std::vector<double>& plane, int height, int width, int channels,
                           double a, double b, const double* grad_out, double* grad_plane,
                           double& grad_a, double& grad_b) {
    const double u = (a + 1.0) * 0.5 * (width - 1);
    const double v = (b + 1.0) * 0.5 * (height - 1);
    const Cell cu = cell_setup(u, width);
    const Cell cv = cell_setup(v, height);
    const int u1 = width == 1 ? 0 : cu.i0 + 1;
    const int v1 = height == 1 ? 0 : cv.i0 + 1;
    const double du_da = 0.5 * (width - 1);
    const double dv_db = 0.5 * (height - 1);
    const size_t r0 = (static_cast<size_t>(cv.i0) * width + cu.i0) * channels;
    const size_t r1 = (static_cast<size_t>(cv.i0) * width + u1) * channels;
    const size_t r2 = (static_cast<size_t>(v1) * width + cu.i0) * channels;
    const size_t r3 = (static_cast<size_t>(v1) * width + u1) * channels;
    for (int c = 0; c < channels; ++c) {
        const double g = grad_out[c];
        if (g == 0.0) continue;
        grad_plane[r0 + c] += g * (1 - cu.frac) * (1 - cv.frac);
        grad_plane[r1 + c] += g * cu.frac * (1 - cv.frac);
        grad_plane[r2 + c] += g * (1 - cu.frac) * cv.frac;
        grad_plane[r3 + c] += g * cu.frac * cv.frac;
        const double p00 = plane[r0 + c], p10 = plane[r1 + c];
        const double p01 = plane[r2 + c], p11 = plane[r3 + c];
        grad_a += g * ((1 - cv.frac) * (p10 - p00) + cv.frac * (p11 - p01)) * du_da;
        grad_b += g * ((1 - cu.frac) * (p01 - p00) + cu.frac * (p11 - p10)) * dv_db;
    }
}

VecX global_feature(const TriPlane& planes, const Vec3& n_center, StructHash* hash) {
    VecX feat(planes.feature_size());
    for (int p = 0; p < 3; ++p)
        plane_sample(planes.data[p], planes.height, planes.width, planes.channels,
                     n_center[kPlaneAxes[p][0]], n_center[kPlaneAxes[p][1]],
                     feat.data() + p * planes.channels, hash);
    return feat;
}

void global_feature_backward(const TriPlane& planes, const Vec3& n_center, const VecX& grad_feat,
                             std::array<std::vector<double>, 3>& grad_planes, Vec3& grad_n_center) {
    for (int p = 0; p < 3; ++p) {
        double ga = 0.0, gb = 0.0;
        plane_sample_backward(planes.data[p], planes.height, planes.width, planes.channels,
                              n_center[kPlaneAxes[p][0]], n_center[kPlaneAxes[p][1]],
                              grad_feat.data() + p * planes.channels, grad_planes[p].data(), ga, gb);
        grad_n_center[kPlaneAxes[p][0]] += ga;
        grad_n_center[kPlaneAxes[p][1]] += gb;
    }
}

void mlp_init(Mlp& mlp, Rng& rng, const std::vector<std::pair<int, int>>& zero_rows,
              double small_row_scale) {
    mlp.params.assign(mlp.param_count(), 0.0);
    double* w1 = mlp.params.data() + mlp.w1();
    double* w2 = mlp.params.data() + mlp.w2();
    double* w3 = mlp.params.data() + mlp.w3();

    if (mlp.activation == Mlp::Activation::rectifier) {
        const double a1 = std::sqrt(6.0 / mlp.in_dim);
        const double a2 = std::sqrt(6.0 / mlp.hidden);
        for (int i = 0; i < mlp.hidden * mlp.in_dim; ++i) w1[i] = rng.uniform(-a1, a1);
        for (int i = 0; i < mlp.hidden * mlp.hidden; ++i) w2[i] = rng.uniform(-a2, a2);
    } else {
        // Sinusoidal network: first layer U(-1/in, 1/in), later layers scaled
        // by 1/omega0 so activations stay in the sine's expressive range.
        const double a1 = 1.0 / mlp.in_dim;
        const double a2 = std::sqrt(6.0 / mlp.hidden) / mlp.omega0;
        for (int i = 0; i < mlp.hidden * mlp.in_dim; ++i) w1[i] = rng.uniform(-a1, a1);
        for (int i = 0; i < mlp.hidden * mlp.hidden; ++i) w2[i] = rng.uniform(-a2, a2);
    }

    for (int i = 0; i < mlp.out_dim * mlp.hidden; ++i)
        w3[i] = rng.uniform(-small_row_scale, small_row_scale);
    for (const auto& [begin, end] : zero_rows)
        for (int r = begin; r < end; ++r)
            for (int c = 0; c < mlp.hidden; ++c) w3[static_cast<size_t>(r) * mlp.hidden + c] = 0.0;
}

void mlp_forward(const Mlp& mlp, const VecX& input, VecX& output, MlpTrace* trace,
                 StructHash* hash) {
    require(input.size() == mlp.in_dim, "mlp_forward: input dimension mismatch");
    MlpTrace local;
    MlpTrace& t = trace ? *trace : local;
    t.input = input;

    const double* w1 = mlp.params.data() + mlp.w1();
    const double* b1 = mlp.params.data() + mlp.b1();
    const double* w2 = mlp.params.data() + mlp.w2();
    const double* b2 = mlp.params.data() + mlp.b2();
    const double* w3 = mlp.params.data() + mlp.w3();
    const double* b3 = mlp.params.data() + mlp.b3();

    auto affine = [](const double* w, const double* b, const VecX& x, int out_dim, VecX& z) {
        const int in_dim = static_cast<int>(x.size());
        z.resize(out_dim);
        for (int i = 0; i < out_dim; ++i) {
            double acc = b[i];
            const double* row = w + static_cast<size_t>(i) * in_dim;
            for (int j = 0; j < in_dim; ++j) acc += row[j] * x[j];
            z[i] = acc;
        }
    };

    auto activate = [&](const VecX& z, VecX& h) {
        h.resize(z.size());
        if (mlp.activation == Mlp::Activation::rectifier) {
            for (int i = 0; i < z.size(); ++i) {
                h[i] = z[i] > 0.0 ? z[i] : 0.0;
                if (hash) hash->add_bool(z[i] > 0.0);
            }
        } else {
            for (int i = 0; i < z.size(); ++i) h[i] = std::sin(mlp.omega0 * z[i]);
        }
    };

    affine(w1, b1, t.input, mlp.hidden, t.z1);
    activate(t.z1, t.h1);
    affine(w2, b2, t.h1, mlp.hidden, t.z2);
    activate(t.z2, t.h2);
    affine(w3, b3, t.h2, mlp.out_dim, output);
}

void mlp_backward(const Mlp& mlp, const MlpTrace& trace, const VecX& grad_output,
                  double* grad_params, VecX& grad_input) {
    const double* w2 = mlp.params.data() + mlp.w2();
    const double* w3 = mlp.params.data() + mlp.w3();
    double* gw1 = grad_params + mlp.w1();
    double* gb1 = grad_params + mlp.b1();
    double* gw2 = grad_params + mlp.w2();
    double* gb2 = grad_params + mlp.b2();
    double* gw3 = grad_params + mlp.w3();
    double* gb3 = grad_params + mlp.b3();

    auto act_grad = [&](const VecX& z, const VecX& gh, VecX& gz) {
        gz.resize(z.size());
        if (mlp.activation == Mlp::Activation::rectifier) {
            for (int i = 0; i < z.size(); ++i) gz[i] = z[i] > 0.0 ? gh[i] : 0.0;
        } else {
            for (int i = 0; i < z.size(); ++i)
                gz[i] = gh[i] * mlp.omega0 * std::cos(mlp.omega0 * z[i]);
        }
    };

    // Output layer.
    VecX gh2 = VecX::Zero(mlp.hidden);
    for (int i = 0; i < mlp.out_dim; ++i) {
        const double g = grad_output[i];
        gb3[i] += g;
        if (g == 0.0) continue;
        const double* row = w3 + static_cast<size_t>(i) * mlp.hidden;
        double* grow = gw3 + static_cast<size_t>(i) * mlp.hidden;
        for (int j = 0; j < mlp.hidden; ++j) {
            grow[j] += g * trace.h2[j];
            gh2[j] += g * row[j];
        }
    }

    VecX gz2;
    act_grad(trace.z2, gh2, gz2);
    VecX gh1 = VecX::Zero(mlp.hidden);
    for (int i = 0; i < mlp.hidden; ++i) {
        const double g = gz2[i];
        gb2[i] += g;
        if (g == 0.0) continue;
        const double* row = w2 + static_cast<size_t>(i) * mlp.hidden;
        double* grow = gw2 + static_cast<size_t>(i) * mlp.hidden;
        for (int j = 0; j < mlp.hidden; ++j) {
            grow[j] += g * trace.h1[j];
            gh1[j] += g * row[j];
        }
    }

    VecX gz1;
    act_grad(trace.z1, gh1, gz1);
    const int in_dim = mlp.in_dim;
    grad_input = VecX::Zero(in_dim);
    const double* w1 = mlp.params.data() + mlp.w1();
    for (int i = 0; i < mlp.hidden; ++i) {
        const double g = gz1[i];
        gb1[i] += g;
        if (g == 0.0) continue;
        const double* row = w1 + static_cast<size_t>(i) * in_dim;
        double* grow = gw1 + static_cast<size_t>(i) * in_dim;
        for (int j = 0; j < in_dim; ++j) {
            grow[j] += g * trace.input[j];
            grad_input[j] += g * row[j];
        }
    }
}

void GlobalField::init(Rng& rng, int plane_h, int plane_w, int plane_c, int hidden_width) {
    color_planes.height = alpha_planes.height = plane_h;
    color_planes.width = alpha_planes.width = plane_w;
    color_planes.channels = alpha_planes.channels = plane_c;
    color_planes.allocate();
    alpha_planes.allocate();
    for (auto* stack : {&color_planes, &alpha_planes})
        for (auto& p : stack->data)
            for (auto& v : p) v = rng.uniform(-1e-2, 1e-2);

    color_decoder.activation = Mlp::Activation::rectifier;
    color_decoder.hidden = hidden_width;
    color_decoder.in_dim = color_in_dim();
    color_decoder.out_dim = color_factor_count(tau);
    alpha_decoder.activation = Mlp::Activation::sine;
    alpha_decoder.hidden = hidden_width;
    alpha_decoder.in_dim = alpha_in_dim();
    alpha_decoder.out_dim = alpha_factor_count(tau);

    // Zero the v1 half of every factor pair.
    std::vector<std::pair<int, int>> color_zero, alpha_zero;
    for (int p = 0; p < 3; ++p) {
        color_zero.emplace_back((2 * p + 1) * 3 * tau, (2 * p + 2) * 3 * tau);
        alpha_zero.emplace_back((2 * p + 1) * tau, (2 * p + 2) * tau);
    }
    mlp_init(color_decoder, rng, color_zero, 1e-2);
    mlp_init(alpha_decoder, rng, alpha_zero, 1e-2);
}

namespace {

void build_inputs(const GlobalField& field, const Vec3& n_center, const Vec3& view_unit,
                  std::optional<double> time, const VecX& color_feat, const VecX& alpha_feat,
                  VecX& color_input, VecX& alpha_input) {
    std::vector<double> pos_enc;
    for (int i = 0; i < 3; ++i)
        encode_scalar(n_center[i], field.freq_encoding, field.freq_bands, pos_enc);
    std::vector<double> time_enc;
    if (field.time_dep) encode_scalar(*time, field.freq_encoding, field.freq_bands, time_enc);

    color_input.resize(field.color_in_dim());
    int k = 0;
    for (int i = 0; i < color_feat.size(); ++i) color_input[k++] = color_feat[i];
    for (double v : pos_enc) color_input[k++] = v;
    for (int i = 0; i < 3; ++i) color_input[k++] = field.view_dep ? view_unit[i] : 0.0;
    for (double v : time_enc) color_input[k++] = v;

    alpha_input.resize(field.alpha_in_dim());
    k = 0;
    for (int i = 0; i < alpha_feat.size(); ++i) alpha_input[k++] = alpha_feat[i];
    for (double v : pos_enc) alpha_input[k++] = v;
    for (double v : time_enc) alpha_input[k++] = v;
}

}  // namespace

LocalTexture decode_texture(const GlobalField& field, const Vec3& center, const Vec3& view_dir,
                            std::optional<double> time, TextureMode mode, int plane2d_index,
                            DecodeTrace* trace, StructHash* hash, RenderDiagnostics* diag) {
    require(mode != TextureMode::disabled, "decode_texture: texture mode is disabled");
    if (field.time_dep) require(time.has_value(), "decode_texture: dynamic field requires a time value");

    DecodeTrace local;
    DecodeTrace& t = trace ? *trace : local;

    Vec3 view_unit = Vec3::Zero();
    if (field.view_dep) {
        const double n = view_dir.norm();
        require(n > 0.0 && std::isfinite(n), "decode_texture: invalid view direction");
        if (std::abs(n - 1.0) > 1e-9 && diag) ++diag->non_unit_view_dirs;
        view_unit = view_dir / n;
    }
    t.view_dir_unit = view_unit;
    t.n_center = field.bounds.normalize(center, t.bounds_clamped);
    if (hash)
        for (bool c : t.bounds_clamped) hash->add_bool(c);

    const VecX color_feat = global_feature(field.color_planes, t.n_center, hash);
    const VecX alpha_feat = global_feature(field.alpha_planes, t.n_center, hash);
    build_inputs(field, t.n_center, view_unit, time, color_feat, alpha_feat, t.color_input,
                 t.alpha_input);

    VecX color_out, alpha_out;
    mlp_forward(field.color_decoder, t.color_input, color_out, trace ? &t.color_mlp : nullptr, hash);
    mlp_forward(field.alpha_decoder, t.alpha_input, alpha_out, trace ? &t.alpha_mlp : nullptr, hash);

    LocalTexture tex = LocalTexture::zeros(mode, field.tau, plane2d_index);
    if (mode == TextureMode::plane2d) {
        const int p = plane2d_index;
        tex.color.segment(2 * p * 3 * field.tau, 6 * field.tau) =
            color_out.segment(2 * p * 3 * field.tau, 6 * field.tau);
        tex.alpha.segment(2 * p * field.tau, 2 * field.tau) =
            alpha_out.segment(2 * p * field.tau, 2 * field.tau);
    } else {
        tex.color = color_out;
        tex.alpha = alpha_out;
    }
    return tex;
}

void GlobalFieldGrads::allocate(const GlobalField& field) {
    for (auto& p : color_planes) p.assign(field.color_planes.plane_size(), 0.0);
    for (auto& p : alpha_planes) p.assign(field.alpha_planes.plane_size(), 0.0);
    color_decoder.assign(field.color_decoder.param_count(), 0.0);
    alpha_decoder.assign(field.alpha_decoder.param_count(), 0.0);
}

void GlobalFieldGrads::set_zero() {
    for (auto& p : color_planes) std::fill(p.begin(), p.end(), 0.0);
    for (auto& p : alpha_planes) std::fill(p.begin(), p.end(), 0.0);
    std::fill(color_decoder.begin(), color_decoder.end(), 0.0);
    std::fill(alpha_decoder.begin(), alpha_decoder.end(), 0.0);
}

void decode_texture_backward(const GlobalField& field, const LocalTexture& tex,
                             const DecodeTrace& trace, const double* grad_color_factors,
                             const double* grad_alpha_factors, GlobalFieldGrads& grads,
                             Vec3& grad_center, Vec3& grad_view_dir_unit) {
    const int tau = field.tau;

    // Mask out planes the forward pass zeroed (plane2d mode).
    VecX g_color = VecX::Zero(color_factor_count(tau));
    VecX g_alpha = VecX::Zero(alpha_factor_count(tau));
    if (tex.mode == TextureMode::plane2d) {
        const int p = tex.plane2d_index;
        for (int i = 0; i < 6 * tau; ++i)
            g_color[2 * p * 3 * tau + i] = grad_color_factors[2 * p * 3 * tau + i];
        for (int i = 0; i < 2 * tau; ++i)
            g_alpha[2 * p * tau + i] = grad_alpha_factors[2 * p * tau + i];
    } else {
        for (int i = 0; i < g_color.size(); ++i) g_color[i] = grad_color_factors[i];
        for (int i = 0; i < g_alpha.size(); ++i) g_alpha[i] = grad_alpha_factors[i];
    }

    VecX g_color_in, g_alpha_in;
    mlp_backward(field.color_decoder, trace.color_mlp, g_color, grads.color_decoder.data(),
                 g_color_in);
    mlp_backward(field.alpha_decoder, trace.alpha_mlp, g_alpha, grads.alpha_decoder.data(),
                 g_alpha_in);

    const int c_feat = field.color_planes.feature_size();
    const int a_feat = field.alpha_planes.feature_size();
    const int pos_dim = field.encoded_pos_dim();

    Vec3 g_ncenter = Vec3::Zero();
    global_feature_backward(field.color_planes, trace.n_center, g_color_in.head(c_feat),
                            grads.color_planes, g_ncenter);
    global_feature_backward(field.alpha_planes, trace.n_center, g_alpha_in.head(a_feat),
                            grads.alpha_planes, g_ncenter);

    // Position slots of both decoder inputs.
    {
        const int per_comp = pos_dim / 3;
        for (int i = 0; i < 3; ++i) {
            int used = 0;
            g_ncenter[i] += encode_scalar_backward(trace.n_center[i], field.freq_encoding,
                                                   field.freq_bands,
                                                   g_color_in.data() + c_feat + i * per_comp, used);
            g_ncenter[i] += encode_scalar_backward(trace.n_center[i], field.freq_encoding,
                                                   field.freq_bands,
                                                   g_alpha_in.data() + a_feat + i * per_comp, used);
        }
    }

    // View slot (color decoder only); project through the normalization.
    if (field.view_dep) {
        Vec3 g_slot(g_color_in[c_feat + pos_dim], g_color_in[c_feat + pos_dim + 1],
                    g_color_in[c_feat + pos_dim + 2]);
        const Vec3& n = trace.view_dir_unit;
        grad_view_dir_unit += g_slot - n * n.dot(g_slot);
    }

    // Bounds normalization: linear inside the box, zero where clamped.
    const Vec3 jac = field.bounds.normalize_jacobian_diag(trace.bounds_clamped);
    grad_center += (g_ncenter.array() * jac.array()).matrix();
}

}  // namespace nts
