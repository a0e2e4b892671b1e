#include "ntsplat/sh.hpp"

namespace nts {

namespace {
constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
}  // namespace

void sh_basis(int degree, const Vec3& dir, double* out) {
    require(degree >= 0 && degree <= kMaxShDegree, "sh_basis: degree out of range");
    const double x = dir[0], y = dir[1], z = dir[2];
    out[0] = kC0;
    if (degree < 1) return;
    out[1] = -kC1 * y;
    out[2] = kC1 * z;
    out[3] = -kC1 * x;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    out[4] = kC2[0] * x * y;
    out[5] = kC2[1] * y * z;
    out[6] = kC2[2] * (2 * zz - xx - yy);
    out[7] = kC2[3] * x * z;
    out[8] = kC2[4] * (xx - yy);
    if (degree < 3) return;
    out[9] = kC3[0] * y * (3 * xx - yy);
    out[10] = kC3[1] * x * y * z;
    out[11] = kC3[2] * y * (4 * zz - xx - yy);
    out[12] = kC3[3] * z * (2 * zz - 3 * xx - 3 * yy);
    out[13] = kC3[4] * x * (4 * zz - xx - yy);
    out[14] = kC3[5] * z * (xx - yy);
    out[15] = kC3[6] * x * (xx - yy);
}

void sh_basis_gradient(int degree, const Vec3& dir, double* out) {
    const double x = dir[0], y = dir[1], z = dir[2];
    auto row = [&](int i) { return out + 3 * i; };
    row(0)[0] = row(0)[1] = row(0)[2] = 0.0;
    if (degree < 1) return;
    row(1)[0] = 0;        row(1)[1] = -kC1;  row(1)[2] = 0;
    row(2)[0] = 0;        row(2)[1] = 0;     row(2)[2] = kC1;
    row(3)[0] = -kC1;     row(3)[1] = 0;     row(3)[2] = 0;
    if (degree < 2) return;
    const double xx = x * x, yy = y * y, zz = z * z;
    row(4)[0] = kC2[0] * y;    row(4)[1] = kC2[0] * x;    row(4)[2] = 0;
    row(5)[0] = 0;             row(5)[1] = kC2[1] * z;    row(5)[2] = kC2[1] * y;
    row(6)[0] = -2 * kC2[2] * x; row(6)[1] = -2 * kC2[2] * y; row(6)[2] = 4 * kC2[2] * z;
    row(7)[0] = kC2[3] * z;    row(7)[1] = 0;             row(7)[2] = kC2[3] * x;
    row(8)[0] = 2 * kC2[4] * x; row(8)[1] = -2 * kC2[4] * y; row(8)[2] = 0;
    if (degree < 3) return;
    row(9)[0] = kC3[0] * 6 * x * y;
    row(9)[1] = kC3[0] * (3 * xx - 3 * yy);
    row(9)[2] = 0;
    row(10)[0] = kC3[1] * y * z;
    row(10)[1] = kC3[1] * x * z;
    row(10)[2] = kC3[1] * x * y;
    row(11)[0] = kC3[2] * -2 * x * y;
    row(11)[1] = kC3[2] * (4 * zz - xx - 3 * yy);
    row(11)[2] = kC3[2] * 8 * y * z;
    row(12)[0] = kC3[3] * -6 * x * z;
    row(12)[1] = kC3[3] * -6 * y * z;
    row(12)[2] = kC3[3] * (6 * zz - 3 * xx - 3 * yy);
    row(13)[0] = kC3[4] * (4 * zz - 3 * xx - yy);
    row(13)[1] = kC3[4] * -2 * x * y;
    row(13)[2] = kC3[4] * 8 * x * z;
    row(14)[0] = kC3[5] * 2 * x * z;
    row(14)[1] = kC3[5] * -2 * y * z;
    row(14)[2] = kC3[5] * (xx - yy);
    row(15)[0] = kC3[6] * (3 * xx - 3 * yy);
    row(15)[1] = kC3[6] * -2 * x * y;
    row(15)[2] = 0;
}

ShColor sh_color(int degree, const Vec3& dir, const double* coeffs) {
    double basis[16];
    sh_basis(degree, dir, basis);
    const int n = sh_basis_size(degree);
    ShColor out;
    for (int ch = 0; ch < 3; ++ch) {
        double v = 0.5;
        for (int i = 0; i < n; ++i) v += basis[i] * coeffs[i * 3 + ch];
        out.clamped[ch] = v < 0.0;
        out.rgb[ch] = out.clamped[ch] ? 0.0 : v;
    }
    return out;
}

void sh_color_backward(int degree, const Vec3& dir, const double* coeffs, const ShColor& fwd,
                       const Vec3& grad_rgb, double* grad_coeffs, Vec3& grad_dir) {
    double basis[16];
    double dbasis[16 * 3];
    sh_basis(degree, dir, basis);
    sh_basis_gradient(degree, dir, dbasis);
    const int n = sh_basis_size(degree);
    for (int ch = 0; ch < 3; ++ch) {
        if (fwd.clamped[ch]) continue;
        const double g = grad_rgb[ch];
        if (g == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            grad_coeffs[i * 3 + ch] += g * basis[i];
            const double c = coeffs[i * 3 + ch];
            grad_dir[0] += g * c * dbasis[3 * i + 0];
            grad_dir[1] += g * c * dbasis[3 * i + 1];
            grad_dir[2] += g * c * dbasis[3 * i + 2];
        }
    }
}

}  // namespace nts
