#pragma once

#include "ntsplat/types.hpp"

namespace nts {

inline constexpr int kMaxShDegree = 3;

inline int sh_basis_size(int degree) { return (degree + 1) * (degree + 1); }

// Real SH basis values for a unit direction, 3DGS ordering and constants.
void sh_basis(int degree, const Vec3& dir, double* out);

// Per-basis gradients w.r.t. the (unit) direction; out is basis_size x 3 row-major.
void sh_basis_gradient(int degree, const Vec3& dir, double* out);

struct ShColor {
    Vec3 rgb;
    bool clamped[3];  // channel pinned at zero
};

// color_ch = max(0, 0.5 + sum_i basis_i * coeffs[i*3+ch])
ShColor sh_color(int degree, const Vec3& dir, const double* coeffs);

// Accumulates dL/dcoeffs and dL/ddir given dL/drgb; clamped channels carry
// subgradient zero.
void sh_color_backward(int degree, const Vec3& dir, const double* coeffs, const ShColor& fwd,
                       const Vec3& grad_rgb, double* grad_coeffs, Vec3& grad_dir);

}  // namespace nts
