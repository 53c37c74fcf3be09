#pragma once

namespace kci::defaults {

inline constexpr int grid_n = 255;
inline constexpr double dt = 1e-3;
inline constexpr double blowup_threshold = 1e6;

inline constexpr double deadband_rel = 1e-6;      // zero-crossing dead band, relative to sup norm
inline constexpr double nondegeneracy_tol = 1e-10;
inline constexpr double region_tol = 1e-6;

inline constexpr double pullback_T0 = 5.0;        // base pullback depth
inline constexpr int pullback_depth = 6;
inline constexpr double pullback_gap_tol = 1e-6;

inline constexpr double minimize_grad_tol = 1e-8;
inline constexpr long minimize_max_iters = 100000;

inline constexpr int shoot_substeps = 16;         // RK4 substeps per grid interval

}  // namespace kci::defaults
