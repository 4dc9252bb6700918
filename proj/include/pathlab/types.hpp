#pragma once

#include <Eigen/Dense>

namespace pathlab {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxAmbient = 6;
inline constexpr int kMaxFactors = 4;

// Fixed-capacity dynamic shapes: no heap traffic inside the per-step loops.
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using VecA = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using MatA = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient>;
using FrameMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxDim>;

}  // namespace pathlab
