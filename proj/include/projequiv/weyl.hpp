#pragma once

#include "projequiv/metric.hpp"

namespace projequiv {

// Projective Weyl curvature:
//   W^i_{jkl} = R^i_{jkl} - (1/(d-1)) (delta^i_k Ric_{jl} - delta^i_l Ric_{jk})
// It is invariant under connection changes that preserve unparameterized
// geodesics; for d >= 3 it vanishes exactly on the charts that are
// projectively flat. Requires d >= 3 (DimensionTooLow below that).
struct WeylField {
  std::function<Tensor4(const Point&)> eval;
};

WeylField projective_weyl(const CurvatureData& curv, const Metric& m);

// Max over a sample grid of the two traces W^i_{jil} and W^i_{ikl}; both are
// zero for the exact tensor, so this bounds assembly error.
double weyl_trace_defect(const WeylField& w, const ChartDomain& domain, int per_axis = 4,
                         double margin = 0.0);

// Compares two evaluation paths for g(W(u, v)w, z) on random orthonormal
// frames: contraction of the assembled coordinate tensor versus the direct
// frame expression
//   g(R(u,v)w, z) + (1/(d-1)) [g(z,v) Ric(w,u) - g(z,u) Ric(w,v)].
// Returns the max absolute disagreement.
double weyl_frame_agreement(const Metric& m, const FDConfig& cfg = {}, int per_axis = 3,
                            int frames_per_point = 2, std::uint64_t seed = 0xF7A3u);

// Projective flatness probe. For d >= 3 the verdict is
//   max |W| < tol  and  variance of sampled sectional curvatures < var_tol;
// for d = 2 (where W vanishes identically) only the variance test applies.
struct FlatnessReport {
  int dim = 0;
  double max_weyl = 0.0;            // 0 when d = 2
  double curvature_variance = 0.0;  // population variance of sampled K(u, v)
  double tol = 0.0;
  double var_tol = 0.0;
  bool flat = false;
};

FlatnessReport flatness_test(const Metric& m, double tol = 1e-5, const FDConfig& cfg = {},
                             int per_axis = 0);

}  // namespace projequiv
