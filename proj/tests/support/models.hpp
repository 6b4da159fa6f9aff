#pragma once

// Seeded fixtures shared by the unit tests and the acceptance binary.

#include <array>
#include <cmath>
#include <random>
#include <utility>

#include "cclab/double_fibration.hpp"
#include "cclab/submersion.hpp"
#include "cclab/synthetic.hpp"
#include "support/oracles.hpp"

namespace models {

inline constexpr std::array<std::pair<std::size_t, std::size_t>, 6> kSizes = {
    {{1, 2}, {2, 2}, {2, 3}, {3, 2}, {1, 3}, {3, 3}}};

inline std::pair<std::size_t, std::size_t> size_for(std::uint64_t seed) { return kSizes[seed % kSizes.size()]; }

/// General model: fiber depends on base, theta on everything, both warps.
inline cclab::SubmersionModel general(std::uint64_t seed, bool warp_h = true) {
  cclab::ModelOptions o;
  o.warp_h = warp_h;
  const auto [p, b] = size_for(seed);
  return cclab::random_model(p, b, 1000 + seed, o);
}

/// Flat fiber and theta(y): T = 0, A and its derivatives generic.
inline cclab::SubmersionModel totally_geodesic(std::uint64_t seed, double f_const) {
  cclab::ModelOptions o;
  o.fiber_amp = 0.0;
  o.theta_depends_on_fiber = false;
  o.warp_amp = 0.0;
  o.warp_h = false;
  const auto [p, b] = size_for(seed);
  cclab::SubmersionModel m = cclab::random_model(p, b, 5000 + seed, o);
  m.f = cclab::Jet(m.n(), f_const);
  return m;
}

inline double max_diff(const cclab::CurvatureTensor& a, const cclab::CurvatureTensor& b) {
  cclab::CurvatureTensor d = a;
  d -= b;
  return d.max_abs();
}

inline double rel_diff(const cclab::CurvatureTensor& a, const cclab::CurvatureTensor& b) {
  return max_diff(a, b) / std::max(1.0, std::max(a.max_abs(), b.max_abs()));
}

/// Hopf fibration S^3 -> S^2(1/2) with the fiber scaled by eps = e^f.
inline cclab::SubmersionPointData hopf_point() {
  cclab::SubmersionPointData d = cclab::SubmersionPointData::zeros(1, 2);
  d.rb = cclab::constant_curvature(2, 4.0);
  d.a(0, 0, 1) = 1.0;
  d.a(0, 1, 0) = -1.0;
  return d;
}

/// Random pointwise data with the required index symmetries and A = 0.
inline cclab::SubmersionPointData random_t_data(std::size_t p, std::size_t b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cclab::SubmersionPointData d = cclab::SubmersionPointData::zeros(p, b);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t al = 0; al < b; ++al)
      for (std::size_t j = i; j < p; ++j) d.t(i, al, j) = d.t(j, al, i) = u(rng);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t k = i; k < p; ++k) d.dt_vert(j, i, al, k) = d.dt_vert(j, k, al, i) = u(rng);
  for (std::size_t be = 0; be < b; ++be)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t al = 0; al < b; ++al)
        for (std::size_t k = i; k < p; ++k) d.dt_horiz(be, i, al, k) = d.dt_horiz(be, k, al, i) = u(rng);
  d.rv = oracle::random_curvature(p, rng);
  d.rb = oracle::random_curvature(b, rng);
  return d;
}

/// Torus, flat-fiber and round-fiber blocks over a 2-dimensional base; torus
/// and flat coordinates are affine.
inline cclab::DoubleModelOptions affine_options(bool torus_invariant = true) {
  cclab::DoubleModelOptions o;
  o.n_torus = 2;
  o.n_flat = 1;
  o.n_sym = 2;
  o.n_base = 2;
  o.torus_invariant = torus_invariant;
  return o;
}

inline cclab::DoubleFibrationData as_double(const cclab::SubmersionPointData& d, const cclab::DoubleModelOptions& o,
                                            double c = 0.0) {
  return {o.n_base, o.n_torus, o.n_flat + o.n_sym, d, c};
}

/// Adds e_j T^i_{al k} != 0 on torus triples and recomputes the covariant derivatives.
inline cclab::DoubleFibrationData perturbed_torus(const cclab::ModelReadout& rd, const cclab::DoubleModelOptions& o,
                                                  double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  cclab::FrameDerivatives raw = rd.raw;
  for (std::size_t j = 0; j < o.n_torus; ++j)
    for (std::size_t i = 0; i < o.n_torus; ++i)
      for (std::size_t al = 0; al < o.n_base; ++al)
        for (std::size_t k = i; k < o.n_torus; ++k) {
          const double v = u(rng);
          raw.et_vert(j, i, al, k) += v;
          if (k != i) raw.et_vert(j, k, al, i) += v;
        }
  cclab::SubmersionPointData d = rd.data;
  cclab::apply_derivatives(d, cclab::projected_connection_derivative(d, raw, rd.connection));
  return as_double(d, o);
}

/// Random composite data whose vertical curvature operator is bounded below by c^2 > 0.
inline cclab::DoubleFibrationData positive_fiber(std::size_t ni, std::size_t nI, std::size_t b, std::mt19937_64& rng) {
  cclab::SubmersionPointData d = random_t_data(ni + nI, b, rng);
  const cclab::CurvatureTensor noise = oracle::random_curvature(ni + nI, rng);
  const auto sp = cclab::curvature_spectrum(noise);
  const double spread = std::max(std::abs(sp.min()), std::abs(sp.max()));
  d.rv = cclab::constant_curvature(ni + nI, 1.0);
  if (spread > 0.0) d.rv += (0.6 / spread) * noise;
  cclab::DoubleFibrationData df{b, ni, nI, d, 0.0};
  df.c = std::sqrt(cclab::vertical_operator_min(df));
  return df;
}

}  // namespace models
