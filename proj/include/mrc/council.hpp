#pragma once

#include "mrc/types.hpp"

#include <array>
#include <span>

namespace mrc {

struct BlendConfig {
    double beta_s1_center = 0.90;
    double beta_s1_scale = 0.09;
    double beta_s1_tau = 0.075;
    double beta_gc_center = 0.15;
    double beta_gc_scale = 0.20;
    double beta_gc_tau = 0.10;
    double ema_build = 0.70;
    double ema_derisk = 0.78;
    double w_max = 0.40;
    double c_max = 0.30;

    void validate() const;
};

struct EnsembleValues {
    double stage1 = 0.0;
    double stage2 = 0.0;
};

struct BlendRatios {
    double beta_s1 = 0.0;
    double beta_gc = 0.0;
};

// Stage-1 values weighted by omega-tilde, Stage-2 values by p.
EnsembleValues ensemble_values(const Vector& omega_tilde, const Vector& pair_weights, const Vector& single_values,
                               const Vector& pair_values);

BlendRatios blend_ratios(const EnsembleValues& ens, double grand_value, const BlendConfig& cfg);

// beta_gc * (1/2 + kappa/2).
double divergence_discount(double beta_gc, double kappa);

// beta_gc * w_123 + (1 - beta_gc) [beta_s1 sum omega_i w_i + (1 - beta_s1) sum p_ij w_ij].
Portfolio compose_council(std::span<const Portfolio> stage1, std::span<const Portfolio> stage2, const Portfolio& grand,
                          const Vector& omega_tilde, const Vector& pair_weights, double beta_s1, double beta_gc_final);

// Coordinate-wise asymmetric blend before renormalisation.
Portfolio ema_blend(const Portfolio& target, const Portfolio& previous, double build, double derisk);

// ema_blend renormalised to unit mass.
Portfolio ema_smooth(const Portfolio& target, const Portfolio& previous, double build, double derisk);

// Proportional projection onto {w >= 0, sum w + c = 1, w_k <= w_max, c <= c_max}.
// Mass above a cap flows to uncapped assets in proportion to their weight;
// when every asset is capped the remainder goes to cash.
Portfolio project_constraints(const Portfolio& raw, double w_max, double c_max);

}  // namespace mrc
