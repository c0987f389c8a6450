#pragma once

#include "infoflow/credit.hpp"

namespace infoflow {

// Asset paying a single dividend X ~ prior at spec.T.
struct SingleDividendAsset {
    ContinuousDensity prior;
    InfoSpec spec;
    DiscountCurve curve;
};

// Gamma-family auxiliaries at (t, xi): A = sigma^2 t T/(T-t), B = sigma T xi/(T-t) - rate.
struct GammaAux {
    double A = 0.0, B = 0.0;
    std::vector<double> F; // F_k(-B/sqrt(A))
};

GammaAux gamma_aux(const SingleDividendAsset& asset, double t, double xi, int kmax);

double price_single_dividend(const SingleDividendAsset& asset, double t, double xi);
double price_exponential_closed(const SingleDividendAsset& asset, double t, double xi);

struct GammaPrice {
    double value = 0.0;
    bool closed_form = true; // false when the cancellation guard sent it to quadrature
};
GammaPrice price_gamma_closed(const SingleDividendAsset& asset, double t, double xi);

// Bridge-measure call on the asset, exercise at t, strike K.
double price_call_bridge_measure(const SingleDividendAsset& asset, double K, double t);
// Critical information value xi* with S_t(xi*) = K.
double critical_xi(const SingleDividendAsset& asset, double K, double t);

struct AssetDynamics {
    double price = 0.0;
    double drift = 0.0; // r_t S_t
    double vol = 0.0;   // Gamma_tT
};
AssetDynamics asset_dynamics_coeffs(const SingleDividendAsset& asset, double t, double xi);

struct BSRecovery {
    double price = 0.0;
    double vol = 0.0;
};

// Standard normal factor scaled to a log-normal dividend S0 exp(rT - nu^2 T/2 + nu sqrt(T) X).
BSRecovery bs_recovery_price(double S0, double r, double nu, double T, double sigma, double t, double xi);

} // namespace infoflow
