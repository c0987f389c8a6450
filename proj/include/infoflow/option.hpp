#pragma once

#include "infoflow/credit.hpp"

namespace infoflow {

// European call with strike K, exercise date t, on the bond paying the
// payoff at spec.T.
struct OptionSpec {
    double K = 0.0;
    double t = 0.0;
    DiscretePayoff payoff;
    InfoSpec spec;
    DiscountCurve curve;

    void validate() const;
};

enum class CallBranch { in_the_money, out_of_the_money, interior };
const char* branch_name(CallBranch b);

// Which of the three strike regimes applies, relative to P_tT h_0 and P_tT h_n.
CallBranch call_branch(const OptionSpec& opt);

double price_binary_call(const OptionSpec& opt);
double price_multirecovery_call(const OptionSpec& opt);

// Root of sum p_i (P_tT h_i - K) exp[T/(T-t)(sigma h_i x - sigma^2 h_i^2 t / 2)] in x.
double critical_information(const OptionSpec& opt);

// C_s given xi_s, 0 <= s <= t, binary underlying.
double option_price_process(const OptionSpec& opt, double s, double xi_s);

struct OptionGreeks {
    double vega = 0.0;
    double delta = 0.0; // dC_0 / dB_0T
};

OptionGreeks greeks(const OptionSpec& opt);

} // namespace infoflow
