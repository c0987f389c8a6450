#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace infoflow {

enum class Errc {
    invalid_input,
    maturity_singularity,
    divergence,
    no_solution,
    degenerate,
    greeks_undefined,
    unsupported,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc c);

// Relative distance from maturity inside which conditional formulas refuse to evaluate.
inline constexpr double kMaturityEps = 1e-9;

// Throws maturity_singularity when t is within kMaturityEps*T of T, invalid_input when t < 0.
void check_before_maturity(double t, double T, const char* where);

// Standard normal helpers. norm_cdf uses erfc so the absolute error stays at the
// double rounding level across the whole real line.
double norm_pdf(double x);
double norm_cdf(double x);
// phi(z)/N(z), stable for very negative z.
double inv_mills(double z);

// Adaptive Gauss-Kronrod on [a, b]; the tolerance is relative to the L1 norm.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// Integral over consecutive breakpoints. The tolerance is relative to the L1
// norm over the whole range, so pieces that carry a negligible share of the
// mass are not refined on their own account.
double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& pts,
                        double rel_tol = 1e-10);

// log(sum(exp(v)))
double log_sum_exp(const std::vector<double>& v);

// Number of worker threads, from INFOFLOW_THREADS when set.
unsigned worker_count();

// Splits [0, n) into contiguous blocks and runs fn(begin, end) on worker threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace infoflow
