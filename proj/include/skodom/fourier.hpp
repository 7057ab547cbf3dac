#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "skodom/distributions.hpp"

namespace skodom {

enum class CoeffMethod { AnalyticStep, AnalyticUniform, AnalyticCantor, Quadrature };

const char* coeff_method_name(CoeffMethod m);

// Truncated cosine coefficients a_0..a_N of phi; equivalently the power
// series coefficients of the disc map psi.
struct FourierSeries {
    std::vector<double> coeffs;  // a_0 .. a_N
    CoeffMethod method = CoeffMethod::Quadrature;
    double tail_estimate = 0.0;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    double a(int n) const { return coeffs.at(static_cast<size_t>(n)); }

    // First min(order, m)+1 coefficients; used to cap simulation cost.
    FourierSeries truncated(int m) const;
};

struct QuadratureError : std::runtime_error {
    double achieved_tolerance;
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
};

// Dispatches to the analytic path per distribution kind.
FourierSeries cosine_coefficients(const Distribution& dist, int N);

// Quadrature path, available for every kind; the independent route used to
// cross-check the analytic formulas.
FourierSeries cosine_coefficients_quadrature(const Distribution& dist, int N,
                                             double abs_tol = 1e-12);

// E_z T = (1/2) sum_{n>=1} a_n^2.
double expected_exit_time(const FourierSeries& series);

// Var mu - (1/2) sum a_n^2: the truncation-quality diagnostic.
double parseval_gap(const Distribution& dist, const FourierSeries& series);

// psi(0) = (a_0, 0).
std::array<double, 2> start_point(const FourierSeries& series);

// Rows "n,a_n" at 17 significant digits with a metadata header line.
void write_coeffs_csv(const FourierSeries& series, const std::string& path);

}  // namespace skodom
