#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "skodom/distributions.hpp"
#include "skodom/fourier.hpp"

namespace skodom {

struct BoundarySample {
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool diverged = false;
};

struct BoundaryCurve {
    std::vector<BoundarySample> samples;  // theta increasing over [-pi,pi]
    double abel_radius = 0.0;
    int grid_size = 0;
    double divergence_cap = 0.0;
};

// Truncated power series at z, |z| < 1.
std::complex<double> psi_eval(const FourierSeries& series, std::complex<double> z);

// Termwise derivative sum n*a_n z^{n-1}, |z| < 1.
std::complex<double> psi_derivative(const FourierSeries& series, std::complex<double> z);

// x = phi(theta) exactly; y from the Abel-summed conjugate series at radius r.
BoundarySample boundary_point(const FourierSeries& series, const Distribution& dist,
                              double theta, double abel_radius, double divergence_cap);

double default_divergence_cap(const Distribution& dist);
double default_abel_radius(const FourierSeries& series);

// Uniform grid over [-pi,pi]; grid_size odd so theta=0 is a node. Nodes with
// theta < 0 are reflections of the positive half.
BoundaryCurve trace(const FourierSeries& series, const Distribution& dist, int grid_size,
                    std::optional<double> abel_radius = std::nullopt,
                    std::optional<double> divergence_cap = std::nullopt);

// Hilbert transform of the periodic step 1_{|t| >= theta0}:
// (1/pi) log|sin(theta0/2 - x/2) / sin(theta0/2 + x/2)|. +-inf at x = +-theta0.
double hilbert_step(double theta0, double x);

// phi of an atomic mu as base + sum of steps alpha_i * 1_{|t| >= theta_i}.
struct StepProfile {
    double base = 0.0;
    std::vector<double> theta;  // strictly increasing in (0,pi)
    std::vector<double> alpha;  // jump heights, > 0

    double eval(double t) const;  // reconstructs phi(t)
};

StepProfile step_profile(const Distribution& dist);  // atomic kinds only

// sum_j alpha_j * hilbert_step(theta_j, x); the a.e. Abel limit of the
// conjugate series.
double hilbert_profile(const StepProfile& profile, double x);

// Derivative sign function of the profile's Hilbert transform:
// sum_i alpha_i (cot(theta_i/2 - x/2) + cot(theta_i/2 + x/2)).
double cot_sum(const StepProfile& profile, double x);

struct RayTip {
    double atom_x = 0.0;
    std::optional<double> critical_angle;  // none when the ray is infinite
    double tip_y = 0.0;                    // +inf for infinite rays
};

// One tip per atom: bisect the cot equation on each inter-step interval.
std::vector<RayTip> ray_tips(const StepProfile& profile);

struct SimplicityResult {
    bool simple = true;
    int first_segment = -1;  // indices of the first crossing pair
    int second_segment = -1;
};

// Segment-segment sweep over the non-diverged polyline pieces.
SimplicityResult simplicity_check(const BoundaryCurve& curve);

}  // namespace skodom
