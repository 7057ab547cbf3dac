#include "skodom/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace skodom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> z) {
    std::complex<double> acc = coeffs.back();
    for (size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

}  // namespace

std::complex<double> psi_eval(const FourierSeries& series, std::complex<double> z) {
    if (std::abs(z) >= 1.0) throw std::domain_error("psi_eval: |z| must be < 1");
    return horner(series.coeffs, z);
}

std::complex<double> psi_derivative(const FourierSeries& series, std::complex<double> z) {
    if (std::abs(z) >= 1.0) throw std::domain_error("psi_derivative: |z| must be < 1");
    const int N = series.order();
    if (N < 1) return 0.0;
    std::complex<double> acc = static_cast<double>(N) * series.a(N);
    for (int n = N - 1; n >= 1; --n) acc = acc * z + static_cast<double>(n) * series.a(n);
    return acc;
}

double default_divergence_cap(const Distribution& dist) {
    return 1e3 * (1.0 + std::sqrt(dist.variance()));
}

double default_abel_radius(const FourierSeries& series) {
    return 1.0 - 1.0 / static_cast<double>(std::max(series.order(), 2));
}

BoundarySample boundary_point(const FourierSeries& series, const Distribution& dist,
                              double theta, double abel_radius, double divergence_cap) {
    BoundarySample s;
    s.theta = theta;
    s.x = dist.unbounded_support() ? dist.phi_clipped(theta) : dist.phi(theta);
    const std::complex<double> w = std::polar(abel_radius, theta);
    s.y = horner(series.coeffs, w).imag();
    s.diverged = !std::isfinite(s.x) || !std::isfinite(s.y) || std::abs(s.y) > divergence_cap;
    return s;
}

BoundaryCurve trace(const FourierSeries& series, const Distribution& dist, int grid_size,
                    std::optional<double> abel_radius, std::optional<double> divergence_cap) {
    if (grid_size < 3 || grid_size % 2 == 0)
        throw std::invalid_argument("trace: grid_size must be odd and >= 3");
    BoundaryCurve curve;
    curve.grid_size = grid_size;
    curve.abel_radius = abel_radius.value_or(default_abel_radius(series));
    curve.divergence_cap = divergence_cap.value_or(default_divergence_cap(dist));
    curve.samples.resize(static_cast<size_t>(grid_size));
    const int m = grid_size / 2;
    const double h = M_PI / static_cast<double>(m);
    for (int k = m; k < grid_size; ++k) {
        const double theta = static_cast<double>(k - m) * h;
        curve.samples[static_cast<size_t>(k)] =
            boundary_point(series, dist, theta, curve.abel_radius, curve.divergence_cap);
    }
    // The conjugate series is odd and 2pi-periodic, so y vanishes identically
    // at theta = pi; pin it to avoid sin(n*pi) roundoff leaving the two curve
    // ends a few ulp apart instead of coincident.
    if (!curve.samples.back().diverged) curve.samples.back().y = 0.0;
    for (int k = 0; k < m; ++k) {  // conjugation symmetry, enforced exactly
        const BoundarySample& p = curve.samples[static_cast<size_t>(2 * m - k)];
        curve.samples[static_cast<size_t>(k)] = {-p.theta, p.x, -p.y, p.diverged};
    }
    return curve;
}

double hilbert_step(double theta0, double x) {
    if (theta0 < 0.0 || theta0 > M_PI) throw std::domain_error("hilbert_step: theta0 outside [0,pi]");
    const double s1 = std::sin(0.5 * theta0 - 0.5 * x);
    const double s2 = std::sin(0.5 * theta0 + 0.5 * x);
    if (s1 == 0.0 && s2 == 0.0) return 0.0;
    if (s1 == 0.0) return -kInf;
    if (s2 == 0.0) return kInf;
    return std::log(std::abs(s1 / s2)) / M_PI;
}

double StepProfile::eval(double t) const {
    double v = base;
    const double a = std::abs(t);
    for (size_t j = 0; j < theta.size(); ++j)
        if (a >= theta[j]) v += alpha[j];
    return v;
}

StepProfile step_profile(const Distribution& dist) {
    const auto atoms = dist.atom_list();
    StepProfile p;
    p.base = atoms.front().x;
    double c = 0.0;
    for (size_t i = 0; i + 1 < atoms.size(); ++i) {
        c += atoms[i].p;
        p.theta.push_back(M_PI * c);
        p.alpha.push_back(atoms[i + 1].x - atoms[i].x);
    }
    return p;
}

double hilbert_profile(const StepProfile& profile, double x) {
    double v = 0.0;
    for (size_t j = 0; j < profile.theta.size(); ++j)
        v += profile.alpha[j] * hilbert_step(profile.theta[j], x);
    return v;
}

double cot_sum(const StepProfile& profile, double x) {
    double v = 0.0;
    for (size_t j = 0; j < profile.theta.size(); ++j) {
        const double a = 0.5 * profile.theta[j] - 0.5 * x;
        const double b = 0.5 * profile.theta[j] + 0.5 * x;
        v += profile.alpha[j] * (std::cos(a) / std::sin(a) + std::cos(b) / std::sin(b));
    }
    return v;
}

std::vector<RayTip> ray_tips(const StepProfile& profile) {
    if (profile.theta.empty())
        throw std::invalid_argument("ray_tips: profile needs at least one step");
    const size_t n_atoms = profile.theta.size() + 1;
    std::vector<double> atom_x(n_atoms);
    atom_x[0] = profile.base;
    for (size_t i = 1; i < n_atoms; ++i) atom_x[i] = atom_x[i - 1] + profile.alpha[i - 1];

    std::vector<double> bounds;
    bounds.push_back(0.0);
    bounds.insert(bounds.end(), profile.theta.begin(), profile.theta.end());
    bounds.push_back(M_PI);

    constexpr double kMargin = 1e-9;  // stay off the cot poles
    constexpr int kScanPoints = 10000;

    std::vector<RayTip> tips;
    for (size_t i = 0; i < n_atoms; ++i) {
        const double lo = bounds[i] + kMargin, hi = bounds[i + 1] - kMargin;
        RayTip tip;
        tip.atom_x = atom_x[i];
        tip.tip_y = kInf;
        double best = kInf;
        double prev_x = lo, prev_f = cot_sum(profile, lo);
        for (int k = 1; k <= kScanPoints; ++k) {
            const double x = lo + (hi - lo) * static_cast<double>(k) / kScanPoints;
            const double f = cot_sum(profile, x);
            if (std::isfinite(prev_f) && std::isfinite(f) && prev_f * f < 0.0) {
                double a = prev_x, b = x, fa = prev_f;
                for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = cot_sum(profile, mid);
                    if (!std::isfinite(fm)) throw std::runtime_error(
                        "ray_tips: bisection hit a pole in bracket [" + std::to_string(a) + "," +
                        std::to_string(b) + "]");
                    if (fa * fm <= 0.0) b = mid;
                    else { a = mid; fa = fm; }
                }
                const double root = 0.5 * (a + b);
                const double y = std::abs(hilbert_profile(profile, root));
                if (y < best) {
                    best = y;
                    tip.critical_angle = root;
                    tip.tip_y = y;
                }
            }
            prev_x = x;
            prev_f = f;
        }
        tips.push_back(tip);
    }
    return tips;
}

namespace {

struct Seg {
    double ax, ay, bx, by;
    int idx;
    double minx, maxx;
};

double cross3(double ox, double oy, double ax, double ay, double bx, double by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

bool on_segment(double px, double py, double qx, double qy, double rx, double ry) {
    return std::min(px, rx) <= qx && qx <= std::max(px, rx) && std::min(py, ry) <= qy &&
           qy <= std::max(py, ry);
}

bool shares_endpoint(const Seg& s, const Seg& t) {
    auto eq = [](double x1, double y1, double x2, double y2) { return x1 == x2 && y1 == y2; };
    return eq(s.ax, s.ay, t.ax, t.ay) || eq(s.ax, s.ay, t.bx, t.by) ||
           eq(s.bx, s.by, t.ax, t.ay) || eq(s.bx, s.by, t.bx, t.by);
}

bool segments_cross(const Seg& s, const Seg& t) {
    const double d1 = cross3(t.ax, t.ay, t.bx, t.by, s.ax, s.ay);
    const double d2 = cross3(t.ax, t.ay, t.bx, t.by, s.bx, s.by);
    const double d3 = cross3(s.ax, s.ay, s.bx, s.by, t.ax, t.ay);
    const double d4 = cross3(s.ax, s.ay, s.bx, s.by, t.bx, t.by);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(t.ax, t.ay, s.ax, s.ay, t.bx, t.by)) return true;
    if (d2 == 0 && on_segment(t.ax, t.ay, s.bx, s.by, t.bx, t.by)) return true;
    if (d3 == 0 && on_segment(s.ax, s.ay, t.ax, t.ay, s.bx, s.by)) return true;
    if (d4 == 0 && on_segment(s.ax, s.ay, t.bx, t.by, s.bx, s.by)) return true;
    return false;
}

}  // namespace

SimplicityResult simplicity_check(const BoundaryCurve& curve) {
    std::vector<Seg> segs;
    for (size_t i = 0; i + 1 < curve.samples.size(); ++i) {
        const auto& p = curve.samples[i];
        const auto& q = curve.samples[i + 1];
        if (p.diverged || q.diverged) continue;
        if (p.x == q.x && p.y == q.y) continue;
        segs.push_back({p.x, p.y, q.x, q.y, static_cast<int>(i), std::min(p.x, q.x),
                        std::max(p.x, q.x)});
    }
    std::vector<size_t> order(segs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return segs[a].minx < segs[b].minx; });

    // Sweep over x: active set pruned by max x.
    std::vector<size_t> active;
    for (size_t oi : order) {
        const Seg& s = segs[oi];
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](size_t j) { return segs[j].maxx < s.minx; }),
                     active.end());
        for (size_t j : active) {
            const Seg& t = segs[j];
            if (shares_endpoint(s, t)) continue;
            if (segments_cross(s, t)) return {false, t.idx, s.idx};
        }
        active.push_back(oi);
    }
    return {true, -1, -1};
}

}  // namespace skodom
