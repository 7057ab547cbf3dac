#include "skodom/fourier.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>

namespace skodom {

namespace {

// Gauss-Kronrod 7-15 pair on [-1,1].
constexpr int kGkPoints = 8;  // positive half including 0
constexpr double kGkNodes[kGkPoints] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kGkWeightsK[kGkPoints] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights at Kronrod node indices 1,3,5,7.
constexpr double kGkWeightsG[4] = {0.129484966168870, 0.279705391489277,
                                   0.381830050505119, 0.417959183673469};

struct PanelResult {
    double value;
    double error;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < kGkPoints; ++i) {
        const double x = h * kGkNodes[i];
        const double fv = (i == kGkPoints - 1) ? f(c) : f(c - x) + f(c + x);
        resk += kGkWeightsK[i] * fv;
        if (i % 2 == 1) resg += kGkWeightsG[i / 2] * fv;  // Gauss nodes sit at odd indices
    }
    resk *= h;
    resg *= h;
    return {resk, std::abs(resk - resg)};
}

// Adaptive bisection on [a,b] to absolute tolerance tol.
template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, double& achieved) {
    struct Item {
        double a, b, tol;
        int depth;
    };
    std::vector<Item> stack{{a, b, tol, 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        PanelResult r = gk15(f, it.a, it.b);
        // Roundoff floor: |K - G| never drops much below machine noise on the
        // panel value, so demanding less only recurses without progress.
        const double floor = 1e-15 * (1.0 + std::abs(r.value));
        if (r.error <= std::max(it.tol, floor) || it.depth >= 48 || (it.b - it.a) < 1e-15) {
            total += r.value;
            if (r.error > it.tol) achieved += r.error;
            continue;
        }
        const double m = 0.5 * (it.a + it.b);
        stack.push_back({it.a, m, 0.5 * it.tol, it.depth + 1});
        stack.push_back({m, it.b, 0.5 * it.tol, it.depth + 1});
    }
    return total;
}

struct StepDecomposition {
    double base;
    std::vector<double> theta;  // jump angles in (0,pi), increasing
    std::vector<double> alpha;  // jump heights, positive
};

StepDecomposition decompose_steps(const Distribution& dist) {
    const auto atoms = dist.atom_list();
    StepDecomposition d;
    d.base = atoms.front().x;
    double c = 0.0;
    for (size_t i = 0; i + 1 < atoms.size(); ++i) {
        c += atoms[i].p;
        d.theta.push_back(M_PI * c);
        d.alpha.push_back(atoms[i + 1].x - atoms[i].x);
    }
    return d;
}

FourierSeries analytic_step(const Distribution& dist, int N) {
    const StepDecomposition d = decompose_steps(dist);
    FourierSeries s;
    s.method = CoeffMethod::AnalyticStep;
    s.coeffs.assign(static_cast<size_t>(N) + 1, 0.0);
    double a0 = d.base;
    for (size_t j = 0; j < d.theta.size(); ++j) a0 += d.alpha[j] * (M_PI - d.theta[j]) / M_PI;
    s.coeffs[0] = a0;
    for (int n = 1; n <= N; ++n) {
        double an = 0.0;
        for (size_t j = 0; j < d.theta.size(); ++j)
            an -= 2.0 * d.alpha[j] * std::sin(n * d.theta[j]) / (M_PI * n);
        s.coeffs[static_cast<size_t>(n)] = an;
    }
    return s;
}

FourierSeries analytic_uniform(const Distribution& dist, int N) {
    FourierSeries s;
    s.method = CoeffMethod::AnalyticUniform;
    s.coeffs.assign(static_cast<size_t>(N) + 1, 0.0);
    const double width = dist.uniform_b() - dist.uniform_a();
    s.coeffs[0] = dist.mean();
    for (int n = 1; n <= N; n += 2)
        s.coeffs[static_cast<size_t>(n)] = -4.0 * width / (M_PI * M_PI * n * n);
    return s;
}

// a_n = 2 Re E[G(U) e^{i n pi U}] with U expanded in 40 fair binary digits;
// the expectation factorizes over digits.
FourierSeries analytic_cantor(const Distribution& dist, int N) {
    constexpr int K = 40;
    FourierSeries s;
    s.method = CoeffMethod::AnalyticCantor;
    s.coeffs.assign(static_cast<size_t>(N) + 1, 0.0);
    const double digit_mean = 0.5 * (1.0 - std::pow(3.0, -K));
    s.coeffs[0] = dist.cantor_centered() ? digit_mean - 0.5 : digit_mean;

    std::array<std::complex<double>, K + 1> unit;    // e^{i n pi / 2^k}
    std::array<std::complex<double>, K + 2> prefix;  // products of (1+unit)/2
    std::array<std::complex<double>, K + 2> suffix;
    for (int n = 1; n <= N; ++n) {
        for (int k = 1; k <= K; ++k) {
            // Exact reduction: n*pi/2^k mod 2*pi = (n mod 2^{k+1})*pi/2^k.
            const uint64_t m = (k + 1 < 63) ? (static_cast<uint64_t>(n) & ((1ull << (k + 1)) - 1))
                                            : static_cast<uint64_t>(n);
            const double ang = M_PI * static_cast<double>(m) / std::pow(2.0, k);
            unit[static_cast<size_t>(k)] = std::polar(1.0, ang);
        }
        prefix[1] = 1.0;
        for (int k = 1; k <= K; ++k)
            prefix[static_cast<size_t>(k) + 1] =
                prefix[static_cast<size_t>(k)] * (0.5 * (1.0 + unit[static_cast<size_t>(k)]));
        suffix[K + 1] = 1.0;
        for (int k = K; k >= 1; --k)
            suffix[static_cast<size_t>(k)] =
                suffix[static_cast<size_t>(k) + 1] * (0.5 * (1.0 + unit[static_cast<size_t>(k)]));
        std::complex<double> acc = 0.0;
        double w3 = 1.0 / 3.0;
        for (int j = 1; j <= K; ++j) {
            acc += w3 * unit[static_cast<size_t>(j)] * prefix[static_cast<size_t>(j)] *
                   suffix[static_cast<size_t>(j) + 1];
            w3 /= 3.0;
        }
        s.coeffs[static_cast<size_t>(n)] = 2.0 * acc.real();
    }
    return s;
}

double tail_estimate_for(const Distribution& dist, const FourierSeries& s) {
    if (std::abs(dist.mean()) < 1e-12) {
        double e = 0.0;
        for (int n = 1; n <= s.order(); ++n) e += s.a(n) * s.a(n);
        return std::max(0.0, dist.variance() - 0.5 * e);
    }
    return std::abs(s.coeffs.back()) * s.order();
}

}  // namespace

const char* coeff_method_name(CoeffMethod m) {
    switch (m) {
        case CoeffMethod::AnalyticStep: return "analytic_step";
        case CoeffMethod::AnalyticUniform: return "analytic_uniform";
        case CoeffMethod::AnalyticCantor: return "analytic_cantor";
        case CoeffMethod::Quadrature: return "quadrature";
    }
    return "?";
}

FourierSeries FourierSeries::truncated(int m) const {
    if (m >= order()) return *this;
    FourierSeries s;
    s.method = method;
    s.tail_estimate = tail_estimate;
    s.coeffs.assign(coeffs.begin(), coeffs.begin() + m + 1);
    return s;
}

FourierSeries cosine_coefficients(const Distribution& dist, int N) {
    if (N < 1) throw std::invalid_argument("cosine_coefficients: N must be >= 1");
    FourierSeries s;
    switch (dist.kind()) {
        case DistKind::Atoms:
        case DistKind::Empirical:
            s = analytic_step(dist, N);
            break;
        case DistKind::Uniform:
            s = analytic_uniform(dist, N);
            break;
        case DistKind::Cantor:
            s = analytic_cantor(dist, N);
            break;
        case DistKind::Gaussian:
            s = cosine_coefficients_quadrature(dist, N);
            break;
    }
    s.tail_estimate = tail_estimate_for(dist, s);
    return s;
}

FourierSeries cosine_coefficients_quadrature(const Distribution& dist, int N, double abs_tol) {
    if (N < 1) throw std::invalid_argument("cosine_coefficients: N must be >= 1");
    const bool clip = dist.unbounded_support();
    const double lo = clip ? 1e-8 : 0.0;  // phi may blow up at 0 for unbounded G
    auto phi = [&](double t) { return clip ? dist.phi_clipped(t) : dist.phi(t); };

    FourierSeries s;
    s.method = CoeffMethod::Quadrature;
    s.coeffs.assign(static_cast<size_t>(N) + 1, 0.0);
    double worst = 0.0;
    for (int n = 0; n <= N; ++n) {
        auto f = [&](double t) { return phi(t) * std::cos(n * t); };
        // One panel per half oscillation keeps GK15 in its comfort zone.
        const int panels = std::max(4, 2 * n);
        const double h = (M_PI - lo) / panels;
        double integral = 0.0, achieved = 0.0;
        for (int p = 0; p < panels; ++p)
            integral += adaptive_gk(f, lo + p * h, lo + (p + 1) * h, abs_tol / panels, achieved);
        if (achieved > 10.0 * abs_tol)
            throw QuadratureError("quadrature did not converge for coefficient n=" +
                                      std::to_string(n),
                                  achieved);
        worst = std::max(worst, achieved);
        s.coeffs[static_cast<size_t>(n)] = (n == 0 ? integral / M_PI : 2.0 * integral / M_PI);
    }
    s.tail_estimate = tail_estimate_for(dist, s);
    (void)worst;
    return s;
}

double expected_exit_time(const FourierSeries& series) {
    double e = 0.0;
    for (int n = 1; n <= series.order(); ++n) e += series.a(n) * series.a(n);
    return 0.5 * e;
}

double parseval_gap(const Distribution& dist, const FourierSeries& series) {
    return dist.variance() - expected_exit_time(series);
}

std::array<double, 2> start_point(const FourierSeries& series) {
    return {series.a(0), 0.0};
}

void write_coeffs_csv(const FourierSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", series.tail_estimate);
    out << "# method=" << coeff_method_name(series.method) << ",N=" << series.order()
        << ",tail=" << buf << "\n";
    out << "n,a_n\n";
    for (int n = 0; n <= series.order(); ++n) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.a(n));
        out << n << "," << buf << "\n";
    }
}

}  // namespace skodom
