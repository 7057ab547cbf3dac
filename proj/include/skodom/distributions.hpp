#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace skodom {

enum class DistKind { Atoms, Uniform, Gaussian, Cantor, Empirical };

struct Atom {
    double x = 0.0;
    double p = 0.0;
};

/// Quantile of the standard normal, |abs error| <= 1e-9 (rational
/// approximation plus one Halley step on erfc).
double gaussian_quantile(double y);

/// Cantor function (devil's staircase) on [0,1]; 0 below, 1 above.
double cantor_cdf01(double x);

// Target distribution mu. Immutable after construction; all queries are
// pure and thread-safe.
class Distribution {
public:
    static Distribution atoms(std::vector<Atom> atoms);
    static Distribution uniform(double a, double b);
    static Distribution gaussian(double mean, double sd);
    static Distribution cantor(bool center);
    static Distribution empirical(std::vector<double> samples);

    static Distribution from_json(const nlohmann::json& j);
    static Distribution load(const std::string& path);
    nlohmann::json to_json() const;

    DistKind kind() const { return kind_; }

    // Generalized inverse G(y) = inf{x : F(x) >= y}. y must lie in (0,1).
    // May return +-infinity when the support is unbounded.
    double quantile(double y) const;

    // Quantile with levels clamped to [eps_q, 1-eps_q]; always finite.
    double quantile_clipped(double y, double eps_q = 1e-6) const;

    double cdf(double x) const;

    // phi(theta) = G(|theta|/pi), theta in (-pi,pi).
    double phi(double theta) const;
    double phi_clipped(double theta, double eps_q = 1e-6) const;

    double mean() const { return mean_; }
    double variance() const { return variance_; }

    double support_min() const;  // G(0+), may be -inf
    double support_max() const;  // G(1-), may be +inf

    // True for Atoms and Empirical: phi is a periodic step function.
    bool is_atomic() const { return kind_ == DistKind::Atoms || kind_ == DistKind::Empirical; }

    // True when G diverges at 0 or 1 (Gaussian only among supported kinds).
    bool unbounded_support() const { return kind_ == DistKind::Gaussian; }

    // Collapsed atom list (Empirical samples merged by value). Throws for
    // non-atomic kinds.
    std::vector<Atom> atom_list() const;

    const std::vector<Atom>& raw_atoms() const { return atoms_; }
    double uniform_a() const { return a_; }
    double uniform_b() const { return b_; }
    double gaussian_mean() const { return a_; }
    double gaussian_sd() const { return b_; }
    bool cantor_centered() const { return center_; }
    const std::vector<double>& samples() const { return samples_; }

private:
    Distribution() = default;

    DistKind kind_ = DistKind::Uniform;
    std::vector<Atom> atoms_;           // Atoms: sorted, cumulative in cum_
    std::vector<double> cum_;           // cumulative probabilities
    std::vector<double> samples_;       // Empirical: sorted
    double a_ = 0.0, b_ = 0.0;          // Uniform bounds / Gaussian (mean, sd)
    bool center_ = false;               // Cantor
    double mean_ = 0.0, variance_ = 0.0;
};

}  // namespace skodom
