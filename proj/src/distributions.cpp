#include "skodom/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace skodom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Acklam's rational approximation to the standard normal quantile,
// |rel error| < 1.15e-9 before refinement.
double norm_quantile_approx(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        double q = p - 0.5, r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

}  // namespace

double gaussian_quantile(double y) {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("gaussian_quantile: y must be in (0,1)");
    double x = norm_quantile_approx(y);
    // One Halley step against erfc-based CDF.
    double e = norm_cdf(x) - y;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double cantor_cdf01(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double c = 0.0, w = 0.5;
    for (int k = 0; k < 64 && x > 0.0; ++k) {
        x *= 3.0;
        int digit = static_cast<int>(x);
        if (digit >= 3) digit = 2;
        x -= digit;
        if (digit == 1) {
            c += w;  // landed in a gap, F is flat here
            break;
        }
        if (digit == 2) c += w;
        w *= 0.5;
    }
    return c;
}

Distribution Distribution::atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("atoms: empty atom list");
    double total = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].p > 0.0)) throw std::invalid_argument("atoms: probabilities must be positive");
        if (i > 0 && !(atoms[i].x > atoms[i - 1].x))
            throw std::invalid_argument("atoms: support must be strictly increasing");
        if (!std::isfinite(atoms[i].x)) throw std::invalid_argument("atoms: non-finite atom");
        total += atoms[i].p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("atoms: probabilities must sum to 1 within 1e-12");
    Distribution d;
    d.kind_ = DistKind::Atoms;
    d.atoms_ = std::move(atoms);
    d.cum_.resize(d.atoms_.size());
    double c = 0.0, m = 0.0, m2 = 0.0;
    for (size_t i = 0; i < d.atoms_.size(); ++i) {
        c += d.atoms_[i].p;
        d.cum_[i] = c;
        m += d.atoms_[i].p * d.atoms_[i].x;
        m2 += d.atoms_[i].p * d.atoms_[i].x * d.atoms_[i].x;
    }
    d.cum_.back() = 1.0;
    d.mean_ = m;
    d.variance_ = m2 - m * m;
    return d;
}

Distribution Distribution::uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform: requires a < b");
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("uniform: non-finite bounds");
    Distribution d;
    d.kind_ = DistKind::Uniform;
    d.a_ = a;
    d.b_ = b;
    d.mean_ = 0.5 * (a + b);
    d.variance_ = (b - a) * (b - a) / 12.0;
    return d;
}

Distribution Distribution::gaussian(double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian: sd must be positive");
    if (!std::isfinite(mean) || !std::isfinite(sd)) throw std::invalid_argument("gaussian: non-finite parameters");
    Distribution d;
    d.kind_ = DistKind::Gaussian;
    d.a_ = mean;
    d.b_ = sd;
    d.mean_ = mean;
    d.variance_ = sd * sd;
    return d;
}

Distribution Distribution::cantor(bool center) {
    Distribution d;
    d.kind_ = DistKind::Cantor;
    d.center_ = center;
    d.mean_ = center ? 0.0 : 0.5;
    d.variance_ = 0.125;
    return d;
}

Distribution Distribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical: needs at least one sample");
    for (double s : samples)
        if (!std::isfinite(s)) throw std::invalid_argument("empirical: non-finite sample");
    std::sort(samples.begin(), samples.end());
    Distribution d;
    d.kind_ = DistKind::Empirical;
    d.samples_ = std::move(samples);
    const double n = static_cast<double>(d.samples_.size());
    double m = 0.0;
    for (double s : d.samples_) m += s;
    m /= n;
    double v = 0.0;
    for (double s : d.samples_) v += (s - m) * (s - m);
    v /= n;  // population convention
    d.mean_ = m;
    d.variance_ = v;
    return d;
}

double Distribution::quantile(double y) const {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("quantile: y must be in (0,1)");
    switch (kind_) {
        case DistKind::Atoms: {
            // inf{x : F(x) >= y}: first atom whose cumulative reaches y.
            auto it = std::lower_bound(cum_.begin(), cum_.end(), y);
            return atoms_[static_cast<size_t>(it - cum_.begin())].x;
        }
        case DistKind::Uniform:
            return a_ + (b_ - a_) * y;
        case DistKind::Gaussian:
            return a_ + b_ * gaussian_quantile(y);
        case DistKind::Cantor: {
            // First 40 binary digits of y map to ternary digits (bit b -> 2b).
            double v = 0.0, t = y, w3 = 1.0 / 3.0;
            for (int k = 0; k < 40; ++k) {
                t *= 2.0;
                int bit = static_cast<int>(t);
                if (bit > 1) bit = 1;
                t -= bit;
                v += 2.0 * bit * w3;
                w3 /= 3.0;
            }
            return center_ ? v - 0.5 : v;
        }
        case DistKind::Empirical: {
            const size_t n = samples_.size();
            size_t j = static_cast<size_t>(std::ceil(y * static_cast<double>(n)));
            if (j < 1) j = 1;
            if (j > n) j = n;
            return samples_[j - 1];
        }
    }
    return 0.0;
}

double Distribution::quantile_clipped(double y, double eps_q) const {
    return quantile(std::clamp(y, eps_q, 1.0 - eps_q));
}

double Distribution::cdf(double x) const {
    switch (kind_) {
        case DistKind::Atoms: {
            double c = 0.0;
            for (size_t i = 0; i < atoms_.size() && atoms_[i].x <= x; ++i) c = cum_[i];
            return c;
        }
        case DistKind::Uniform:
            return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
        case DistKind::Gaussian:
            return norm_cdf((x - a_) / b_);
        case DistKind::Cantor:
            return cantor_cdf01(center_ ? x + 0.5 : x);
        case DistKind::Empirical: {
            auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
            return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
        }
    }
    return 0.0;
}

double Distribution::support_min() const {
    switch (kind_) {
        case DistKind::Atoms: return atoms_.front().x;
        case DistKind::Uniform: return a_;
        case DistKind::Gaussian: return -kInf;
        case DistKind::Cantor: return center_ ? -0.5 : 0.0;
        case DistKind::Empirical: return samples_.front();
    }
    return 0.0;
}

double Distribution::support_max() const {
    switch (kind_) {
        case DistKind::Atoms: return atoms_.back().x;
        case DistKind::Uniform: return b_;
        case DistKind::Gaussian: return kInf;
        case DistKind::Cantor: return center_ ? 0.5 : 1.0;
        case DistKind::Empirical: return samples_.back();
    }
    return 0.0;
}

double Distribution::phi(double theta) const {
    const double y = std::abs(theta) / M_PI;
    if (y <= 0.0) return support_min();  // G(0+)
    if (y >= 1.0) return support_max();  // G(1-)
    return quantile(y);
}

double Distribution::phi_clipped(double theta, double eps_q) const {
    return quantile_clipped(std::abs(theta) / M_PI, eps_q);
}

std::vector<Atom> Distribution::atom_list() const {
    if (kind_ == DistKind::Atoms) return atoms_;
    if (kind_ != DistKind::Empirical)
        throw std::invalid_argument("atom_list: distribution is not atomic");
    std::vector<Atom> out;
    const double w = 1.0 / static_cast<double>(samples_.size());
    for (double s : samples_) {
        if (!out.empty() && out.back().x == s)
            out.back().p += w;
        else
            out.push_back({s, w});
    }
    return out;
}

Distribution Distribution::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("distribution spec: expected a JSON object");
    if (!j.contains("type")) throw std::invalid_argument("distribution spec: missing \"type\"");
    const std::string type = j.at("type").get<std::string>();

    auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
        for (auto& [key, value] : j.items()) {
            (void)value;
            bool ok = false;
            for (const char* a : allowed)
                if (key == a) ok = true;
            if (!ok) throw std::invalid_argument("distribution spec: unknown field \"" + key + "\"");
        }
    };

    if (type == "atoms") {
        reject_unknown({"type", "atoms"});
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.is_object()) throw std::invalid_argument("distribution spec: atom must be an object");
            for (auto& [key, value] : a.items()) {
                (void)value;
                if (key != "x" && key != "p")
                    throw std::invalid_argument("distribution spec: unknown atom field \"" + key + "\"");
            }
            atoms.push_back({a.at("x").get<double>(), a.at("p").get<double>()});
        }
        return Distribution::atoms(std::move(atoms));
    }
    if (type == "uniform") {
        reject_unknown({"type", "a", "b"});
        return Distribution::uniform(j.at("a").get<double>(), j.at("b").get<double>());
    }
    if (type == "gaussian") {
        reject_unknown({"type", "mean", "sd"});
        return Distribution::gaussian(j.at("mean").get<double>(), j.at("sd").get<double>());
    }
    if (type == "cantor") {
        reject_unknown({"type", "center"});
        return Distribution::cantor(j.value("center", false));
    }
    if (type == "empirical") {
        reject_unknown({"type", "samples"});
        return Distribution::empirical(j.at("samples").get<std::vector<double>>());
    }
    throw std::invalid_argument("distribution spec: unknown type \"" + type + "\"");
}

Distribution Distribution::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open distribution spec: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

nlohmann::json Distribution::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case DistKind::Atoms: {
            j["type"] = "atoms";
            auto arr = nlohmann::json::array();
            for (const auto& a : atoms_) arr.push_back({{"x", a.x}, {"p", a.p}});
            j["atoms"] = arr;
            break;
        }
        case DistKind::Uniform:
            j["type"] = "uniform";
            j["a"] = a_;
            j["b"] = b_;
            break;
        case DistKind::Gaussian:
            j["type"] = "gaussian";
            j["mean"] = a_;
            j["sd"] = b_;
            break;
        case DistKind::Cantor:
            j["type"] = "cantor";
            j["center"] = center_;
            break;
        case DistKind::Empirical:
            j["type"] = "empirical";
            j["samples"] = samples_;
            break;
    }
    return j;
}

}  // namespace skodom
