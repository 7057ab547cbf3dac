#include "skodom/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

namespace skodom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Fixed chunking by path index: the per-path streams make any schedule give
// identical results, so threads just split the index range.
template <typename Body>
void parallel_paths(long n_paths, int threads, const Body& body) {
    threads = std::min<long>(threads, n_paths);
    if (threads <= 1) {
        body(0L, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (n_paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk, hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

void fill_statistics(SimulationReport& rep, const Distribution& dist) {
    const size_t n = rep.exit_x.size();
    double sum_t = 0.0, sum_x = 0.0;
    long caps = 0;
    for (size_t i = 0; i < n; ++i) {
        sum_t += rep.exit_time[i];
        sum_x += rep.exit_x[i];
        caps += rep.cap_exit[i];
    }
    rep.mean_exit_time = sum_t / static_cast<double>(n);
    rep.mean_exit_x = sum_x / static_cast<double>(n);
    double var_t = 0.0;
    for (double t : rep.exit_time) var_t += (t - rep.mean_exit_time) * (t - rep.mean_exit_time);
    var_t /= static_cast<double>(n);
    rep.exit_time_se = std::sqrt(var_t / static_cast<double>(n));
    rep.cap_exit_fraction = static_cast<double>(caps) / static_cast<double>(n);

    std::vector<double> law_samples;
    law_samples.reserve(n);
    for (size_t i = 0; i < n; ++i)
        if (!rep.cap_exit[i]) law_samples.push_back(rep.exit_x[i]);

    rep.atomic = dist.is_atomic();
    if (rep.atomic) {
        Chi2Result c = chi2_test(law_samples, dist);
        rep.chi2_statistic = c.statistic;
        rep.chi2_p_value = c.p_value;
        rep.atom_counts = std::move(c.counts);
        rep.max_snap_distance = c.max_snap_distance;
        rep.ks_statistic = rep.ks_p_value = std::numeric_limits<double>::quiet_NaN();
    } else {
        auto [stat, p] = ks_test(std::move(law_samples), dist);
        rep.ks_statistic = stat;
        rep.ks_p_value = p;
        rep.chi2_statistic = rep.chi2_p_value = std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

std::array<uint32_t, 4> PathRng::block(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        const uint64_t p0 = 0xD2511F53ull * ctr[0];
        const uint64_t p1 = 0xCD9E8D57ull * ctr[2];
        ctr = {static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<uint32_t>(p1),
               static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<uint32_t>(p0)};
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
    }
    return ctr;
}

PathRng::PathRng(uint64_t seed, uint64_t path_index)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)}, path_(path_index) {}

void PathRng::refill() {
    buf_ = block({static_cast<uint32_t>(path_), static_cast<uint32_t>(path_ >> 32),
                  static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32)},
                 key_);
    ++block_;
    have_ = 2;
}

double PathRng::uniform() {
    if (have_ == 0) refill();
    --have_;
    const uint64_t bits =
        (static_cast<uint64_t>(buf_[2 * static_cast<size_t>(have_)]) << 32) |
        buf_[2 * static_cast<size_t>(have_) + 1];
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

void PathRng::normal_pair(double& a, double& b) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(2.0 * M_PI * u2);
    b = r * std::sin(2.0 * M_PI * u2);
}

SimulationReport simulate_disc(const FourierSeries& series, const Distribution& dist,
                               const SimConfig& cfg) {
    if (cfg.mode != SimMode::DiscTimeChange)
        throw std::invalid_argument("simulate_disc: mode must be DiscTimeChange");
    if (cfg.n_paths < 1 || !(cfg.dt > 0.0)) throw std::invalid_argument("simulate_disc: bad config");

    const FourierSeries sim_series =
        cfg.sim_truncation > 0 ? series.truncated(cfg.sim_truncation) : series;
    // derivative coefficients n*a_n, Horner order
    std::vector<double> dcoef;
    for (int n = 1; n <= sim_series.order(); ++n)
        dcoef.push_back(static_cast<double>(n) * sim_series.a(n));

    SimulationReport rep;
    rep.config = cfg;
    rep.exit_x.assign(static_cast<size_t>(cfg.n_paths), 0.0);
    rep.exit_time.assign(static_cast<size_t>(cfg.n_paths), 0.0);
    rep.cap_exit.assign(static_cast<size_t>(cfg.n_paths), 0);

    const double stop_radius = 1.0 - cfg.eps_stop;
    const double sq = std::sqrt(cfg.dt);
    parallel_paths(cfg.n_paths, resolve_threads(cfg.threads), [&](long lo, long hi) {
        for (long p = lo; p < hi; ++p) {
            PathRng rng(cfg.seed, static_cast<uint64_t>(p));
            double zx = 0.0, zy = 0.0, zeta = 0.0;
            while (zx * zx + zy * zy < stop_radius * stop_radius) {
                if (!dcoef.empty()) {
                    std::complex<double> z(zx, zy), acc = dcoef.back();
                    for (size_t i = dcoef.size() - 1; i-- > 0;) acc = acc * z + dcoef[i];
                    zeta += std::norm(acc) * cfg.dt;
                }
                double g1, g2;
                rng.normal_pair(g1, g2);
                zx += sq * g1;
                zy += sq * g2;
            }
            const double theta = std::atan2(zy, zx);
            rep.exit_x[static_cast<size_t>(p)] =
                dist.unbounded_support() ? dist.phi_clipped(theta) : dist.phi(theta);
            rep.exit_time[static_cast<size_t>(p)] = zeta;
        }
    });
    fill_statistics(rep, dist);
    return rep;
}

namespace {

// Spatial index over the polygon edges plus a conservative clearance grid.
class DomainAccel {
public:
    explicit DomainAccel(const RegionPolygon& region, int grid = 256) : region_(region), n_(grid) {
        const auto& v = region.vertices;
        minx_ = miny_ = kInf;
        maxx_ = maxy_ = -kInf;
        for (const Point& p : v) {
            minx_ = std::min(minx_, p[0]);
            maxx_ = std::max(maxx_, p[0]);
            miny_ = std::min(miny_, p[1]);
            maxy_ = std::max(maxy_, p[1]);
        }
        const double mx = 1e-9 + 1e-3 * (maxx_ - minx_), my = 1e-9 + 1e-3 * (maxy_ - miny_);
        minx_ -= mx;
        maxx_ += mx;
        miny_ -= my;
        maxy_ += my;
        cw_ = (maxx_ - minx_) / n_;
        ch_ = (maxy_ - miny_) / n_;
        cell_edges_.resize(static_cast<size_t>(n_) * n_);
        for (size_t e = 0; e < v.size(); ++e) {
            const Point& a = v[e];
            const Point& b = v[(e + 1) % v.size()];
            int i0 = cell_ix(std::min(a[0], b[0])), i1 = cell_ix(std::max(a[0], b[0]));
            int j0 = cell_iy(std::min(a[1], b[1])), j1 = cell_iy(std::max(a[1], b[1]));
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i)
                    cell_edges_[idx(i, j)].push_back(static_cast<int>(e));
        }
        const double half_diag = 0.5 * std::hypot(cw_, ch_);
        clearance_.assign(static_cast<size_t>(n_) * n_, 0.0);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) {
                const Point c{minx_ + (i + 0.5) * cw_, miny_ + (j + 0.5) * ch_};
                double best = kInf;
                for (size_t e = 0; e < v.size(); ++e)
                    best = std::min(best, edge_distance(c, static_cast<int>(e)));
                clearance_[idx(i, j)] = std::max(0.0, best - half_diag);
            }
    }

    double lower_bound(Point p) const {
        const int i = cell_ix(p[0]), j = cell_iy(p[1]);
        return clearance_[idx(i, j)];
    }

    double exact_distance(Point p) const {
        const int ci = cell_ix(p[0]), cj = cell_iy(p[1]);
        const double cell_min = std::min(cw_, ch_);
        double best = kInf;
        for (int r = 0;; ++r) {
            bool any = false;
            for (int j = cj - r; j <= cj + r; ++j) {
                if (j < 0 || j >= n_) continue;
                for (int i = ci - r; i <= ci + r; ++i) {
                    if (i < 0 || i >= n_) continue;
                    if (r > 0 && std::abs(i - ci) != r && std::abs(j - cj) != r) continue;
                    any = true;
                    for (int e : cell_edges_[idx(i, j)]) best = std::min(best, edge_distance(p, e));
                }
            }
            // No edge beyond ring r can be closer than (r-0) * cell_min.
            if (best <= static_cast<double>(r) * cell_min) return best;
            if (!any && r > 2 * n_) return best;
            if (r > 2 * n_) return best;
        }
    }

    struct Hit {
        double t;  // fraction along the step segment
        Point p;
        int edge;
    };

    std::optional<Hit> segment_hit(Point a, Point b, std::vector<int>& scratch) const {
        const int i0 = cell_ix(std::min(a[0], b[0])), i1 = cell_ix(std::max(a[0], b[0]));
        const int j0 = cell_iy(std::min(a[1], b[1])), j1 = cell_iy(std::max(a[1], b[1]));
        std::optional<Hit> best;
        scratch.clear();
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                for (int e : cell_edges_[idx(i, j)]) scratch.push_back(e);
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        for (int e : scratch) {
            const Point& p = region_.vertices[static_cast<size_t>(e)];
            const Point& q = region_.vertices[(static_cast<size_t>(e) + 1) % region_.vertices.size()];
            const double rx = b[0] - a[0], ry = b[1] - a[1];
            const double sx = q[0] - p[0], sy = q[1] - p[1];
            const double denom = rx * sy - ry * sx;
            if (denom == 0.0) continue;
            const double t = ((p[0] - a[0]) * sy - (p[1] - a[1]) * sx) / denom;
            const double u = ((p[0] - a[0]) * ry - (p[1] - a[1]) * rx) / denom;
            if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) continue;
            if (!best || t < best->t)
                best = Hit{t, {a[0] + t * rx, a[1] + t * ry}, e};
        }
        return best;
    }

private:
    int cell_ix(double x) const {
        return std::clamp(static_cast<int>((x - minx_) / cw_), 0, n_ - 1);
    }
    int cell_iy(double y) const {
        return std::clamp(static_cast<int>((y - miny_) / ch_), 0, n_ - 1);
    }
    size_t idx(int i, int j) const { return static_cast<size_t>(j) * n_ + i; }

    double edge_distance(Point p, int e) const {
        const Point& a = region_.vertices[static_cast<size_t>(e)];
        const Point& b = region_.vertices[(static_cast<size_t>(e) + 1) % region_.vertices.size()];
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        const double len2 = dx * dx + dy * dy;
        double t = 0.0;
        if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2, 0.0, 1.0);
        return std::hypot(a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    }

    const RegionPolygon& region_;
    int n_;
    double minx_ = 0, maxx_ = 0, miny_ = 0, maxy_ = 0, cw_ = 1, ch_ = 1;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<double> clearance_;
};

}  // namespace

SimulationReport simulate_domain(const RegionPolygon& region, const Distribution& dist,
                                 Point start, const SimConfig& cfg) {
    if (cfg.mode != SimMode::DirectDomain)
        throw std::invalid_argument("simulate_domain: mode must be DirectDomain");
    if (cfg.n_paths < 1 || !(cfg.dt > 0.0)) throw std::invalid_argument("simulate_domain: bad config");
    if (!contains(region, start))
        throw std::invalid_argument("simulate_domain: start point is not inside the region");

    DomainAccel accel(region);

    SimulationReport rep;
    rep.config = cfg;
    rep.exit_x.assign(static_cast<size_t>(cfg.n_paths), 0.0);
    rep.exit_time.assign(static_cast<size_t>(cfg.n_paths), 0.0);
    rep.cap_exit.assign(static_cast<size_t>(cfg.n_paths), 0);

    const double dt_floor = cfg.dt * 1e-4;
    const int threads = resolve_threads(cfg.threads);
    parallel_paths(cfg.n_paths, threads, [&](long lo, long hi) {
        std::vector<int> scratch;
        for (long p = lo; p < hi; ++p) {
            PathRng rng(cfg.seed, static_cast<uint64_t>(p));
            Point pos = start;
            double t = 0.0;
            while (true) {
                double d = accel.lower_bound(pos);
                if (d <= 0.0) d = accel.exact_distance(pos);
                const double dte = std::clamp(0.0625 * d * d, dt_floor, cfg.dt);
                double g1, g2;
                rng.normal_pair(g1, g2);
                const double s = std::sqrt(dte);
                const Point np{pos[0] + s * g1, pos[1] + s * g2};
                const double step_len = s * std::hypot(g1, g2);
                if (step_len >= d) {
                    auto hit = accel.segment_hit(pos, np, scratch);
                    if (hit) {
                        rep.exit_x[static_cast<size_t>(p)] = hit->p[0];
                        rep.exit_time[static_cast<size_t>(p)] = t + hit->t * dte;
                        rep.cap_exit[static_cast<size_t>(p)] =
                            region.edge_is_cap[static_cast<size_t>(hit->edge)];
                        break;
                    }
                }
                pos = np;
                t += dte;
            }
        }
    });
    fill_statistics(rep, dist);
    return rep;
}

std::pair<double, double> ks_test(std::vector<double> samples, const Distribution& dist) {
    if (samples.size() < 10) throw std::invalid_argument("ks_test: need at least 10 samples");
    if (dist.is_atomic())
        throw std::invalid_argument("ks_test: atomic distribution, use chi2_test instead");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = dist.cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    return {d, kolmogorov_p_value(lambda)};
}

double kolmogorov_p_value(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k)
        s += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(s, 0.0, 1.0);
}

namespace {

double gamma_q(double a, double x) {  // upper regularized incomplete gamma
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // lower series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi2_sf(double stat, int dof) {
    if (dof <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

Chi2Result chi2_test(const std::vector<double>& samples, const Distribution& dist) {
    if (!dist.is_atomic()) throw std::invalid_argument("chi2_test: distribution is not atomic");
    if (samples.empty()) throw std::invalid_argument("chi2_test: empty sample");
    const auto atoms = dist.atom_list();
    double min_gap = kInf;
    for (size_t i = 1; i < atoms.size(); ++i)
        min_gap = std::min(min_gap, atoms[i].x - atoms[i - 1].x);
    const double snap_radius = atoms.size() > 1 ? 0.5 * min_gap : kInf;

    Chi2Result res;
    res.counts.resize(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) {
        res.counts[i].atom_x = atoms[i].x;
        res.counts[i].expected = atoms[i].p * static_cast<double>(samples.size());
    }
    for (double s : samples) {
        size_t best = 0;
        double best_d = kInf;
        for (size_t i = 0; i < atoms.size(); ++i) {
            const double d = std::abs(s - atoms[i].x);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best_d > snap_radius)
            throw std::runtime_error("chi2_test: sample " + std::to_string(s) +
                                     " is beyond the snap radius of every atom");
        res.max_snap_distance = std::max(res.max_snap_distance, best_d);
        ++res.counts[best].observed;
    }
    double stat = 0.0;
    for (const auto& c : res.counts) {
        const double diff = static_cast<double>(c.observed) - c.expected;
        stat += diff * diff / c.expected;
    }
    res.statistic = stat;
    res.p_value = chi2_sf(stat, static_cast<int>(atoms.size()) - 1);
    return res;
}

void write_samples_csv(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "path_index,exit_x,exit_time,cap_exit\n";
    char bx[64], bt[64];
    for (size_t i = 0; i < report.exit_x.size(); ++i) {
        std::snprintf(bx, sizeof(bx), "%.17g", report.exit_x[i]);
        std::snprintf(bt, sizeof(bt), "%.17g", report.exit_time[i]);
        out << i << "," << bx << "," << bt << "," << static_cast<int>(report.cap_exit[i]) << "\n";
    }
}

}  // namespace skodom
