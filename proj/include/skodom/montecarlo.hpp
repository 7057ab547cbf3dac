#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "skodom/distributions.hpp"
#include "skodom/fourier.hpp"
#include "skodom/geometry.hpp"

namespace skodom {

// Counter-based stream: Philox-style 4x32 block keyed by (seed, path index).
// Streams for distinct paths are independent and schedule-free.
class PathRng {
public:
    PathRng(uint64_t seed, uint64_t path_index);

    double uniform();  // in (0,1), never 0 or 1
    void normal_pair(double& a, double& b);

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> counter,
                                         std::array<uint32_t, 2> key);

private:
    void refill();
    std::array<uint32_t, 2> key_;
    uint64_t path_;
    uint64_t block_ = 0;
    std::array<uint32_t, 4> buf_{};
    int have_ = 0;
};

enum class SimMode { DiscTimeChange, DirectDomain };

struct SimConfig {
    long n_paths = 10000;
    double dt = 1e-4;
    uint64_t seed = 1;
    SimMode mode = SimMode::DiscTimeChange;
    double eps_stop = 1e-3;     // disc mode stopping annulus
    int sim_truncation = 512;   // series order cap inside the disc stepper
    int threads = 0;            // 0 = hardware concurrency
};

struct AtomCount {
    double atom_x = 0.0;
    double expected = 0.0;
    long observed = 0;
};

struct SimulationReport {
    std::vector<double> exit_x;
    std::vector<double> exit_time;
    std::vector<uint8_t> cap_exit;

    double mean_exit_time = 0.0;
    double exit_time_se = 0.0;
    double mean_exit_x = 0.0;

    double ks_statistic = 0.0;  // continuous mu only
    double ks_p_value = 0.0;
    double chi2_statistic = 0.0;  // atomic mu only
    double chi2_p_value = 0.0;
    std::vector<AtomCount> atom_counts;
    double max_snap_distance = 0.0;

    double cap_exit_fraction = 0.0;
    bool atomic = false;
    SimConfig config;
};

SimulationReport simulate_disc(const FourierSeries& series, const Distribution& dist,
                               const SimConfig& cfg);

SimulationReport simulate_domain(const RegionPolygon& region, const Distribution& dist,
                                 Point start, const SimConfig& cfg);

// One-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov p-value.
std::pair<double, double> ks_test(std::vector<double> samples, const Distribution& dist);

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<AtomCount> counts;
    double max_snap_distance = 0.0;
};

// Samples snapped to the nearest atom (radius = half the minimum gap);
// a sample beyond the snap radius aborts the run.
Chi2Result chi2_test(const std::vector<double>& samples, const Distribution& dist);

double kolmogorov_p_value(double lambda);
double chi2_sf(double stat, int dof);  // upper tail of chi^2_dof

void write_samples_csv(const SimulationReport& report, const std::string& path);

}  // namespace skodom
