#include "ergeig/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <span>

namespace ergeig {

void SimConfig::validate() const {
    if (dim < 1 || dim > 2) throw ValidationError("simulation dimension must be 1 or 2");
    if (radius <= 0) throw ValidationError("reflection radius must be positive");
    if (dt <= 0) throw ValidationError("dt must be positive");
    if (horizon < 10 * dt) throw ValidationError("horizon too short for dt");
    if (paths < 1) throw ValidationError("need at least one path");
    if (burn_in < 0 || burn_in >= 1) throw ValidationError("burn_in must lie in [0, 1)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Standard normals by Box-Muller on the raw 64-bit stream; one spare
// cached per generator so consumption is deterministic.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - double(rng_() >> 11) * 0x1.0p-53;  // (0, 1]
        double u2 = double(rng_() >> 11) * 0x1.0p-53;
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * std::numbers::pi * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0;
};

struct PathResult {
    double running = 0;     // integral of f after burn-in
    double local_time = 0;  // reflection overshoot after burn-in
};

PathResult run_path(const CostFunction& f, const SimConfig& c, int path_index) {
    NormalStream normals(splitmix64(c.seed ^ splitmix64(std::uint64_t(path_index))));
    const double step = std::sqrt(2.0 * c.dt);
    const long total_steps = long(c.horizon / c.dt);
    const long burn_steps = long(c.burn_in * double(total_steps));

    double x[2] = {0, 0};
    PathResult out;
    for (long k = 0; k < total_steps; ++k) {
        bool counting = k >= burn_steps;
        if (counting) {
            double fx = f.value(std::span<const double>(x, std::size_t(c.dim)));
            if (!std::isfinite(fx))
                throw SolverError("simulate_ball_policy: non-finite cost sample");
            out.running += fx * c.dt;
        }
        for (int a = 0; a < c.dim; ++a) x[a] += step * normals.next();
        double r = (c.dim == 1) ? std::abs(x[0]) : std::hypot(x[0], x[1]);
        if (r > c.radius) {
            double overshoot = r - c.radius;
            double shrink = c.radius / r;
            for (int a = 0; a < c.dim; ++a) x[a] *= shrink;
            if (counting) out.local_time += overshoot;
        }
    }
    return out;
}

}  // namespace

ErgodicEstimate simulate_ball_policy(const CostFunction& f, const SimConfig& config) {
    config.validate();
    const long total_steps = long(config.horizon / config.dt);
    const long burn_steps = long(config.burn_in * double(total_steps));
    const double elapsed = double(total_steps - burn_steps) * config.dt;

    std::vector<double> rates(config.paths);
    double run_sum = 0, loc_sum = 0;
    for (int p = 0; p < config.paths; ++p) {
        PathResult pr = run_path(f, config, p);
        rates[std::size_t(p)] = (pr.running + pr.local_time) / elapsed;
        run_sum += pr.running / elapsed;
        loc_sum += pr.local_time / elapsed;
    }

    ErgodicEstimate est;
    for (double r : rates) est.mean += r;
    est.mean /= config.paths;
    est.running_mean = run_sum / config.paths;
    est.local_time_mean = loc_sum / config.paths;
    if (config.paths > 1) {
        double ss = 0;
        for (double r : rates) ss += (r - est.mean) * (r - est.mean);
        est.standard_error = std::sqrt(ss / (config.paths - 1) / config.paths);
    }
    return est;
}

std::vector<std::pair<double, ErgodicEstimate>> policy_sweep(
    const CostFunction& f, const std::vector<double>& radii, const SimConfig& config) {
    std::vector<std::pair<double, ErgodicEstimate>> out;
    out.reserve(radii.size());
    for (double r : radii) {
        if (r <= 0) throw ValidationError("sweep radii must be positive");
        SimConfig c = config;
        c.radius = r;
        out.emplace_back(r, simulate_ball_policy(f, c));
    }
    return out;
}

}  // namespace ergeig
