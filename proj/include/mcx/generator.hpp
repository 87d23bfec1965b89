#ifndef MCX_GENERATOR_HPP
#define MCX_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mcx/model.hpp"

namespace mcx {

// All randomness goes through std::mt19937_64, whose output sequence is fixed
// by the standard. Distributions are written out below instead of using
// <random>'s, which are implementation-defined.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next() { return engine_(); }
	// [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
	double uniform(double a, double b) { return a + (b - a) * uniform(); }
	bool bernoulli(double p) { return uniform() < p; }
	double exponential();

	// Independent stream for item `index` of a run seeded with `seed`.
	static Rng derive(std::uint64_t seed, std::uint64_t index);

private:
	std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Draws u with sum(u) == total exactly and lo[i] <= u[i] <= hi[i]. The draw
// approximates the uniform distribution on that polytope: uniform simplex
// points are rejected while they break a bound, then a rescale-and-clamp
// pass takes over. Throws std::invalid_argument on infeasible bounds.
std::vector<Rational> sample_bounded_simplex(const Rational& total, const std::vector<Rational>& lo,
                                             const std::vector<Rational>& hi, Rng& rng);

struct GenParams {
	std::size_t n = 4;
	Time t_min = 5;
	Time t_max = 30;
	double p_hi = 0.5;
	double u_target = 0.8;
	std::size_t count = 1;
	std::uint64_t seed = 0;
	// Attempts before giving up; 0 means 1000 per requested set.
	std::size_t max_attempts = 0;
};

// Empty when `p` is usable, otherwise the first problem found.
std::optional<std::string> check(const GenParams& p);

struct DropCounters {
	std::uint64_t u_lo_over = 0;          // U^LO > 1
	std::uint64_t u_hi_over = 0;          // U^HI > 1
	std::uint64_t duplicate = 0;
	std::uint64_t single_criticality = 0;
	std::uint64_t u_avg_deviation = 0;    // |U_avg - U*| > 0.005
	std::uint64_t sampler_infeasible = 0; // utilization bounds admit no draw

	std::uint64_t total() const
	{
		return u_lo_over + u_hi_over + duplicate + single_criticality + u_avg_deviation +
		       sampler_infeasible;
	}
	friend bool operator==(const DropCounters&, const DropCounters&) = default;
};

struct GenReport {
	std::vector<TaskSet> accepted;
	DropCounters dropped;
	std::uint64_t attempts = 0;
	// Stream index of each accepted set; Rng::derive(seed, index) replays it.
	std::vector<std::uint64_t> attempt_of;
};

// Why a single attempt was rejected, or nullopt when it produced a set.
enum class DropReason { ULoOver, UHiOver, Duplicate, SingleCriticality, UAvgDeviation, SamplerInfeasible };

struct Attempt {
	std::optional<TaskSet> set;
	std::optional<DropReason> dropped;
};

// One candidate set drawn from `rng`. Applies every drop rule except
// duplicate detection, which needs the accepted pool.
Attempt draw_task_set(const GenParams& p, Rng& rng);

// Draws until p.count sets are accepted or the attempt cap is hit.
// Deterministic in (p.seed, p); throws std::invalid_argument when check(p)
// fails.
GenReport generate(const GenParams& p);

// Tasks sorted by (T, C_LO, C_HI, L); equal canonical forms are duplicates.
TaskSet canonical_form(const TaskSet& ts);

// Log-uniform integer in [t_min, t_max].
Time draw_period(Time t_min, Time t_max, Rng& rng);

// Inclusive arithmetic range [f;t;s].
std::vector<double> range(double from, double to, double step);
// Parses "[f;t;s]" or a single number.
std::optional<std::vector<double>> parse_range(std::string_view text);

// Exact rational closest to `x` on a 1e-9 grid; used to bring user-facing
// doubles such as U* into exact arithmetic.
Rational to_rational(double x);

} // namespace mcx

#endif
