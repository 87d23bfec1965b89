#include "mcx/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace mcx {

std::uint64_t splitmix64(std::uint64_t x)
{
	x += 0x9e3779b97f4a7c15ull;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
	return x ^ (x >> 31);
}

double Rng::exponential()
{
	return -std::log1p(-uniform());
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t index)
{
	return Rng(splitmix64(seed ^ splitmix64(index)));
}

Rational to_rational(double x)
{
	return Rational(static_cast<long long>(std::llround(x * 1e9)), 1000000000LL);
}

namespace {

// Uniform point of the standard simplex over `k` coordinates.
std::vector<double> dirichlet(std::size_t k, Rng& rng)
{
	std::vector<double> w(k);
	double sum = 0;
	for (auto& x : w) {
		x = rng.exponential();
		sum += x;
	}
	if (sum <= 0) {
		std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
		return w;
	}
	for (auto& x : w)
		x /= sum;
	return w;
}

// Floating-point draw of x >= 0, sum(x) = s, x <= cap.
std::vector<double> draw_slack(double s, const std::vector<double>& cap, Rng& rng)
{
	const std::size_t k = cap.size();
	for (int attempt = 0; attempt < 200; ++attempt) {
		auto x = dirichlet(k, rng);
		bool ok = true;
		for (std::size_t i = 0; i < k && ok; ++i) {
			x[i] *= s;
			ok = x[i] <= cap[i];
		}
		if (ok)
			return x;
	}

	auto x = dirichlet(k, rng);
	for (auto& v : x)
		v *= s;
	for (int round = 0; round < 64; ++round) {
		double excess = 0;
		for (std::size_t i = 0; i < k; ++i)
			if (x[i] > cap[i]) {
				excess += x[i] - cap[i];
				x[i] = cap[i];
			}
		if (excess <= 1e-15)
			return x;
		// Spread the excess over the unsaturated slots with fresh weights;
		// the final round goes proportionally to the remaining room.
		std::vector<double> w(k, 0.0);
		double wsum = 0;
		const auto fresh = dirichlet(k, rng);
		for (std::size_t i = 0; i < k; ++i)
			if (x[i] < cap[i]) {
				w[i] = round < 63 ? fresh[i] : cap[i] - x[i];
				wsum += w[i];
			}
		if (wsum <= 0)
			return x;
		for (std::size_t i = 0; i < k; ++i)
			x[i] += excess * w[i] / wsum;
	}
	return x;
}

} // namespace

std::vector<Rational> sample_bounded_simplex(const Rational& total, const std::vector<Rational>& lo,
                                             const std::vector<Rational>& hi, Rng& rng)
{
	const std::size_t n = lo.size();
	if (hi.size() != n)
		throw std::invalid_argument("sample_bounded_simplex: bound vectors differ in length");
	Rational lo_sum = 0, room = 0;
	std::vector<Rational> cap(n);
	for (std::size_t i = 0; i < n; ++i) {
		if (lo[i] > hi[i])
			throw std::invalid_argument("sample_bounded_simplex: lo > hi");
		cap[i] = hi[i] - lo[i];
		lo_sum += lo[i];
		room += cap[i];
	}
	const Rational slack = total - lo_sum;
	if (slack < 0 || slack > room)
		throw std::invalid_argument("sample_bounded_simplex: total outside [sum(lo), sum(hi)]");

	std::vector<Rational> u = lo;
	if (slack == 0)
		return u;
	if (slack == room)
		return hi;

	std::vector<std::size_t> free;
	std::vector<double> fcap;
	for (std::size_t i = 0; i < n; ++i)
		if (cap[i] > 0) {
			free.push_back(i);
			fcap.push_back(cap[i].convert_to<double>());
		}
	const double s = slack.convert_to<double>();
	const auto x = draw_slack(s, fcap, rng);

	// Snap the float draw to exact rationals, then push the rounding
	// residual into slots that still have room.
	constexpr long long kGrid = 1LL << 40;
	std::vector<Rational> xq(free.size());
	Rational sum = 0;
	for (std::size_t j = 0; j < free.size(); ++j) {
		const double frac = std::clamp(x[j] / s, 0.0, 1.0);
		xq[j] = slack * Rational(std::llround(frac * static_cast<double>(kGrid)), kGrid);
		if (xq[j] > cap[free[j]])
			xq[j] = cap[free[j]];
		sum += xq[j];
	}
	Rational residual = slack - sum;
	for (std::size_t j = 0; j < free.size() && residual != 0; ++j) {
		if (residual > 0) {
			const Rational d = std::min<Rational>(residual, cap[free[j]] - xq[j]);
			xq[j] += d;
			residual -= d;
		} else {
			const Rational d = std::min<Rational>(-residual, xq[j]);
			xq[j] -= d;
			residual += d;
		}
	}
	for (std::size_t j = 0; j < free.size(); ++j)
		u[free[j]] += xq[j];
	return u;
}

std::optional<std::string> check(const GenParams& p)
{
	if (p.n == 0)
		return "n must be at least 1";
	if (p.n > 16)
		return "n must be at most 16";
	if (p.t_min < 1 || p.t_min > p.t_max)
		return "need 1 <= t_min <= t_max";
	if (p.t_max > 60000)
		return "t_max must fit a state counter (<= 60000)";
	if (!(p.p_hi >= 0 && p.p_hi <= 1))
		return "p_hi must lie in [0, 1]";
	if (!(p.u_target >= 0 && p.u_target <= 1))
		return "u_target must lie in [0, 1]";
	if (p.count < 1)
		return "count must be at least 1";
	return std::nullopt;
}

Time draw_period(Time t_min, Time t_max, Rng& rng)
{
	const double a = std::log(static_cast<double>(t_min));
	const double b = std::log(static_cast<double>(t_max) + 1.0);
	const auto t = static_cast<Time>(std::floor(std::exp(rng.uniform(a, b))));
	return std::clamp(t, t_min, t_max);
}

namespace {

// Round half up, then at least 1.
Time round_budget(const Rational& u, Time period)
{
	const Rational x = u * period + Rational(1, 2);
	const boost::multiprecision::cpp_int q =
	    boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x);
	return std::max<Time>(1, q.convert_to<Time>());
}

} // namespace

Attempt draw_task_set(const GenParams& p, Rng& rng)
{
	const std::size_t n = p.n;
	std::vector<Time> period(n);
	std::vector<Criticality> level(n);
	for (std::size_t i = 0; i < n; ++i)
		period[i] = draw_period(p.t_min, p.t_max, rng);
	std::size_t hi_count = 0;
	for (std::size_t i = 0; i < n; ++i) {
		level[i] = rng.bernoulli(p.p_hi) ? Criticality::HI : Criticality::LO;
		hi_count += level[i] == Criticality::HI;
	}
	if (hi_count == 0 || hi_count == n)
		return {std::nullopt, DropReason::SingleCriticality};

	const Rational target = to_rational(p.u_target);
	const double mu = std::min(p.u_target, 1.0 - p.u_target);
	const Rational delta = to_rational(rng.uniform(-mu, mu));

	std::vector<Rational> lo(n), hi(n, Rational(1));
	for (std::size_t i = 0; i < n; ++i)
		lo[i] = Rational(1, period[i]);
	std::vector<Rational> u_lo, u_hi;
	try {
		u_lo = sample_bounded_simplex(target + delta, lo, hi, rng);
		for (std::size_t i = 0; i < n; ++i) {
			const bool is_hi = level[i] == Criticality::HI;
			lo[i] = is_hi ? u_lo[i] : Rational(0);
			hi[i] = is_hi ? Rational(1) : Rational(0);
		}
		u_hi = sample_bounded_simplex(target - delta, lo, hi, rng);
	} catch (const std::invalid_argument&) {
		return {std::nullopt, DropReason::SamplerInfeasible};
	}

	TaskSet ts;
	for (std::size_t i = 0; i < n; ++i) {
		Task t;
		t.period = t.deadline = period[i];
		t.level = level[i];
		t.c_lo = round_budget(u_lo[i], period[i]);
		t.c_hi = level[i] == Criticality::HI ? std::max(t.c_lo, round_budget(u_hi[i], period[i])) : t.c_lo;
		ts.tasks.push_back(t);
	}

	const auto u = utilization_summary(ts);
	if (u.u_lo > 1)
		return {std::nullopt, DropReason::ULoOver};
	if (u.u_hi > 1)
		return {std::nullopt, DropReason::UHiOver};
	if (abs(u.u_avg - target) > Rational(1, 200))
		return {std::nullopt, DropReason::UAvgDeviation};
	return {std::move(ts), std::nullopt};
}

TaskSet canonical_form(const TaskSet& ts)
{
	TaskSet out = ts;
	std::sort(out.tasks.begin(), out.tasks.end(), [](const Task& a, const Task& b) {
		return std::tuple(a.period, a.c_lo, a.c_hi, a.level, a.deadline) <
		       std::tuple(b.period, b.c_lo, b.c_hi, b.level, b.deadline);
	});
	return out;
}

GenReport generate(const GenParams& p)
{
	if (auto err = check(p))
		throw std::invalid_argument("generate: " + *err);
	const std::uint64_t cap = p.max_attempts ? p.max_attempts : 1000 * p.count;
	GenReport r;
	std::set<std::vector<std::tuple<Time, Time, Time, Criticality, Time>>> seen;
	for (std::uint64_t a = 0; a < cap && r.accepted.size() < p.count; ++a) {
		Rng rng = Rng::derive(p.seed, a);
		Attempt att = draw_task_set(p, rng);
		++r.attempts;
		if (att.dropped) {
			switch (*att.dropped) {
			case DropReason::ULoOver:
				++r.dropped.u_lo_over;
				break;
			case DropReason::UHiOver:
				++r.dropped.u_hi_over;
				break;
			case DropReason::Duplicate:
				++r.dropped.duplicate;
				break;
			case DropReason::SingleCriticality:
				++r.dropped.single_criticality;
				break;
			case DropReason::UAvgDeviation:
				++r.dropped.u_avg_deviation;
				break;
			case DropReason::SamplerInfeasible:
				++r.dropped.sampler_infeasible;
				break;
			}
			continue;
		}
		std::vector<std::tuple<Time, Time, Time, Criticality, Time>> key;
		for (const auto& t : canonical_form(*att.set).tasks)
			key.emplace_back(t.period, t.c_lo, t.c_hi, t.level, t.deadline);
		if (!seen.insert(std::move(key)).second) {
			++r.dropped.duplicate;
			continue;
		}
		r.accepted.push_back(std::move(*att.set));
		r.attempt_of.push_back(a);
	}
	return r;
}

std::vector<double> range(double from, double to, double step)
{
	if (!(step > 0) || from > to)
		throw std::invalid_argument("range: need step > 0 and from <= to");
	const auto k = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
	std::vector<double> out;
	out.reserve(k + 1);
	for (std::size_t i = 0; i <= k; ++i)
		out.push_back(std::round((from + static_cast<double>(i) * step) * 1e10) / 1e10);
	return out;
}

std::optional<std::vector<double>> parse_range(std::string_view text)
{
	auto number = [](std::string_view s) -> std::optional<double> {
		std::string buf(s);
		char* end = nullptr;
		const double v = std::strtod(buf.c_str(), &end);
		if (buf.empty() || end != buf.c_str() + buf.size())
			return std::nullopt;
		return v;
	};
	if (text.empty())
		return std::nullopt;
	if (text.front() != '[') {
		auto v = number(text);
		if (!v)
			return std::nullopt;
		return std::vector<double>{*v};
	}
	if (text.back() != ']')
		return std::nullopt;
	text = text.substr(1, text.size() - 2);
	std::vector<double> parts;
	while (true) {
		const auto semi = text.find(';');
		auto v = number(text.substr(0, semi));
		if (!v)
			return std::nullopt;
		parts.push_back(*v);
		if (semi == std::string_view::npos)
			break;
		text = text.substr(semi + 1);
	}
	if (parts.size() != 3 || !(parts[2] > 0) || parts[0] > parts[1])
		return std::nullopt;
	return range(parts[0], parts[1], parts[2]);
}

} // namespace mcx
