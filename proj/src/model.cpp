#include "mcx/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mcx {

std::string_view to_string(Criticality c)
{
	return c == Criticality::HI ? "HI" : "LO";
}

std::optional<Criticality> parse_criticality(std::string_view s)
{
	if (s == "LO")
		return Criticality::LO;
	if (s == "HI")
		return Criticality::HI;
	return std::nullopt;
}

bool TaskSet::implicit_deadlines() const
{
	return std::all_of(tasks.begin(), tasks.end(),
	                   [](const Task& t) { return t.implicit_deadline(); });
}

Time TaskSet::max_period() const
{
	Time m = 0;
	for (const auto& t : tasks)
		m = std::max(m, t.period);
	return m;
}

Time TaskSet::max_budget() const
{
	Time m = 0;
	for (const auto& t : tasks)
		m = std::max(m, t.max_wcet());
	return m;
}

UtilizationSummary utilization_summary(const TaskSet& ts)
{
	UtilizationSummary u;
	for (const auto& t : ts.tasks) {
		Rational lo(t.c_lo, t.period);
		u.u_lo += lo;
		if (t.level == Criticality::HI) {
			Rational hi(t.c_hi, t.period);
			u.u_lo_of_hi += lo;
			u.u_hi_of_hi += hi;
			u.u_hi += hi;
		} else {
			u.u_lo_of_lo += lo;
		}
	}
	u.u_avg = (u.u_lo + u.u_hi) / 2;
	return u;
}

std::vector<Violation> validate(const TaskSet& ts)
{
	std::vector<Violation> out;
	for (std::size_t i = 0; i < ts.size(); ++i) {
		const Task& t = ts[i];
		const std::size_t id = i + 1;
		auto positive = [&](Time v, const char* field) {
			if (v < 1)
				out.push_back({id, field, std::string(field) + " must be >= 1"});
		};
		positive(t.c_lo, "c_lo");
		positive(t.c_hi, "c_hi");
		positive(t.deadline, "deadline");
		positive(t.period, "period");
		if (t.level == Criticality::HI && t.c_lo > t.c_hi)
			out.push_back({id, "c_lo", "c_lo <= c_hi required for HI tasks"});
		if (t.level == Criticality::LO && t.c_lo != t.c_hi)
			out.push_back({id, "c_hi", "c_lo = c_hi required for LO tasks"});
		if (t.deadline > t.period)
			out.push_back({id, "deadline", "deadline <= period required"});
	}
	return out;
}

namespace {

Time dbf_sync(const std::vector<SporadicJobSpec>& tasks, Time t)
{
	Time demand = 0;
	for (const auto& k : tasks)
		if (t >= k.deadline)
			demand += ((t - k.deadline) / k.period + 1) * k.wcet;
	return demand;
}

// lcm of all periods, or nullopt once it exceeds `cap`.
std::optional<Time> hyperperiod(const std::vector<SporadicJobSpec>& tasks, Time cap)
{
	Time h = 1;
	for (const auto& k : tasks) {
		h = std::lcm(h, k.period);
		if (h > cap)
			return std::nullopt;
	}
	return h;
}

} // namespace

bool edf_feasible(const std::vector<SporadicJobSpec>& tasks)
{
	if (tasks.empty())
		return true;
	Rational u = 0;
	bool implicit = true;
	Time d_max = 0;
	for (const auto& k : tasks) {
		if (k.wcet > k.deadline)
			return false;
		u += Rational(k.wcet, k.period);
		implicit = implicit && k.deadline == k.period;
		d_max = std::max(d_max, k.deadline);
	}
	if (u > 1)
		return false;
	if (implicit)
		return true;

	// Processor-demand criterion: dbf(t) <= t at every absolute deadline up
	// to the horizon.
	constexpr Time kHyperperiodCap = Time(1) << 40;
	std::optional<Time> horizon;
	if (auto h = hyperperiod(tasks, kHyperperiodCap))
		horizon = *h + d_max;
	if (u < 1) {
		Rational slack = 0;
		for (const auto& k : tasks)
			slack += Rational((k.period - k.deadline) * k.wcet, k.period);
		Rational la = slack / (1 - u);
		Time la_int = static_cast<Time>(boost::multiprecision::numerator(la) /
		                                boost::multiprecision::denominator(la)) + 1;
		la_int = std::max(la_int, d_max);
		horizon = horizon ? std::min(*horizon, la_int) : la_int;
	}
	if (!horizon)
		throw std::overflow_error("processor-demand horizon exceeds supported range");

	std::set<Time> deadlines;
	for (const auto& k : tasks)
		for (Time d = k.deadline; d <= *horizon; d += k.period)
			deadlines.insert(d);
	for (Time t : deadlines)
		if (dbf_sync(tasks, t) > t)
			return false;
	return true;
}

DueDiligence due_diligence(const TaskSet& ts)
{
	std::vector<SporadicJobSpec> hi_only;
	std::vector<SporadicJobSpec> lo_mode;
	for (const auto& t : ts.tasks) {
		if (t.level == Criticality::HI)
			hi_only.push_back({t.c_hi, t.deadline, t.period});
		lo_mode.push_back({t.c_lo, t.deadline, t.period});
	}
	if (!edf_feasible(hi_only))
		return {false, "HI tasks at C(HI) are not feasible"};
	if (!edf_feasible(lo_mode))
		return {false, "all tasks at C(LO) are not feasible"};
	return {};
}

} // namespace mcx
