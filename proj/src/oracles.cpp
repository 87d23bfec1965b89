#include "mcx/oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcx {

std::string_view to_string(OracleKind k)
{
	switch (k) {
	case OracleKind::HiIdlePoint:
		return "hi-idle-point";
	case OracleKind::NegativeLaxity:
		return "neg-laxity";
	case OracleKind::NegativeWorstLaxity:
		return "neg-worst-laxity";
	case OracleKind::SumMinLaxity:
		return "sum-min-laxity";
	case OracleKind::SumMinWorstLaxity:
		return "sum-min-worst-laxity";
	case OracleKind::OverDemand:
		return "over-demand";
	case OracleKind::HiOverDemand:
		return "hi-over-demand";
	}
	return "?";
}

std::optional<OracleKind> parse_oracle(std::string_view name)
{
	for (auto k : kAllOracles)
		if (to_string(k) == name)
			return k;
	return std::nullopt;
}

namespace {

void require_active(const SystemState& s, std::size_t i)
{
	if (i >= s.size() || s.rct(i) == 0)
		throw std::invalid_argument("laxity is only defined for active tasks");
}

Time laxity_unchecked(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	return ttd(ts, s, i) - Time(s.rct(i));
}

Time worst_laxity_unchecked(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	return laxity_unchecked(ts, s, i) - (ts[i].max_wcet() - ts[i].wcet(s.cri()));
}

template <typename Lax>
bool any_active(const TaskSet& ts, const SystemState& s, Lax&& pred)
{
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) > 0 && pred(i))
			return true;
	return false;
}

// Sorts the per-active-task values ascending and tests l_k <= k - 2 for every
// prefix sum l_k.
template <typename Value>
bool sum_min_violated(const TaskSet& ts, const SystemState& s, Value&& value)
{
	std::array<Time, kMaxTasks> v{};
	std::size_t m = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) > 0)
			v[m++] = value(i);
	std::sort(v.begin(), v.begin() + m);
	Time sum = 0;
	for (std::size_t k = 1; k <= m; ++k) {
		sum += v[k - 1];
		if (sum <= Time(k) - 2)
			return true;
	}
	return false;
}

bool over_demand(const TaskSet& ts, const SystemState& s, Criticality alpha)
{
	return any_active(ts, s, [&](std::size_t i) {
		const Time horizon = ttd(ts, s, i);
		return horizon < dbf(ts, s, horizon, alpha);
	});
}

} // namespace

Time laxity(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	require_active(s, i);
	return laxity_unchecked(ts, s, i);
}

Time worst_laxity(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	require_active(s, i);
	return worst_laxity_unchecked(ts, s, i);
}

Time nj(const TaskSet& ts, const SystemState& s, std::size_t i, Time t, Criticality alpha)
{
	if (ts[i].level < alpha)
		return 0;
	return std::max<Time>(t - ttd(ts, s, i), 0) / ts[i].period;
}

Time df(const TaskSet& ts, const SystemState& s, std::size_t i, Time t, Criticality alpha)
{
	const Task& task = ts[i];
	if (t < ttd(ts, s, i) || task.level < alpha)
		return 0;
	const Time future = nj(ts, s, i, t, alpha) * task.wcet(alpha);
	if (s.rct(i) == 0)
		return future;
	return future + task.wcet(alpha) - task.wcet(s.cri()) + Time(s.rct(i));
}

Time dbf(const TaskSet& ts, const SystemState& s, Time t, Criticality alpha)
{
	Time total = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		total += df(ts, s, i, t, alpha);
	return total;
}

bool fires(OracleKind k, const TaskSet& ts, const SystemState& s)
{
	switch (k) {
	case OracleKind::HiIdlePoint:
		return s.cri() == Criticality::HI && active(ts, s) == 0;
	case OracleKind::NegativeLaxity:
		return any_active(ts, s, [&](std::size_t i) { return laxity_unchecked(ts, s, i) < 0; });
	case OracleKind::NegativeWorstLaxity:
		return any_active(ts, s,
		                  [&](std::size_t i) { return worst_laxity_unchecked(ts, s, i) < 0; });
	case OracleKind::SumMinLaxity:
		return sum_min_violated(ts, s, [&](std::size_t i) { return laxity_unchecked(ts, s, i); });
	case OracleKind::SumMinWorstLaxity:
		return sum_min_violated(ts, s,
		                        [&](std::size_t i) { return worst_laxity_unchecked(ts, s, i); });
	case OracleKind::OverDemand:
		return over_demand(ts, s, s.cri());
	case OracleKind::HiOverDemand:
		return over_demand(ts, s, Criticality::HI);
	}
	return false;
}

OracleSet OracleSet::all()
{
	return from_mask((1u << kAllOracles.size()) - 1);
}

OracleSet OracleSet::of(std::initializer_list<OracleKind> kinds)
{
	OracleSet os;
	for (auto k : kinds)
		os.enable(k);
	return os;
}

OracleSet OracleSet::from_mask(std::uint32_t mask)
{
	OracleSet os;
	os.mask_ = mask & ((1u << kAllOracles.size()) - 1);
	return os;
}

std::optional<OracleSet> OracleSet::parse(std::string_view spec)
{
	if (spec == "all")
		return all();
	if (spec == "none" || spec.empty())
		return none();
	OracleSet os;
	while (!spec.empty()) {
		const auto sep = spec.find_first_of(",+");
		auto item = spec.substr(0, sep);
		spec = sep == std::string_view::npos ? std::string_view{} : spec.substr(sep + 1);
		if (item == "all") {
			os = all();
			continue;
		}
		auto k = parse_oracle(item);
		if (!k)
			return std::nullopt;
		os.enable(*k);
	}
	return os;
}

OracleSet& OracleSet::enable(OracleKind k)
{
	mask_ |= 1u << static_cast<unsigned>(k);
	return *this;
}

std::vector<OracleKind> OracleSet::safe() const
{
	std::vector<OracleKind> out;
	for (auto k : kAllOracles)
		if (enabled(k) && is_safe_oracle(k))
			out.push_back(k);
	return out;
}

std::vector<OracleKind> OracleSet::unsafe() const
{
	std::vector<OracleKind> out;
	for (auto k : kAllOracles)
		if (enabled(k) && !is_safe_oracle(k))
			out.push_back(k);
	return out;
}

std::string OracleSet::name() const
{
	if (mask_ == 0)
		return "none";
	if (*this == all())
		return "all";
	std::string out;
	for (auto k : kAllOracles)
		if (enabled(k)) {
			if (!out.empty())
				out.push_back('+');
			out += to_string(k);
		}
	return out;
}

Verdict evaluate(const OracleSet& os, const TaskSet& ts, const SystemState& s)
{
	for (auto k : kAllOracles) {
		if (!os.enabled(k) || !fires(k, ts, s))
			continue;
		return {is_safe_oracle(k) ? Verdict::Kind::Safe : Verdict::Kind::Unsafe, k};
	}
	return {};
}

} // namespace mcx
