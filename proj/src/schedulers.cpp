#include "mcx/schedulers.hpp"

#include <limits>
#include <stdexcept>

namespace mcx {

std::string_view to_string(SchedulerKind k)
{
	switch (k) {
	case SchedulerKind::EDF:
		return "edf";
	case SchedulerKind::EDF_VD:
		return "edf-vd";
	case SchedulerKind::LWLF:
		return "lwlf";
	}
	return "?";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name)
{
	if (name == "edf")
		return SchedulerKind::EDF;
	if (name == "edf-vd")
		return SchedulerKind::EDF_VD;
	if (name == "lwlf")
		return SchedulerKind::LWLF;
	return std::nullopt;
}

EdfVdConfig EdfVdConfig::from(const TaskSet& ts)
{
	const UtilizationSummary u = utilization_summary(ts);
	EdfVdConfig cfg;
	cfg.use_virtual = u.u_lo_of_lo + u.u_hi_of_hi > 1;
	const Rational room = 1 - u.u_lo_of_lo;
	if (room != 0)
		cfg.lambda = u.u_lo_of_hi / room;
	else if (cfg.use_virtual)
		throw std::domain_error("EDF-VD: U^LO_LO = 1 leaves no room for virtual deadlines");
	return cfg;
}

namespace {

void require_implicit(const TaskSet& ts)
{
	if (!ts.implicit_deadlines())
		throw std::invalid_argument("EDF-VD assumes implicit deadlines");
}

// Index of the active task with the smallest key, first index on ties.
template <typename Key>
Selection argmin_active(const TaskSet& ts, const SystemState& s, Key&& key)
{
	Selection best;
	decltype(key(std::size_t{})) best_key{};
	for (std::size_t i = 0; i < ts.size(); ++i) {
		if (s.rct(i) == 0)
			continue;
		auto k = key(i);
		if (!best || k < best_key) {
			best = i;
			best_key = k;
		}
	}
	return best;
}

Time worst_laxity_of(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	return ttd(ts, s, i) - Time(s.rct(i)) - (ts[i].max_wcet() - ts[i].wcet(s.cri()));
}

} // namespace

Selection edf(const TaskSet& ts, const SystemState& s)
{
	return argmin_active(ts, s, [&](std::size_t i) { return ttd(ts, s, i); });
}

Selection edf_vd(const TaskSet& ts, const SystemState& s, const EdfVdConfig& cfg)
{
	require_implicit(ts);
	if (s.cri() == Criticality::HI || !cfg.use_virtual)
		return edf(ts, s);
	return argmin_active(ts, s, [&](std::size_t i) -> Rational {
		const Task& t = ts[i];
		if (t.level == Criticality::HI)
			return Rational(s.nat(i)) - (Rational(t.period) - Rational(t.deadline) * cfg.lambda);
		return Rational(ttd(ts, s, i));
	});
}

Selection lwlf(const TaskSet& ts, const SystemState& s)
{
	return argmin_active(ts, s, [&](std::size_t i) { return worst_laxity_of(ts, s, i); });
}

bool edf_vd_sufficient_test(const TaskSet& ts)
{
	require_implicit(ts);
	const UtilizationSummary u = utilization_summary(ts);
	if (u.u_lo_of_lo + u.u_hi_of_hi <= 1)
		return true;
	const Rational room = 1 - u.u_lo_of_lo;
	if (room <= 0)
		return false;
	const Rational lambda = u.u_lo_of_hi / room;
	return lambda * u.u_lo_of_lo + u.u_hi_of_hi <= 1;
}

Scheduler Scheduler::make(SchedulerKind kind, const TaskSet& ts)
{
	Scheduler sch;
	sch.kind_ = kind;
	sch.name_ = std::string(to_string(kind));
	sch.n_ = ts.size();
	sch.ttd_offset_.resize(ts.size());
	sch.deadline_gap_.resize(ts.size());
	sch.mode_bonus_lo_.resize(ts.size());
	for (std::size_t i = 0; i < ts.size(); ++i) {
		const Task& t = ts[i];
		sch.deadline_gap_[i] = t.period - t.deadline;
		sch.ttd_offset_[i] = -sch.deadline_gap_[i];
		sch.mode_bonus_lo_[i] = t.max_wcet() - t.c_lo;
	}
	if (kind == SchedulerKind::EDF_VD) {
		require_implicit(ts);
		const EdfVdConfig cfg = EdfVdConfig::from(ts);
		sch.use_virtual_ = cfg.use_virtual;
		if (cfg.use_virtual) {
			using boost::multiprecision::cpp_int;
			const cpp_int p = boost::multiprecision::numerator(cfg.lambda);
			const cpp_int q = boost::multiprecision::denominator(cfg.lambda);
			const cpp_int limit = cpp_int(std::numeric_limits<std::int64_t>::max()) >> 20;
			if (p > limit || q > limit)
				throw std::overflow_error("EDF-VD: lambda denominator too large for exact keys");
			const auto pi = static_cast<std::int64_t>(p);
			const auto qi = static_cast<std::int64_t>(q);
			sch.scale_ = qi;
			sch.ttvd_offset_.resize(ts.size());
			for (std::size_t i = 0; i < ts.size(); ++i) {
				const Task& t = ts[i];
				if (t.level == Criticality::HI)
					sch.ttvd_offset_[i] = -__int128(t.period) * qi + __int128(t.deadline) * pi;
				else
					sch.ttvd_offset_[i] = -__int128(sch.deadline_gap_[i]) * qi;
			}
		}
	}
	return sch;
}

Scheduler Scheduler::custom(std::string name, Function fn, bool deterministic)
{
	Scheduler sch;
	sch.name_ = std::move(name);
	sch.custom_ = std::move(fn);
	sch.deterministic_ = deterministic;
	return sch;
}

Selection Scheduler::pick_min_key(const SystemState& s, bool virtual_deadlines) const
{
	Selection best;
	__int128 best_key = 0;
	for (std::size_t i = 0; i < n_; ++i) {
		if (s.rct(i) == 0)
			continue;
		const __int128 key = virtual_deadlines ? __int128(s.nat(i)) * scale_ + ttvd_offset_[i]
		                                       : __int128(s.nat(i)) + ttd_offset_[i];
		if (!best || key < best_key) {
			best = i;
			best_key = key;
		}
	}
	return best;
}

Selection Scheduler::operator()(const SystemState& s) const
{
	if (!kind_)
		return custom_(s);
	switch (*kind_) {
	case SchedulerKind::EDF:
		return pick_min_key(s, false);
	case SchedulerKind::EDF_VD:
		return pick_min_key(s, use_virtual_ && s.cri() == Criticality::LO);
	case SchedulerKind::LWLF: {
		Selection best;
		Time best_key = 0;
		const bool lo = s.cri() == Criticality::LO;
		for (std::size_t i = 0; i < n_; ++i) {
			if (s.rct(i) == 0)
				continue;
			const Time key = Time(s.nat(i)) - deadline_gap_[i] - Time(s.rct(i)) -
			                 (lo ? mode_bonus_lo_[i] : Time(0));
			if (!best || key < best_key) {
				best = i;
				best_key = key;
			}
		}
		return best;
	}
	}
	return std::nullopt;
}

} // namespace mcx
