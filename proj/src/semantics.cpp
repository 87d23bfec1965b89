#include "mcx/semantics.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include <absl/container/flat_hash_set.h>

#include "mcx/schedulers.hpp"

namespace mcx {

std::vector<std::size_t> mask_ids(TaskMask mask)
{
	std::vector<std::size_t> ids;
	for (std::size_t i = 0; mask != 0; ++i, mask >>= 1)
		if (mask & 1u)
			ids.push_back(i + 1);
	return ids;
}

TaskMask mask_from_ids(const std::vector<std::size_t>& ids)
{
	TaskMask m = 0;
	for (auto id : ids)
		m |= bit(id - 1);
	return m;
}

SystemState::SystemState(std::size_t n, Criticality cri)
    : n_(static_cast<std::uint8_t>(n)), cri_(cri)
{
	if (n > kMaxTasks)
		throw std::invalid_argument("at most " + std::to_string(kMaxTasks) + " tasks are supported");
}

std::string SystemState::encode() const
{
	std::string out;
	out.reserve(2 + 4 * n_);
	out.push_back(static_cast<char>(cri_));
	out.push_back(static_cast<char>(n_));
	for (std::size_t k = 0; k < 2u * n_; ++k) {
		out.push_back(static_cast<char>(data_[k] >> 8));
		out.push_back(static_cast<char>(data_[k] & 0xff));
	}
	return out;
}

std::strong_ordering operator<=>(const SystemState& a, const SystemState& b)
{
	if (auto c = static_cast<int>(a.cri_) <=> static_cast<int>(b.cri_); c != 0)
		return c;
	if (auto c = a.n_ <=> b.n_; c != 0)
		return c;
	for (std::size_t k = 0; k < 2u * a.n_; ++k)
		if (auto c = a.data_[k] <=> b.data_[k]; c != 0)
			return c;
	return std::strong_ordering::equal;
}

std::size_t SystemState::hash() const
{
	// FNV-1a over 64-bit words followed by a murmur finalizer.
	std::uint64_t h = 0xcbf29ce484222325ull ^ (std::uint64_t(n_) << 8) ^ std::uint64_t(cri_);
	const std::size_t words = (2u * n_ + 3) / 4;
	for (std::size_t w = 0; w < words; ++w) {
		std::uint64_t v;
		std::memcpy(&v, data_.data() + 4 * w, sizeof v);
		h = (h ^ v) * 0x100000001b3ull;
	}
	h ^= h >> 33;
	h *= 0xff51afd7ed558ccdull;
	h ^= h >> 33;
	h *= 0xc4ceb9fe1a85ec53ull;
	h ^= h >> 33;
	return static_cast<std::size_t>(h);
}

SystemState initial_state(const TaskSet& ts)
{
	return SystemState(ts.size(), Criticality::LO);
}

TaskMask active(const TaskSet& ts, const SystemState& s)
{
	TaskMask m = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) > 0)
			m |= bit(i);
	return m;
}

TaskMask eligible(const TaskSet& ts, const SystemState& s)
{
	TaskMask m = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) == 0 && s.nat(i) == 0 && ts[i].level >= s.cri())
			m |= bit(i);
	return m;
}

TaskMask completed(const TaskSet& ts, const SystemState& s)
{
	TaskMask m = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) == 0 && ts[i].wcet(s.cri()) == ts[i].max_wcet())
			m |= bit(i);
	return m;
}

bool is_deadline_miss(const TaskSet& ts, const SystemState& s)
{
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.rct(i) > 0 && ttd(ts, s, i) <= 0)
			return true;
	return false;
}

bool is_valid(const TaskSet& ts, const SystemState& s)
{
	if (s.size() != ts.size())
		return false;
	for (std::size_t i = 0; i < ts.size(); ++i) {
		const Task& t = ts[i];
		if (s.nat(i) > t.period || s.rct(i) > t.max_wcet())
			return false;
		if (s.cri() == Criticality::LO && s.rct(i) > t.c_lo)
			return false;
	}
	return true;
}

SystemState release(const TaskSet& ts, const SystemState& s, TaskMask chosen)
{
	if ((chosen & ~eligible(ts, s)) != 0)
		throw std::invalid_argument("release: chosen tasks are not all eligible");
	SystemState out = s;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (chosen & bit(i)) {
			out.set_nat(i, ts[i].period);
			out.set_rct(i, ts[i].wcet(s.cri()));
		}
	return out;
}

SystemState run(const TaskSet& ts, const SystemState& s, Selection who)
{
	SystemState out = s;
	if (who) {
		if (*who >= ts.size() || s.rct(*who) == 0)
			throw std::invalid_argument("run: task is not active");
		out.set_rct(*who, s.rct(*who) - 1);
	}
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (s.nat(i) > 0)
			out.set_nat(i, s.nat(i) - 1);
	return out;
}

namespace {

SystemState signal_completion(const SystemState& s, std::size_t ran)
{
	SystemState out = s;
	out.set_rct(ran, 0);
	return out;
}

SystemState mode_change(const TaskSet& ts, const SystemState& s, std::size_t ran)
{
	SystemState out = s;
	out.set_cri(Criticality::HI);
	for (std::size_t i = 0; i < ts.size(); ++i) {
		const Task& t = ts[i];
		const Time bonus = t.c_hi - t.c_lo;
		if (t.level == Criticality::HI && s.rct(i) > 0)
			out.set_rct(i, s.rct(i) + bonus);
		else if (i == ran)
			out.set_rct(i, bonus);
		else
			out.set_rct(i, 0);
	}
	return out;
}

} // namespace

SystemState signal(const TaskSet& ts, const SystemState& s, Selection ran, bool theta)
{
	if (!ran)
		return s;
	if (*ran >= ts.size())
		throw std::invalid_argument("signal: unknown task");
	const std::size_t r = *ran;
	if (completed(ts, s) & bit(r))
		return s;
	if (theta && s.rct(r) > 0)
		return signal_completion(s, r);
	if (!theta && s.rct(r) == 0)
		return mode_change(ts, s, r);
	return s;
}

void successors(const TaskSet& ts, const SystemState& s, const Scheduler& sch,
                std::vector<Successor>& out, const SuccessorOptions& opts)
{
	const std::size_t first = out.size();
	const TaskMask elig = eligible(ts, s);

	// Eligible task indices in id order; subset k selects bit j of k as the
	// j-th eligible task.
	std::array<std::size_t, kMaxTasks> slots{};
	std::size_t m = 0;
	for (std::size_t i = 0; i < ts.size(); ++i)
		if (elig & bit(i))
			slots[m++] = i;
	const std::uint64_t subsets = std::uint64_t(1) << m;

	// Linear duplicate scans get quadratic past a handful of subsets.
	const bool hashed = opts.deduplicate && subsets > 16;
	absl::flat_hash_set<SystemState> seen;
	auto emit = [&](const TransitionLabel& label, const SystemState& next) {
		if (hashed) {
			if (!seen.insert(next).second)
				return;
		} else if (opts.deduplicate) {
			for (std::size_t k = first; k < out.size(); ++k)
				if (out[k].state == next)
					return;
		}
		out.push_back({label, next});
	};

	auto expand = [&](TaskMask chosen) {
		SystemState plus = s;
		for (std::size_t i = 0; i < ts.size(); ++i)
			if (chosen & bit(i)) {
				plus.set_nat(i, ts[i].period);
				plus.set_rct(i, ts[i].wcet(s.cri()));
			}
		const Selection who = sch(plus);
		const SystemState ran = run(ts, plus, who);
		for (bool theta : {false, true})
			emit(TransitionLabel{chosen, who, theta}, signal(ts, ran, who, theta));
	};

	if (opts.release_model == ReleaseModel::Periodic) {
		expand(elig);
		return;
	}
	for (std::uint64_t k = 0; k < subsets; ++k) {
		TaskMask chosen = 0;
		for (std::size_t j = 0; j < m; ++j)
			if (k & (std::uint64_t(1) << j))
				chosen |= bit(slots[j]);
		expand(chosen);
	}
}

std::vector<Successor> successors(const TaskSet& ts, const SystemState& s, const Scheduler& sch,
                                  const SuccessorOptions& opts)
{
	std::vector<Successor> out;
	successors(ts, s, sch, out, opts);
	return out;
}

std::string render(const SystemState& s)
{
	bool compact = s.size() <= 9;
	for (std::size_t i = 0; i < s.size() && compact; ++i)
		compact = s.rct(i) < 10 && s.nat(i) < 10;
	std::string out(to_string(s.cri()));
	out.push_back('[');
	for (std::size_t i = 0; i < s.size(); ++i) {
		if (i > 0)
			out.push_back(',');
		if (compact) {
			out.push_back(static_cast<char>('0' + s.rct(i)));
			out.push_back(static_cast<char>('0' + s.nat(i)));
		} else {
			out += std::to_string(s.rct(i));
			out.push_back('/');
			out += std::to_string(s.nat(i));
		}
	}
	out.push_back(']');
	return out;
}

std::optional<SystemState> parse_state(std::string_view text)
{
	if (text.size() < 4 || text.back() != ']')
		return std::nullopt;
	auto cri = parse_criticality(text.substr(0, 2));
	if (!cri || text[2] != '[')
		return std::nullopt;
	std::string_view body = text.substr(3, text.size() - 4);
	std::vector<std::pair<int, int>> pairs;
	while (!body.empty()) {
		auto comma = body.find(',');
		std::string_view item = body.substr(0, comma);
		body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
		int rct = 0, nat = 0;
		if (auto slash = item.find('/'); slash != std::string_view::npos) {
			auto r1 = std::from_chars(item.data(), item.data() + slash, rct);
			auto r2 = std::from_chars(item.data() + slash + 1, item.data() + item.size(), nat);
			if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
			    r2.ptr != item.data() + item.size())
				return std::nullopt;
		} else if (item.size() == 2 && std::isdigit(static_cast<unsigned char>(item[0])) &&
		           std::isdigit(static_cast<unsigned char>(item[1]))) {
			rct = item[0] - '0';
			nat = item[1] - '0';
		} else {
			return std::nullopt;
		}
		pairs.emplace_back(rct, nat);
	}
	if (pairs.size() > kMaxTasks)
		return std::nullopt;
	SystemState s(pairs.size(), *cri);
	for (std::size_t i = 0; i < pairs.size(); ++i) {
		s.set_rct(i, pairs[i].first);
		s.set_nat(i, pairs[i].second);
	}
	return s;
}

std::string render(const TransitionLabel& label)
{
	std::string out = "released={";
	bool first = true;
	for (auto id : mask_ids(label.released)) {
		if (!first)
			out.push_back(',');
		out += std::to_string(id);
		first = false;
	}
	out += "} ran=";
	out += label.ran ? std::to_string(*label.ran + 1) : std::string("none");
	out += label.signaled ? " theta=1" : " theta=0";
	return out;
}

} // namespace mcx
