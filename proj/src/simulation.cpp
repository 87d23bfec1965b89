#include "mcx/simulation.hpp"

#include <algorithm>

namespace mcx {

namespace {

SystemState bucket_key(const SystemState& s)
{
	SystemState key = s;
	for (std::size_t i = 0; i < s.size(); ++i)
		if (s.rct(i) == 0)
			key.set_nat(i, 0);
	return key;
}

// Within one bucket only idle-task nats differ, so the full nat vectors can
// be compared directly.
bool nat_dominated(const SystemState& lower, const SystemState& upper)
{
	for (std::size_t i = 0; i < lower.size(); ++i)
		if (upper.nat(i) > lower.nat(i))
			return false;
	return true;
}

} // namespace

bool simulated_by(const SystemState& lower, const SystemState& upper)
{
	if (lower.size() != upper.size() || lower.cri() != upper.cri())
		return false;
	for (std::size_t i = 0; i < lower.size(); ++i) {
		if (lower.rct(i) != upper.rct(i))
			return false;
		if (lower.rct(i) > 0 ? upper.nat(i) != lower.nat(i) : upper.nat(i) > lower.nat(i))
			return false;
	}
	return true;
}

bool Antichain::covers(const SystemState& s) const
{
	auto it = buckets_.find(bucket_key(s));
	if (it == buckets_.end())
		return false;
	for (const auto& m : it->second)
		if (nat_dominated(s, m))
			return true;
	return false;
}

bool Antichain::insert(const SystemState& s, std::vector<SystemState>* evicted)
{
	auto& bucket = buckets_[bucket_key(s)];
	for (const auto& m : bucket)
		if (nat_dominated(s, m))
			return false;
	std::size_t keep = 0;
	for (std::size_t k = 0; k < bucket.size(); ++k) {
		if (nat_dominated(bucket[k], s)) {
			if (evicted)
				evicted->push_back(bucket[k]);
			continue;
		}
		if (keep != k)
			bucket[keep] = bucket[k];
		++keep;
	}
	size_ -= bucket.size() - keep;
	bucket.resize(keep);
	bucket.push_back(s);
	++size_;
	return true;
}

void Antichain::clear()
{
	buckets_.clear();
	size_ = 0;
}

std::vector<SystemState> Antichain::elements() const
{
	std::vector<SystemState> out;
	out.reserve(size_);
	for_each([&](const SystemState& s) { out.push_back(s); });
	std::sort(out.begin(), out.end());
	return out;
}

Antichain max_of(const std::vector<SystemState>& states)
{
	Antichain a;
	for (const auto& s : states)
		a.insert(s);
	return a;
}

} // namespace mcx
