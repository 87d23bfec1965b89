#pragma once

#include <numeric>
#include <vector>

#include "mcx/model.hpp"

namespace ref {

// Unit-step EDF simulation of synchronous periodic releases over
// [0, 2 * lcm(periods)). True iff no job misses its deadline.
inline bool edf_simulation_feasible(const std::vector<mcx::SporadicJobSpec>& tasks)
{
	long long h = 1;
	for (const auto& t : tasks)
		h = std::lcm(h, static_cast<long long>(t.period));
	struct Job {
		long long deadline, left;
	};
	std::vector<Job> jobs;
	for (long long now = 0; now < 2 * h; ++now) {
		for (const auto& t : tasks)
			if (now % t.period == 0)
				jobs.push_back({now + t.deadline, t.wcet});
		for (const auto& j : jobs)
			if (j.left > 0 && j.deadline <= now)
				return false;
		Job* pick = nullptr;
		for (auto& j : jobs)
			if (j.left > 0 && (!pick || j.deadline < pick->deadline))
				pick = &j;
		if (pick)
			--pick->left;
		std::erase_if(jobs, [](const Job& j) { return j.left == 0; });
	}
	for (const auto& j : jobs)
		if (j.left > 0 && j.deadline <= 2 * h)
			return false;
	return true;
}

} // namespace ref
