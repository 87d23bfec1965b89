#ifndef MCX_SIMULATION_HPP
#define MCX_SIMULATION_HPP

#include <vector>

#include <absl/container/flat_hash_map.h>

#include "mcx/semantics.hpp"

namespace mcx {

// Idle-tasks preorder: true iff `lower` is simulated by `upper`. Both states
// share criticality and rct vector, active tasks share nat, and every idle
// task of `upper` has nat no larger than in `lower`.
bool simulated_by(const SystemState& lower, const SystemState& upper);

// Set of pairwise incomparable states under the idle-tasks preorder.
//
// States are bucketed by the part of the state that the preorder requires to
// be equal (criticality, rct vector, nat of active tasks). Two states in
// different buckets are never comparable, so every query only scans one
// bucket and compares idle-task nat vectors componentwise.
class Antichain {
public:
	Antichain() = default;

	// True iff some member simulates `s`, i.e. s lies in the downward closure.
	bool covers(const SystemState& s) const;

	// Inserts `s` unless it is covered; members simulated by `s` are removed
	// and appended to `evicted` when given. Returns false when absorbed.
	bool insert(const SystemState& s, std::vector<SystemState>* evicted = nullptr);

	std::size_t size() const { return size_; }
	bool empty() const { return size_ == 0; }
	void clear();

	// Members in canonical state order.
	std::vector<SystemState> elements() const;

	template <typename F>
	void for_each(F&& f) const
	{
		for (const auto& [key, bucket] : buckets_)
			for (const auto& s : bucket)
				f(s);
	}

private:
	absl::flat_hash_map<SystemState, std::vector<SystemState>> buckets_;
	std::size_t size_ = 0;
};

// The maximal elements of `states`.
Antichain max_of(const std::vector<SystemState>& states);

} // namespace mcx

#endif
