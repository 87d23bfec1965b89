#ifndef MCX_SEMANTICS_HPP
#define MCX_SEMANTICS_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcx/model.hpp"

namespace mcx {

inline constexpr std::size_t kMaxTasks = 16;

// Bit i set <=> task with index i (id i+1) is in the set.
using TaskMask = std::uint32_t;

// Scheduling decision: a task index, or nullopt for an idle processor.
using Selection = std::optional<std::size_t>;

constexpr TaskMask bit(std::size_t i) { return TaskMask(1) << i; }

// 1-based ids of the tasks in `mask`, ascending.
std::vector<std::size_t> mask_ids(TaskMask mask);
TaskMask mask_from_ids(const std::vector<std::size_t>& ids);

// Automaton vertex: per-task (rct, nat) plus the global criticality.
// Values are stored as fixed-width pairs in task order; unused slots stay
// zero so that equality, hashing, and ordering work on the raw array.
class SystemState {
public:
	using Value = std::uint16_t;

	SystemState() = default;
	explicit SystemState(std::size_t n, Criticality cri = Criticality::LO);

	std::size_t size() const { return n_; }
	Criticality cri() const { return cri_; }
	void set_cri(Criticality c) { cri_ = c; }

	Value rct(std::size_t i) const { return data_[2 * i]; }
	Value nat(std::size_t i) const { return data_[2 * i + 1]; }
	void set_rct(std::size_t i, Time v) { data_[2 * i] = static_cast<Value>(v); }
	void set_nat(std::size_t i, Time v) { data_[2 * i + 1] = static_cast<Value>(v); }

	// Canonical byte encoding: criticality, task count, then big-endian
	// (rct, nat) pairs. Byte order of encodings equals operator<=>.
	std::string encode() const;

	friend bool operator==(const SystemState& a, const SystemState& b)
	{
		return a.n_ == b.n_ && a.cri_ == b.cri_ &&
		       std::memcmp(a.data_.data(), b.data_.data(), 2 * a.n_ * sizeof(Value)) == 0;
	}
	friend std::strong_ordering operator<=>(const SystemState& a, const SystemState& b);

	std::size_t hash() const;

	template <typename H>
	friend H AbslHashValue(H h, const SystemState& s)
	{
		return H::combine(H::combine_contiguous(std::move(h), s.data_.data(), 2 * s.n_),
		                  static_cast<std::uint8_t>(s.cri_), s.n_);
	}

private:
	std::array<Value, 2 * kMaxTasks> data_{};
	std::uint8_t n_ = 0;
	Criticality cri_ = Criticality::LO;
};

struct StateHash {
	std::size_t operator()(const SystemState& s) const { return s.hash(); }
};

// Edge label of the composed transition release -> run -> signal.
struct TransitionLabel {
	TaskMask released = 0;
	Selection ran;
	bool signaled = false;

	friend bool operator==(const TransitionLabel&, const TransitionLabel&) = default;
};

struct Successor {
	TransitionLabel label;
	SystemState state;
};

enum class ReleaseModel {
	Sporadic, // any subset of the eligible tasks may release
	Periodic, // every eligible task releases immediately
};

struct SuccessorOptions {
	bool deduplicate = true;
	ReleaseModel release_model = ReleaseModel::Sporadic;
};

class Scheduler;

SystemState initial_state(const TaskSet& ts);

// Time to deadline: nat - (T - D). May be negative.
inline Time ttd(const TaskSet& ts, const SystemState& s, std::size_t i)
{
	return Time(s.nat(i)) - (ts[i].period - ts[i].deadline);
}

TaskMask active(const TaskSet& ts, const SystemState& s);
TaskMask eligible(const TaskSet& ts, const SystemState& s);
TaskMask completed(const TaskSet& ts, const SystemState& s);

bool is_deadline_miss(const TaskSet& ts, const SystemState& s);

// Checks every SystemState invariant against `ts`.
bool is_valid(const TaskSet& ts, const SystemState& s);

// Intermediary transitions. Each throws std::invalid_argument on a label the
// source state does not allow.
SystemState release(const TaskSet& ts, const SystemState& s, TaskMask chosen);
SystemState run(const TaskSet& ts, const SystemState& s, Selection who);
SystemState signal(const TaskSet& ts, const SystemState& s, Selection ran, bool theta);

// Composed edges of the automaton out of `s`, appended to `out` in canonical
// order: release subsets by increasing bitmask over the eligible tasks, then
// theta = false before theta = true.
void successors(const TaskSet& ts, const SystemState& s, const Scheduler& sch,
                std::vector<Successor>& out, const SuccessorOptions& opts = {});
std::vector<Successor> successors(const TaskSet& ts, const SystemState& s, const Scheduler& sch,
                                  const SuccessorOptions& opts = {});

// "LO[12,00]" when every value is a single digit and n <= 9, otherwise
// "LO[1/2,0/0]" with rct/nat per task.
std::string render(const SystemState& s);
std::optional<SystemState> parse_state(std::string_view text);

std::string render(const TransitionLabel& label);

} // namespace mcx

template <>
struct std::hash<mcx::SystemState> {
	std::size_t operator()(const mcx::SystemState& s) const { return s.hash(); }
};

#endif
