#ifndef MCX_SCHEDULERS_HPP
#define MCX_SCHEDULERS_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcx/model.hpp"
#include "mcx/semantics.hpp"

namespace mcx {

enum class SchedulerKind { EDF, EDF_VD, LWLF };

std::string_view to_string(SchedulerKind k);
// Accepts the CLI spellings "edf", "edf-vd", "lwlf".
std::optional<SchedulerKind> parse_scheduler(std::string_view name);

struct EdfVdConfig {
	Rational lambda = 1;
	bool use_virtual = false;

	// lambda = U^LO_HI / (1 - U^LO_LO); virtual deadlines are used only when
	// U^LO_LO + U^HI_HI > 1.
	static EdfVdConfig from(const TaskSet& ts);
};

// Reference selections. Ties go to the smaller task id.
Selection edf(const TaskSet& ts, const SystemState& s);
// Throws std::invalid_argument unless every deadline is implicit.
Selection edf_vd(const TaskSet& ts, const SystemState& s, const EdfVdConfig& cfg);
Selection lwlf(const TaskSet& ts, const SystemState& s);

// Utilization-based EDF-VD test: U^LO_LO + U^HI_HI <= 1, or
// lambda * U^LO_LO + U^HI_HI <= 1. Requires implicit deadlines.
bool edf_vd_sufficient_test(const TaskSet& ts);

// Memoryless scheduler bound to one task set. The built-in kinds precompute
// integer keys so that a decision is a single pass over the active tasks.
class Scheduler {
public:
	using Function = std::function<Selection(const SystemState&)>;

	static Scheduler make(SchedulerKind kind, const TaskSet& ts);
	// A user hook; `deterministic` declares the memorylessness contract that
	// antichain search relies on.
	static Scheduler custom(std::string name, Function fn, bool deterministic);

	Selection operator()(const SystemState& s) const;

	bool deterministic() const { return deterministic_; }
	const std::string& name() const { return name_; }
	std::optional<SchedulerKind> kind() const { return kind_; }

private:
	Scheduler() = default;

	Selection pick_min_key(const SystemState& s, bool virtual_deadlines) const;

	std::optional<SchedulerKind> kind_;
	std::string name_;
	bool deterministic_ = true;
	Function custom_;

	// Per-task constants for the built-in kinds.
	std::vector<__int128> ttd_offset_;  // key = nat * scale + offset
	std::vector<__int128> ttvd_offset_;
	std::vector<Time> deadline_gap_;    // T - D
	std::vector<Time> mode_bonus_lo_;   // C(L) - C(LO)
	__int128 scale_ = 1;
	bool use_virtual_ = false;
	std::size_t n_ = 0;
};

} // namespace mcx

#endif
