#ifndef MCX_MODEL_HPP
#define MCX_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mcx {

// Exact rational used for every utilization computation.
using Rational = boost::multiprecision::cpp_rational;

enum class Criticality : std::uint8_t { LO = 0, HI = 1 };

constexpr bool operator<(Criticality a, Criticality b)
{
	return static_cast<std::uint8_t>(a) < static_cast<std::uint8_t>(b);
}
constexpr bool operator<=(Criticality a, Criticality b) { return !(b < a); }
constexpr bool operator>(Criticality a, Criticality b) { return b < a; }
constexpr bool operator>=(Criticality a, Criticality b) { return !(a < b); }

std::string_view to_string(Criticality c);
std::optional<Criticality> parse_criticality(std::string_view s);

// Time values are strictly positive integers for task parameters.
using Time = std::int64_t;

struct Task {
	Time c_lo = 1;
	Time c_hi = 1;
	Time deadline = 1;
	Time period = 1;
	Criticality level = Criticality::LO;

	// WCET at the given criticality.
	Time wcet(Criticality at) const { return at == Criticality::HI ? c_hi : c_lo; }
	// C_i(L_i): the budget of the task's own level.
	Time max_wcet() const { return wcet(level); }
	bool implicit_deadline() const { return deadline == period; }

	friend bool operator==(const Task&, const Task&) = default;
};

// A task set. Tasks are identified by their 1-based position in `tasks`;
// that position is also the scheduler tie-break order.
struct TaskSet {
	std::vector<Task> tasks;
	std::optional<std::string> name;

	std::size_t size() const { return tasks.size(); }
	bool empty() const { return tasks.empty(); }
	const Task& operator[](std::size_t index) const { return tasks[index]; }

	bool implicit_deadlines() const;
	Time max_period() const;
	Time max_budget() const;

	friend bool operator==(const TaskSet& a, const TaskSet& b) { return a.tasks == b.tasks; }
};

struct UtilizationSummary {
	Rational u_lo;       // U^LO: every task at C(LO)
	Rational u_hi;       // U^HI: HI tasks at C(HI)
	Rational u_lo_of_lo; // U^LO_LO
	Rational u_lo_of_hi; // U^LO_HI
	Rational u_hi_of_hi; // U^HI_HI
	Rational u_avg;
};

UtilizationSummary utilization_summary(const TaskSet& ts);

struct Violation {
	std::size_t task_id = 0; // 1-based, 0 for set-level violations
	std::string field;
	std::string message;
};

// Every broken Task/TaskSet invariant; empty when the set is valid.
std::vector<Violation> validate(const TaskSet& ts);

struct DueDiligence {
	bool pass = true;
	std::string reason;

	explicit operator bool() const { return pass; }
};

// Both single-criticality projections (HI tasks at C(HI); all tasks at
// C(LO)) must be EDF-feasible on one processor.
DueDiligence due_diligence(const TaskSet& ts);

// Exact uniprocessor EDF feasibility of a sporadic constrained-deadline set
// given as (wcet, deadline, period) triples.
struct SporadicJobSpec {
	Time wcet;
	Time deadline;
	Time period;
};
bool edf_feasible(const std::vector<SporadicJobSpec>& tasks);

} // namespace mcx

#endif
