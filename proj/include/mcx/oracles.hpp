#ifndef MCX_ORACLES_HPP
#define MCX_ORACLES_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcx/semantics.hpp"

namespace mcx {

// Kinds are listed in evaluation order: cheap predicates first.
enum class OracleKind : std::uint8_t {
	HiIdlePoint,
	NegativeLaxity,
	NegativeWorstLaxity,
	SumMinLaxity,
	SumMinWorstLaxity,
	OverDemand,
	HiOverDemand,
};

inline constexpr std::array<OracleKind, 7> kAllOracles = {
    OracleKind::HiIdlePoint,        OracleKind::NegativeLaxity, OracleKind::NegativeWorstLaxity,
    OracleKind::SumMinLaxity,       OracleKind::SumMinWorstLaxity, OracleKind::OverDemand,
    OracleKind::HiOverDemand,
};

constexpr bool is_safe_oracle(OracleKind k) { return k == OracleKind::HiIdlePoint; }

// CLI spelling, e.g. "hi-over-demand".
std::string_view to_string(OracleKind k);
std::optional<OracleKind> parse_oracle(std::string_view name);

// Laxity-style quantities are defined on active tasks only; querying an idle
// task throws std::invalid_argument.
Time laxity(const TaskSet& ts, const SystemState& s, std::size_t i);
Time worst_laxity(const TaskSet& ts, const SystemState& s, std::size_t i);

// Number of future jobs of task i with a deadline within horizon t, assuming
// mode alpha.
Time nj(const TaskSet& ts, const SystemState& s, std::size_t i, Time t, Criticality alpha);
// Demand of task i (current job plus future jobs) within horizon t.
Time df(const TaskSet& ts, const SystemState& s, std::size_t i, Time t, Criticality alpha);
// State-relative demand bound: sum of df over all tasks.
Time dbf(const TaskSet& ts, const SystemState& s, Time t, Criticality alpha);

// Single-predicate evaluation.
bool fires(OracleKind k, const TaskSet& ts, const SystemState& s);

// Enabled oracles, split by role. Bit k of `mask` enables kAllOracles[k].
class OracleSet {
public:
	OracleSet() = default;
	static OracleSet none() { return {}; }
	static OracleSet all();
	static OracleSet of(std::initializer_list<OracleKind> kinds);
	static OracleSet from_mask(std::uint32_t mask);

	// Comma-separated CLI names, "all" or "none".
	static std::optional<OracleSet> parse(std::string_view spec);

	OracleSet& enable(OracleKind k);
	bool enabled(OracleKind k) const { return mask_ & (1u << static_cast<unsigned>(k)); }
	bool empty() const { return mask_ == 0; }
	std::uint32_t mask() const { return mask_; }

	std::vector<OracleKind> safe() const;
	std::vector<OracleKind> unsafe() const;

	// "none", "all", or the enabled names joined by '+'.
	std::string name() const;

	friend bool operator==(const OracleSet&, const OracleSet&) = default;

private:
	std::uint32_t mask_ = 0;
};

struct Verdict {
	enum class Kind { Unknown, Safe, Unsafe } kind = Kind::Unknown;
	std::optional<OracleKind> oracle;

	bool safe() const { return kind == Kind::Safe; }
	bool unsafe() const { return kind == Kind::Unsafe; }
};

// First enabled oracle (in kind order) that fires decides the verdict.
Verdict evaluate(const OracleSet& os, const TaskSet& ts, const SystemState& s);

} // namespace mcx

#endif
