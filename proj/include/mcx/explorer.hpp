#ifndef MCX_EXPLORER_HPP
#define MCX_EXPLORER_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcx/oracles.hpp"
#include "mcx/schedulers.hpp"
#include "mcx/semantics.hpp"
#include "mcx/simulation.hpp"

namespace mcx {

enum class SearchAlgorithm { BFS, ACBFS };

std::string_view to_string(SearchAlgorithm a);
std::optional<SearchAlgorithm> parse_search(std::string_view name);

struct SearchLimits {
	// Upper bound on the number of states admitted to a frontier.
	std::optional<std::uint64_t> max_states;
	std::optional<std::chrono::nanoseconds> max_duration;
};

struct SearchConfig {
	SearchAlgorithm algorithm = SearchAlgorithm::ACBFS;
	OracleSet oracles;
	SearchLimits limits;
	std::size_t workers = 1;
	bool witness = false;
	SuccessorOptions successor_options;
	// Start state; the system's initial state when empty. Must satisfy
	// is_valid for the task set.
	std::optional<SystemState> start;
};

enum class Outcome { Safe, Unsafe, Inconclusive };

std::string_view to_string(Outcome o);

struct WitnessStep {
	TransitionLabel label;
	SystemState state;
};

// Path from the initial state to the state that made the search fail.
struct Witness {
	SystemState initial;
	std::vector<WitnessStep> steps;
	// Oracle that flagged the last state; nullopt when it is a deadline miss.
	std::optional<OracleKind> flagged_by;

	const SystemState& last() const { return steps.empty() ? initial : steps.back().state; }
};

struct ExplorationReport {
	Outcome outcome = Outcome::Inconclusive;
	std::string limit; // "max-states" or "duration" when inconclusive

	std::uint64_t visited = 0;  // states admitted to a frontier
	std::uint64_t stored = 0;   // peak size of the visited set / antichain
	std::uint64_t layers = 0;   // completed expansion iterations
	std::uint64_t pruned_by_simulation = 0;
	// Safe oracles: successors dropped. Unsafe oracles: 1 for the oracle that
	// ended the search.
	std::array<std::uint64_t, kAllOracles.size()> oracle_hits{};
	bool deadline_miss = false; // failure found by the deadline-miss check itself

	std::chrono::nanoseconds duration{0};
	std::optional<Witness> witness;

	std::uint64_t hits(OracleKind k) const { return oracle_hits[static_cast<std::size_t>(k)]; }
};

// Per-iteration snapshot handed to an observer during antichain search,
// taken after the reached antichain absorbed the new frontier.
struct IterationView {
	std::size_t index;                        // i in N_i
	const std::vector<SystemState>& frontier; // N_i
	const Antichain& reached;                 // R_i
	const std::vector<SystemState>& evicted;  // members of R_{i-1} dropped when forming R_i
};
using IterationObserver = std::function<void(const IterationView&)>;

// Layered breadth-first reachability over exact states.
ExplorationReport bfs(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg);

// Antichain breadth-first search with safe and unsafe oracles. Throws
// std::invalid_argument for schedulers not declared deterministic.
ExplorationReport acbfs(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg,
                        const IterationObserver& observer = {});

// Dispatches on cfg.algorithm.
ExplorationReport explore(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg);
ExplorationReport explore(const TaskSet& ts, SchedulerKind kind, const SearchConfig& cfg);

struct GraphEdge {
	std::size_t source;
	std::size_t target;
	TransitionLabel label;
};

struct AutomatonGraph {
	std::vector<SystemState> states; // index 0 is the initial state
	std::vector<GraphEdge> edges;
	bool partial = false;            // some discovered state was not expanded
};

// Developed automaton reachable from the initial state, expanding at most
// `bound` states.
AutomatonGraph explore_graph(const TaskSet& ts, const Scheduler& sch, std::size_t bound,
                             const SuccessorOptions& opts = {});

// One line per edge: `SRC -> DST [released={ids} ran=id|none theta=0|1]`,
// preceded by '#' comment lines with the state/edge counts.
std::string render_graph(const AutomatonGraph& g);

// Worker count from MCX_WORKERS, falling back to `fallback`.
std::size_t workers_from_env(std::size_t fallback = 1);

} // namespace mcx

#endif
