#include "mcx/explorer.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

namespace mcx {

std::string_view to_string(SearchAlgorithm a)
{
	return a == SearchAlgorithm::BFS ? "bfs" : "acbfs";
}

std::optional<SearchAlgorithm> parse_search(std::string_view name)
{
	if (name == "bfs")
		return SearchAlgorithm::BFS;
	if (name == "acbfs")
		return SearchAlgorithm::ACBFS;
	return std::nullopt;
}

std::string_view to_string(Outcome o)
{
	switch (o) {
	case Outcome::Safe:
		return "Safe";
	case Outcome::Unsafe:
		return "Unsafe";
	case Outcome::Inconclusive:
		return "Inconclusive";
	}
	return "?";
}

std::size_t workers_from_env(std::size_t fallback)
{
	if (const char* env = std::getenv("MCX_WORKERS")) {
		char* end = nullptr;
		const long v = std::strtol(env, &end, 10);
		if (end != env && *end == '\0' && v > 0)
			return static_cast<std::size_t>(v);
	}
	return fallback;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint32_t kRoot = std::numeric_limits<std::uint32_t>::max();

struct Node {
	SystemState state;
	std::uint32_t parent = kRoot; // index into the previous layer
	TransitionLabel label;
};

struct Failure {
	std::size_t index;
	std::optional<OracleKind> by;
};

struct Expansion {
	std::uint32_t parent;
	Successor succ;
};

// Calls fn(begin, end, worker) on `workers` contiguous slices of [0, count).
template <typename F>
void parallel_ranges(std::size_t count, std::size_t workers, F&& fn)
{
	workers = std::max<std::size_t>(1, std::min(workers, count));
	if (workers == 1) {
		fn(std::size_t{0}, count, std::size_t{0});
		return;
	}
	const std::size_t chunk = (count + workers - 1) / workers;
	std::vector<std::thread> pool;
	pool.reserve(workers);
	for (std::size_t w = 0; w < workers; ++w) {
		const std::size_t b = std::min(count, w * chunk);
		const std::size_t e = std::min(count, b + chunk);
		pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
	}
	for (auto& t : pool)
		t.join();
}

OracleSet only(const OracleSet& os, bool safe_role)
{
	OracleSet out;
	for (auto k : kAllOracles)
		if (os.enabled(k) && is_safe_oracle(k) == safe_role)
			out.enable(k);
	return out;
}

// Shared machinery of both searches: oracle split, limits, parallel
// frontier checks and expansion, witness reconstruction.
class SearchContext {
public:
	SearchContext(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg)
	    : ts_(ts), sch_(sch), cfg_(cfg), safe_(only(cfg.oracles, true)),
	      unsafe_(only(cfg.oracles, false)), start_(Clock::now())
	{
	}

	bool is_safe(const SystemState& s) const { return !safe_.empty() && evaluate(safe_, ts_, s).safe(); }

	std::optional<OracleKind> safe_hit(const SystemState& s) const
	{
		if (safe_.empty())
			return std::nullopt;
		return evaluate(safe_, ts_, s).oracle;
	}

	// Lowest-index frontier state in DeadlineMiss or flagged by an unsafe
	// oracle.
	std::optional<Failure> find_failure(const std::vector<Node>& frontier) const
	{
		std::vector<std::optional<Failure>> found(std::max<std::size_t>(1, cfg_.workers));
		parallel_ranges(frontier.size(), cfg_.workers, [&](std::size_t b, std::size_t e, std::size_t w) {
			for (std::size_t k = b; k < e; ++k) {
				const SystemState& s = frontier[k].state;
				if (is_deadline_miss(ts_, s)) {
					found[w] = Failure{k, std::nullopt};
					return;
				}
				if (!unsafe_.empty()) {
					const Verdict v = evaluate(unsafe_, ts_, s);
					if (v.unsafe()) {
						found[w] = Failure{k, v.oracle};
						return;
					}
				}
			}
		});
		for (const auto& f : found)
			if (f)
				return f;
		return std::nullopt;
	}

	bool out_of_time() const
	{
		return cfg_.limits.max_duration && Clock::now() - start_ > *cfg_.limits.max_duration;
	}

	bool over_state_budget(std::uint64_t admitted) const
	{
		return cfg_.limits.max_states && admitted > *cfg_.limits.max_states;
	}

	// Expands frontier[b, e) in batches, handing every successor to `admit`
	// in frontier order. Returns false when the duration limit expired.
	template <typename Admit>
	bool expand(const std::vector<Node>& frontier, Admit&& admit) const
	{
		const std::size_t workers = std::max<std::size_t>(1, cfg_.workers);
		const std::size_t batch = 512 * workers;
		std::vector<std::vector<Expansion>> buffers(workers);
		for (std::size_t base = 0; base < frontier.size(); base += batch) {
			if (out_of_time())
				return false;
			const std::size_t end = std::min(frontier.size(), base + batch);
			parallel_ranges(end - base, workers, [&](std::size_t b, std::size_t e, std::size_t w) {
				auto& buf = buffers[w];
				buf.clear();
				std::vector<Successor> tmp;
				for (std::size_t k = base + b; k < base + e; ++k) {
					tmp.clear();
					successors(ts_, frontier[k].state, sch_, tmp, cfg_.successor_options);
					for (auto& s : tmp)
						buf.push_back({static_cast<std::uint32_t>(k), std::move(s)});
				}
			});
			for (std::size_t w = 0; w < workers; ++w) {
				for (auto& x : buffers[w])
					admit(x.parent, x.succ);
				buffers[w].clear();
			}
		}
		return true;
	}

	void finish(ExplorationReport& r) const
	{
		r.duration = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
	}

	void fail(ExplorationReport& r, const std::vector<std::vector<Node>>& history,
	          const std::vector<Node>& frontier, const Failure& f) const
	{
		r.outcome = Outcome::Unsafe;
		if (f.by)
			++r.oracle_hits[static_cast<std::size_t>(*f.by)];
		else
			r.deadline_miss = true;
		if (!cfg_.witness)
			return;
		Witness w;
		w.flagged_by = f.by;
		std::vector<WitnessStep> reversed;
		const Node* node = &frontier[f.index];
		std::size_t layer = history.size();
		while (node->parent != kRoot) {
			reversed.push_back({node->label, node->state});
			--layer;
			node = &history[layer][node->parent];
		}
		w.initial = node->state;
		w.steps.assign(reversed.rbegin(), reversed.rend());
		r.witness = std::move(w);
	}

	const TaskSet& ts_;
	const Scheduler& sch_;
	const SearchConfig& cfg_;
	const OracleSet safe_;
	const OracleSet unsafe_;
	const Clock::time_point start_;
};

SystemState start_state(const TaskSet& ts, const SearchConfig& cfg)
{
	if (!cfg.start)
		return initial_state(ts);
	if (!is_valid(ts, *cfg.start))
		throw std::invalid_argument("start state " + render(*cfg.start) + " is not valid for the task set");
	return *cfg.start;
}

} // namespace

ExplorationReport bfs(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg)
{
	SearchContext ctx(ts, sch, cfg);
	ExplorationReport r;
	absl::flat_hash_set<SystemState> reached;
	std::vector<std::vector<Node>> history;
	std::vector<Node> frontier;

	const SystemState v0 = start_state(ts, cfg);
	reached.insert(v0);
	if (auto hit = ctx.safe_hit(v0))
		++r.oracle_hits[static_cast<std::size_t>(*hit)];
	else
		frontier.push_back({v0, kRoot, {}});
	std::uint64_t admitted = frontier.size();
	if (ctx.over_state_budget(admitted)) {
		r.limit = "max-states";
		ctx.finish(r);
		return r;
	}

	while (!frontier.empty()) {
		r.visited += frontier.size();
		if (auto f = ctx.find_failure(frontier)) {
			ctx.fail(r, history, frontier, *f);
			r.stored = reached.size();
			ctx.finish(r);
			return r;
		}
		std::vector<Node> next;
		bool over_budget = false;
		const bool in_time = ctx.expand(frontier, [&](std::uint32_t parent, Successor& s) {
			if (over_budget || !reached.insert(s.state).second)
				return;
			if (auto hit = ctx.safe_hit(s.state)) {
				++r.oracle_hits[static_cast<std::size_t>(*hit)];
				return;
			}
			if (ctx.over_state_budget(admitted + next.size() + 1)) {
				over_budget = true;
				return;
			}
			next.push_back({std::move(s.state), parent, s.label});
		});
		r.stored = reached.size();
		if (!in_time || over_budget) {
			r.limit = in_time ? "max-states" : "duration";
			ctx.finish(r);
			return r;
		}
		admitted += next.size();
		++r.layers;
		if (cfg.witness)
			history.push_back(std::move(frontier));
		frontier = std::move(next);
	}
	r.outcome = Outcome::Safe;
	ctx.finish(r);
	return r;
}

ExplorationReport acbfs(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg,
                        const IterationObserver& observer)
{
	if (!sch.deterministic())
		throw std::invalid_argument("antichain search requires a deterministic scheduler");
	SearchContext ctx(ts, sch, cfg);
	ExplorationReport r;
	Antichain reached;
	std::vector<std::vector<Node>> history;
	std::vector<Node> frontier;
	std::vector<SystemState> frontier_states;
	std::vector<SystemState> evicted;

	const SystemState v0 = start_state(ts, cfg);
	if (auto hit = ctx.safe_hit(v0)) {
		++r.oracle_hits[static_cast<std::size_t>(*hit)];
	} else {
		frontier.push_back({v0, kRoot, {}});
		reached.insert(v0);
	}
	std::uint64_t admitted = frontier.size();
	r.stored = reached.size();
	if (ctx.over_state_budget(admitted)) {
		r.limit = "max-states";
		ctx.finish(r);
		return r;
	}

	for (std::size_t i = 0;; ++i) {
		if (observer) {
			frontier_states.clear();
			for (const auto& n : frontier)
				frontier_states.push_back(n.state);
			observer(IterationView{i, frontier_states, reached, evicted});
		}
		if (frontier.empty())
			break;
		r.visited += frontier.size();
		if (auto f = ctx.find_failure(frontier)) {
			ctx.fail(r, history, frontier, *f);
			ctx.finish(r);
			return r;
		}

		// N_{i+1} = Max(Succ(N_i) \ dc(R_i u Safe))
		Antichain next;
		absl::flat_hash_map<SystemState, std::pair<std::uint32_t, TransitionLabel>> origin;
		std::uint64_t inserted = 0;
		const bool in_time = ctx.expand(frontier, [&](std::uint32_t parent, Successor& s) {
			if (reached.covers(s.state)) {
				++r.pruned_by_simulation;
				return;
			}
			if (auto hit = ctx.safe_hit(s.state)) {
				++r.oracle_hits[static_cast<std::size_t>(*hit)];
				return;
			}
			if (!next.insert(s.state)) {
				++r.pruned_by_simulation;
				return;
			}
			++inserted;
			if (cfg.witness)
				origin.try_emplace(s.state, parent, s.label);
		});
		if (!in_time) {
			r.limit = "duration";
			ctx.finish(r);
			return r;
		}
		r.pruned_by_simulation += inserted - next.size();

		std::vector<Node> layer;
		layer.reserve(next.size());
		for (auto& s : next.elements()) {
			Node n{std::move(s), kRoot, {}};
			if (cfg.witness) {
				const auto& [parent, label] = origin.at(n.state);
				n.parent = parent;
				n.label = label;
			}
			layer.push_back(std::move(n));
		}
		if (ctx.over_state_budget(admitted + layer.size())) {
			r.limit = "max-states";
			ctx.finish(r);
			return r;
		}
		admitted += layer.size();

		// R_{i+1} = Max(R_i u N_{i+1})
		evicted.clear();
		for (const auto& n : layer)
			reached.insert(n.state, &evicted);
		r.stored = std::max<std::uint64_t>(r.stored, reached.size());
		++r.layers;
		if (cfg.witness)
			history.push_back(std::move(frontier));
		frontier = std::move(layer);
	}
	r.outcome = Outcome::Safe;
	ctx.finish(r);
	return r;
}

ExplorationReport explore(const TaskSet& ts, const Scheduler& sch, const SearchConfig& cfg)
{
	return cfg.algorithm == SearchAlgorithm::BFS ? bfs(ts, sch, cfg) : acbfs(ts, sch, cfg);
}

ExplorationReport explore(const TaskSet& ts, SchedulerKind kind, const SearchConfig& cfg)
{
	return explore(ts, Scheduler::make(kind, ts), cfg);
}

AutomatonGraph explore_graph(const TaskSet& ts, const Scheduler& sch, std::size_t bound,
                             const SuccessorOptions& opts)
{
	AutomatonGraph g;
	absl::flat_hash_map<SystemState, std::size_t> index;
	g.states.push_back(initial_state(ts));
	index.emplace(g.states.front(), 0);
	std::vector<Successor> succ;
	std::size_t expanded = 0;
	for (; expanded < g.states.size() && expanded < bound; ++expanded) {
		succ.clear();
		const SystemState src = g.states[expanded];
		successors(ts, src, sch, succ, opts);
		for (auto& s : succ) {
			auto [it, fresh] = index.try_emplace(s.state, g.states.size());
			if (fresh)
				g.states.push_back(s.state);
			g.edges.push_back({expanded, it->second, s.label});
		}
	}
	g.partial = expanded < g.states.size();
	return g;
}

std::string render_graph(const AutomatonGraph& g)
{
	std::string out = "# states=" + std::to_string(g.states.size()) +
	                  " edges=" + std::to_string(g.edges.size()) +
	                  " partial=" + (g.partial ? "1" : "0") + "\n";
	out += "# initial " + render(g.states.front()) + "\n";
	for (const auto& e : g.edges) {
		out += render(g.states[e.source]);
		out += " -> ";
		out += render(g.states[e.target]);
		out += " [";
		out += render(e.label);
		out += "]\n";
	}
	return out;
}

} // namespace mcx
