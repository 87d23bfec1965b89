// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.
//
//   acceptance [--only 1,4] [--unit PATH] [--verbose]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "CLI11.hpp"

#include "../support/reference.hpp"
#include "mcx/explorer.hpp"
#include "mcx/experiment.hpp"
#include "mcx/generator.hpp"

using namespace mcx;

namespace {

bool verbose = false;

struct Result {
	bool pass = false;
	std::string detail;
};

void note(const char* fmt, auto... args)
{
	if (verbose) {
		std::fprintf(stderr, fmt, args...);
		std::fputc('\n', stderr);
	}
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Generated corpus: `per_point` sets for each (n, u) pair.
struct Corpus {
	std::vector<TaskSet> sets;
	std::vector<double> u_of;
};

Corpus corpus(const std::vector<std::size_t>& ns, Time t_max, const std::vector<double>& us,
              std::size_t per_point, std::uint64_t seed)
{
	Corpus c;
	std::uint64_t point = 0;
	for (auto n : ns)
		for (double u : us) {
			GenParams p;
			p.n = n;
			p.t_max = t_max;
			p.u_target = u;
			p.count = per_point;
			p.seed = splitmix64(seed + point++);
			GenReport r = generate(p);
			for (auto& ts : r.accepted) {
				c.sets.push_back(std::move(ts));
				c.u_of.push_back(u);
			}
		}
	return c;
}

SearchConfig config(SearchAlgorithm a, OracleSet os, bool witness = false)
{
	SearchConfig c;
	c.algorithm = a;
	c.oracles = os;
	c.witness = witness;
	return c;
}

// Full reachable state set with, for each state, whether a deadline miss is
// reachable from it.
struct Reach {
	absl::flat_hash_map<SystemState, bool> can_fail;
};

Reach reach(const TaskSet& ts, const Scheduler& sch)
{
	const AutomatonGraph g = explore_graph(ts, sch, SIZE_MAX);
	std::vector<std::vector<std::size_t>> pred(g.states.size());
	for (const auto& e : g.edges)
		pred[e.target].push_back(e.source);
	std::vector<bool> bad(g.states.size(), false);
	std::deque<std::size_t> todo;
	for (std::size_t v = 0; v < g.states.size(); ++v)
		if (is_deadline_miss(ts, g.states[v])) {
			bad[v] = true;
			todo.push_back(v);
		}
	while (!todo.empty()) {
		const std::size_t w = todo.front();
		todo.pop_front();
		for (std::size_t v : pred[w])
			if (!bad[v]) {
				bad[v] = true;
				todo.push_back(v);
			}
	}
	Reach r;
	r.can_fail.reserve(g.states.size());
	for (std::size_t v = 0; v < g.states.size(); ++v)
		r.can_fail.emplace(g.states[v], bad[v]);
	return r;
}

constexpr SchedulerKind kSchedulers[] = {SchedulerKind::EDF, SchedulerKind::EDF_VD, SchedulerKind::LWLF};

// Criteria 1 and 3 share the explorations.
struct ExactnessStats {
	std::size_t sets = 0, runs = 0, disagreements = 0, safe = 0, unsafe = 0;
	std::size_t internal_violations = 0, iterations = 0;
	std::vector<std::string> examples;
};

ExactnessStats exactness(std::size_t per_point)
{
	const Corpus c = corpus({3, 4}, 8, range(0.7, 1.0, 0.05), per_point, 1001);
	ExactnessStats st;
	st.sets = c.sets.size();
	auto complain = [&](std::size_t& counter, const std::string& what) {
		++counter;
		if (st.examples.size() < 5)
			st.examples.push_back(what);
	};
	for (std::size_t k = 0; k < c.sets.size(); ++k) {
		const TaskSet& ts = c.sets[k];
		for (auto kind : kSchedulers) {
			const Scheduler sch = Scheduler::make(kind, ts);
			const Reach rc = reach(ts, sch);
			const bool fails = rc.can_fail.at(initial_state(ts));
			const Outcome want = fails ? Outcome::Unsafe : Outcome::Safe;
			(fails ? st.unsafe : st.safe) += 1;
			const std::string tag = "set " + std::to_string(k) + " " + std::string(to_string(kind));

			const auto b = bfs(ts, sch, config(SearchAlgorithm::BFS, OracleSet::none()));
			++st.runs;
			if (b.outcome != want)
				complain(st.disagreements, tag + " bfs");

			for (std::uint32_t mask = 0; mask < (1u << kAllOracles.size()); ++mask) {
				const OracleSet os = OracleSet::from_mask(mask);
				std::vector<SystemState> last_reached;
				bool last_frontier_empty = false;
				bool first = true;
				const auto a = acbfs(ts, sch, config(SearchAlgorithm::ACBFS, os, true),
				                     [&](const IterationView& v) {
					                     ++st.iterations;
					                     for (const auto& s : v.frontier)
						                     if (!rc.can_fail.contains(s))
							                     complain(st.internal_violations,
							                              tag + " frontier state outside Reach: " + render(s));
					                     if (!first)
						                     for (const auto& s : last_reached)
							                     if (!v.reached.covers(s))
								                     complain(st.internal_violations,
								                              tag + " dc(R_i) not inside dc(R_i+1)");
					                     first = false;
					                     last_reached = v.reached.elements();
					                     last_frontier_empty = v.frontier.empty();
				                     });
				++st.runs;
				if (a.outcome != want || a.outcome != b.outcome)
					complain(st.disagreements, tag + " acbfs " + os.name());
				// Empty final frontier exactly when no unsafe state was reached.
				if (last_frontier_empty != (a.outcome == Outcome::Safe))
					complain(st.internal_violations, tag + " termination " + os.name());
				if (a.outcome == Outcome::Unsafe) {
					if (!a.witness)
						complain(st.internal_violations, tag + " missing witness");
					else {
						auto it = rc.can_fail.find(a.witness->last());
						if (it == rc.can_fail.end() || !it->second)
							complain(st.internal_violations, tag + " flagged state cannot fail");
					}
				}
			}
		}
		note("  [1/3] set %zu/%zu", k + 1, c.sets.size());
	}
	return st;
}

// Independent idle-tasks preorder on reference states.
bool below(const TaskSet& ts, const ref::State& a, const ref::State& b)
{
	if (a.hi != b.hi || a.rct != b.rct)
		return false;
	for (std::size_t i = 0; i < ts.size(); ++i) {
		if (a.rct[i] > 0 ? a.nat[i] != b.nat[i] : b.nat[i] > a.nat[i])
			return false;
	}
	return true;
}

Result simulation_soundness()
{
	std::mt19937_64 rng(2024);
	std::size_t instances = 0, pairs = 0, violations = 0, failing_pairs = 0;
	while (instances < 240) {
		const bool constrained = instances % 3 == 0;
		const TaskSet ts = ref::random_task_set(rng, 1 + instances % 3, 4, constrained);
		++instances;
		for (const char* name : {"edf", "edf-vd", "lwlf"}) {
			if (std::string(name) == "edf-vd" && !ref::edf_vd_defined(ts))
				continue;
			const ref::Graph g = ref::explore(ts, ref::initial(ts), ref::by_name(name));
			const auto bad = ref::can_fail(ts, g);
			for (std::size_t a = 0; a < g.states.size(); ++a)
				for (std::size_t b = 0; b < g.states.size(); ++b) {
					if (a == b || !below(ts, g.states[a], g.states[b]))
						continue;
					++pairs;
					failing_pairs += bad[a];
					if (bad[a] && !bad[b])
						++violations;
				}
		}
	}
	std::ostringstream d;
	d << instances << " instances, " << pairs << " ordered pairs (" << failing_pairs
	  << " with a failing lower state), " << violations << " violations";
	return {violations == 0 && pairs > 0 && failing_pairs > 0, d.str()};
}

// Criteria 4, 5 and 6 share one corpus and the EDF-VD explorations.
struct ReductionStats {
	std::size_t sets = 0, unschedulable = 0;
	double median_ratio = 0, ratio_of_medians = 0;
	std::map<OracleKind, double> avoided; // median on unschedulable sets
	double best_combined = 0;
	std::size_t inconclusive = 0;
};

ReductionStats reduction(std::size_t per_point)
{
	const Corpus c = corpus({4}, 12, range(0.8, 1.0, 0.02), per_point, 2002);
	ReductionStats st;
	st.sets = c.sets.size();
	std::vector<double> ratios, bfs_v, acbfs_v;
	std::map<OracleKind, std::vector<double>> avoided;
	for (std::size_t k = 0; k < c.sets.size(); ++k) {
		const TaskSet& ts = c.sets[k];
		const Scheduler sch = Scheduler::make(SchedulerKind::EDF_VD, ts);
		const auto b = bfs(ts, sch, config(SearchAlgorithm::BFS, OracleSet::none()));
		const auto a = acbfs(ts, sch, config(SearchAlgorithm::ACBFS, OracleSet::none()));
		if (b.outcome == Outcome::Inconclusive || a.outcome == Outcome::Inconclusive) {
			++st.inconclusive;
			continue;
		}
		ratios.push_back(double(a.visited) / double(b.visited));
		bfs_v.push_back(double(b.visited));
		acbfs_v.push_back(double(a.visited));
		if (a.outcome != Outcome::Unsafe)
			continue;
		++st.unschedulable;
		for (auto kind : kAllOracles) {
			const auto o = acbfs(ts, sch, config(SearchAlgorithm::ACBFS, OracleSet::of({kind})));
			avoided[kind].push_back(1.0 - double(o.visited) / double(a.visited));
			if (kind == OracleKind::HiOverDemand)
				st.best_combined = std::max(st.best_combined, 1.0 - double(o.visited) / double(b.visited));
		}
		note("  [4-6] set %zu/%zu", k + 1, c.sets.size());
	}
	st.median_ratio = median(ratios);
	st.ratio_of_medians = median(acbfs_v) / median(bfs_v);
	for (auto& [kind, v] : avoided)
		st.avoided[kind] = median(v);
	return st;
}

Result curves(std::size_t per_point)
{
	const std::vector<double> us = range(0.5, 1.0, 0.05);
	std::size_t point = 0, inconclusive = 0;
	bool a_ok = true, b_ok = true;
	std::ostringstream d;
	d.setf(std::ios::fixed);
	d.precision(2);
	for (double u : us) {
		GenParams p;
		p.n = 4;
		p.t_max = 12;
		p.u_target = u;
		p.count = per_point;
		p.seed = splitmix64(3003 + point++);
		const GenReport g = generate(p);
		std::size_t suff = 0, vd = 0, lw = 0;
		for (const auto& ts : g.accepted) {
			suff += edf_vd_sufficient_test(ts);
			const auto cfg = config(SearchAlgorithm::ACBFS, OracleSet::of({OracleKind::HiOverDemand}));
			const auto x = explore(ts, SchedulerKind::EDF_VD, cfg);
			const auto y = explore(ts, SchedulerKind::LWLF, cfg);
			inconclusive += (x.outcome == Outcome::Inconclusive) + (y.outcome == Outcome::Inconclusive);
			vd += x.outcome == Outcome::Safe;
			lw += y.outcome == Outcome::Safe;
		}
		const double total = double(g.accepted.size());
		const double rs = suff / total, rv = vd / total, rl = lw / total;
		a_ok &= rv >= rs;
		b_ok &= rl >= rv - 0.02;
		d << " U*=" << u << ":" << rs << "/" << rv << "/" << rl;
		note("  [7] U*=%.2f sets=%zu sufficient=%.3f edf-vd=%.3f lwlf=%.3f", u, g.accepted.size(), rs, rv, rl);
		if (g.accepted.size() < per_point) {
			a_ok = false;
			d << "(only " << g.accepted.size() << " sets)";
		}
	}
	std::string head = std::string("(a) ") + (a_ok ? "ok" : "violated") + ", (b) " + (b_ok ? "ok" : "violated") +
	                   ", inconclusive " + std::to_string(inconclusive) + "; ratios sufficient/edf-vd/lwlf:";
	return {a_ok && b_ok && inconclusive == 0, head + d.str()};
}

std::string pct(double x)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.3f%%", 100 * x);
	return buf;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Acceptance criteria"};
	std::string only;
	std::string unit_path;
	app.add_option("--only", only, "Comma-separated criteria to run (default: all)");
	app.add_option("--unit", unit_path, "Unit test binary for criterion 8");
	app.add_flag("-v,--verbose", verbose, "Progress on stderr");
	CLI11_PARSE(app, argc, argv);

	std::set<int> selected;
	{
		std::stringstream ss(only);
		for (std::string item; std::getline(ss, item, ',');)
			if (!item.empty())
				selected.insert(std::stoi(item));
	}
	auto want = [&](int k) { return selected.empty() || selected.count(k); };

	bool all_ok = true;
	auto report = [&](int k, const char* title, const Result& r, double secs) {
		std::printf("criterion %d %s: %s (%s) [%.1fs]\n", k, title, r.pass ? "PASS" : "FAIL", r.detail.c_str(),
		            secs);
		std::fflush(stdout);
		all_ok &= r.pass;
	};

	if (want(1) || want(3)) {
		const auto t0 = std::chrono::steady_clock::now();
		const ExactnessStats st = exactness(36);
		const double secs = seconds_since(t0);
		std::string ex;
		for (const auto& e : st.examples)
			ex += "; " + e;
		if (want(1))
			report(1, "BFS/ACBFS verdict agreement",
			       {st.sets >= 500 && st.disagreements == 0,
			        std::to_string(st.sets) + " sets, " + std::to_string(st.runs) + " runs over 3 schedulers x 128 oracle subsets, " +
			            std::to_string(st.safe) + " safe / " + std::to_string(st.unsafe) + " unsafe pairs, " +
			            std::to_string(st.disagreements) + " disagreements" + ex},
			       secs);
		if (want(3))
			report(3, "antichain search internals",
			       {st.internal_violations == 0,
			        std::to_string(st.iterations) + " iterations checked, " +
			            std::to_string(st.internal_violations) + " violations" + ex},
			       secs);
	}
	if (want(2)) {
		const auto t0 = std::chrono::steady_clock::now();
		const Result r = simulation_soundness();
		report(2, "simulation soundness", r, seconds_since(t0));
	}
	if (want(4) || want(5) || want(6)) {
		const auto t0 = std::chrono::steady_clock::now();
		const ReductionStats st = reduction(30);
		const double secs = seconds_since(t0);
		if (want(4))
			report(4, "state-space reduction",
			       {st.median_ratio <= 0.25 && st.inconclusive == 0,
			        std::to_string(st.sets) + " sets, median ACBFS/BFS visited ratio " + pct(st.median_ratio) +
			            ", ratio of medians " + pct(st.ratio_of_medians)},
			       secs);
		if (want(5)) {
			const OracleKind order[] = {OracleKind::HiOverDemand, OracleKind::OverDemand,
			                            OracleKind::NegativeWorstLaxity, OracleKind::NegativeLaxity,
			                            OracleKind::HiIdlePoint};
			bool weak = st.unschedulable > 0, strict = weak;
			std::string d = std::to_string(st.unschedulable) + " unschedulable sets, median avoided:";
			for (std::size_t i = 0; i < std::size(order); ++i) {
				const double v = st.avoided.count(order[i]) ? st.avoided.at(order[i]) : 0;
				d += std::string(" ") + std::string(to_string(order[i])) + "=" + pct(v);
				if (i > 0) {
					const double prev = st.avoided.count(order[i - 1]) ? st.avoided.at(order[i - 1]) : 0;
					weak &= prev >= v;
					strict &= prev > v;
				}
			}
			d += strict ? ", strictly ordered" : weak ? ", ordered with ties" : ", order violated";
			report(5, "oracle impact ordering", {strict, d}, secs);
		}
		if (want(6))
			report(6, "combined reduction headline",
			       {st.best_combined > 0.99, "best ACBFS+hi-over-demand vs BFS reduction on an unschedulable set " +
			                                     pct(st.best_combined)},
			       secs);
	}
	if (want(7)) {
		const auto t0 = std::chrono::steady_clock::now();
		const Result r = curves(100);
		report(7, "schedulability curves", r, seconds_since(t0));
	}
	if (want(8)) {
		const auto t0 = std::chrono::steady_clock::now();
		Result r;
		if (unit_path.empty()) {
			r = {false, "no unit test binary given"};
		} else {
			const std::string cmd = unit_path + " --no-intro --minimal > /dev/null 2>&1";
			const int status = std::system(cmd.c_str());
			r = {status == 0, "unit and property suite " + std::string(status == 0 ? "passed" : "failed")};
		}
		report(8, "unit and property suites", r, seconds_since(t0));
	}
	return all_ok ? 0 : 1;
}
