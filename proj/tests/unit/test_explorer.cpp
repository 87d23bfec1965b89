#include "doctest.h"

#include <random>
#include <set>

#include "../support/fixtures.hpp"
#include "../support/reference.hpp"
#include "mcx/explorer.hpp"

using namespace mcx;
using fx::HI;
using fx::LO;
using fx::st;
using fx::task;

namespace {

SearchConfig config(SearchAlgorithm a, OracleSet os = OracleSet::none())
{
	SearchConfig c;
	c.algorithm = a;
	c.oracles = os;
	return c;
}

// Replays a witness against the successor relation.
void check_witness(const TaskSet& ts, const Scheduler& sch, const ExplorationReport& r)
{
	REQUIRE(r.witness);
	const Witness& w = *r.witness;
	CHECK(w.initial == initial_state(ts));
	SystemState cur = w.initial;
	for (const auto& step : w.steps) {
		bool found = false;
		for (const auto& s : successors(ts, cur, sch))
			found |= s.label == step.label && s.state == step.state;
		CHECK_MESSAGE(found, render(cur), " -> ", render(step.state));
		cur = step.state;
	}
	if (w.flagged_by)
		CHECK(fires(*w.flagged_by, ts, cur));
	else
		CHECK(is_deadline_miss(ts, cur));
}

} // namespace

TEST_CASE("running example is safe under both searches")
{
	const TaskSet ts = fx::tau_a();
	const Scheduler sch = Scheduler::make(SchedulerKind::EDF_VD, ts);
	const auto b = bfs(ts, sch, config(SearchAlgorithm::BFS));
	CHECK(b.outcome == Outcome::Safe);
	CHECK(b.visited == 8);
	// The three simulated states of the developed automaton are never expanded.
	const std::set<SystemState> grey{st("HI[01,00]"), st("LO[00,01]"), st("LO[01,00]")};
	std::size_t frontier_total = 0;
	const auto a = acbfs(ts, sch, config(SearchAlgorithm::ACBFS), [&](const IterationView& v) {
		frontier_total += v.frontier.size();
		for (const auto& s : v.frontier)
			CHECK_MESSAGE(grey.count(s) == 0, render(s));
	});
	CHECK(a.outcome == Outcome::Safe);
	CHECK(a.visited < b.visited);
	CHECK(a.visited <= b.visited - grey.size());
	CHECK(a.visited == frontier_total);
	const auto o = explore(ts, SchedulerKind::EDF_VD, config(SearchAlgorithm::ACBFS, OracleSet::all()));
	CHECK(o.outcome == Outcome::Safe);
	CHECK(o.visited <= a.visited);
	CHECK(o.hits(OracleKind::HiIdlePoint) > 0);
}

TEST_CASE("failing set yields a replayable witness")
{
	const TaskSet ts{{task(2, 3, 2, 2, HI)}};
	for (auto alg : {SearchAlgorithm::BFS, SearchAlgorithm::ACBFS}) {
		CAPTURE(to_string(alg));
		const Scheduler sch = Scheduler::make(SchedulerKind::EDF, ts);
		SearchConfig cfg = config(alg);
		cfg.witness = true;
		const auto r = explore(ts, sch, cfg);
		CHECK(r.outcome == Outcome::Unsafe);
		CHECK(r.deadline_miss);
		check_witness(ts, sch, r);
		CHECK(render(r.witness->last()) == "HI[10]");
		CHECK(r.witness->steps.size() == 2);
	}
	const Scheduler sch = Scheduler::make(SchedulerKind::EDF, ts);
	SearchConfig cfg = config(SearchAlgorithm::ACBFS, OracleSet::all());
	cfg.witness = true;
	const auto r = explore(ts, sch, cfg);
	CHECK(r.outcome == Outcome::Unsafe);
	check_witness(ts, sch, r);
}

TEST_CASE("a hopeless first job is flagged in the first layer")
{
	// C(LO) > D: the first release already has negative laxity.
	const TaskSet ts{{task(3, 3, 2, 2, LO), task(1, 1, 2, 2, HI)}};
	SearchConfig cfg = config(SearchAlgorithm::ACBFS, OracleSet::all());
	cfg.witness = true;
	const auto r = explore(ts, SchedulerKind::EDF, cfg);
	CHECK(r.outcome == Outcome::Unsafe);
	CHECK(r.layers <= 1);
	check_witness(ts, Scheduler::make(SchedulerKind::EDF, ts), r);
}

TEST_CASE("a flagged start state fails at iteration zero")
{
	const TaskSet two{{task(2, 2, 2, 2, LO), task(2, 2, 2, 2, HI)}};
	SearchConfig cfg = config(SearchAlgorithm::ACBFS, OracleSet::all());
	cfg.start = st("LO[22,22]");
	cfg.witness = true;
	const auto r = explore(two, SchedulerKind::EDF, cfg);
	CHECK(r.outcome == Outcome::Unsafe);
	CHECK(r.layers == 0);
	CHECK(r.visited == 1);
	REQUIRE(r.witness);
	CHECK(r.witness->steps.empty());
	CHECK(r.witness->initial == st("LO[22,22]"));
	CHECK(r.witness->flagged_by == OracleKind::SumMinLaxity);

	// Without oracles the miss is found by expansion instead.
	cfg.oracles = OracleSet::none();
	const auto plain = explore(two, SchedulerKind::EDF, cfg);
	CHECK(plain.outcome == Outcome::Unsafe);
	CHECK(plain.layers >= 1);

	cfg.start = st("LO[33,22]"); // rct above C(LO)
	CHECK_THROWS_AS(explore(two, SchedulerKind::EDF, cfg), std::invalid_argument);
}

TEST_CASE("state budget makes the search inconclusive")
{
	const TaskSet ts = fx::tau_a();
	for (auto alg : {SearchAlgorithm::BFS, SearchAlgorithm::ACBFS}) {
		SearchConfig cfg = config(alg);
		cfg.limits.max_states = 1;
		const auto r = explore(ts, SchedulerKind::EDF_VD, cfg);
		CHECK(r.outcome == Outcome::Inconclusive);
		CHECK(r.limit == "max-states");
	}
	SearchConfig cfg = config(SearchAlgorithm::ACBFS);
	cfg.limits.max_duration = std::chrono::nanoseconds(0);
	const TaskSet big{{task(1, 2, 9, 9, HI), task(2, 2, 7, 7, LO), task(1, 3, 11, 11, HI)}};
	const auto r = explore(big, SchedulerKind::EDF, cfg);
	CHECK(r.outcome == Outcome::Inconclusive);
	CHECK(r.limit == "duration");
}

TEST_CASE("non-deterministic schedulers are refused by antichain search")
{
	const TaskSet ts = fx::tau_a();
	const Scheduler rnd = Scheduler::custom("coin", [](const SystemState&) { return Selection{}; }, false);
	CHECK_THROWS_AS(acbfs(ts, rnd, config(SearchAlgorithm::ACBFS)), std::invalid_argument);
	CHECK(bfs(ts, rnd, config(SearchAlgorithm::BFS)).outcome != Outcome::Inconclusive);
}

TEST_CASE("graph export")
{
	const TaskSet empty;
	const auto g0 = explore_graph(empty, Scheduler::make(SchedulerKind::EDF, empty), 10);
	REQUIRE(g0.states.size() == 1);
	CHECK(g0.edges.size() == 1);
	CHECK(g0.edges[0].source == 0);
	CHECK(g0.edges[0].target == 0);
	CHECK_FALSE(g0.partial);

	const TaskSet ts = fx::tau_a();
	const Scheduler sch = Scheduler::make(SchedulerKind::EDF_VD, ts);
	const auto part = explore_graph(ts, sch, 0);
	CHECK(part.partial);
	CHECK(part.edges.empty());

	const auto g = explore_graph(ts, sch, 1000);
	CHECK_FALSE(g.partial);
	CHECK(g.states.size() == 8);
	CHECK(g.edges.size() == 18);
	const std::string text = render_graph(g);
	CHECK(text.find("# states=8 edges=18 partial=0") != std::string::npos);
	CHECK(text.find("LO[00,00] -> HI[11,01] [released={1,2} ran=1 theta=0]") != std::string::npos);

	// Same state set as the brute-force model.
	const auto rg = ref::explore(ts, ref::initial(ts), ref::edf_vd);
	std::set<ref::State> expect(rg.states.begin(), rg.states.end()), got;
	for (const auto& s : g.states)
		got.insert(ref::from(s));
	CHECK(got == expect);
}

TEST_CASE("searches agree with brute-force reachability")
{
	std::mt19937_64 rng(83);
	int unsafe = 0, safe = 0;
	for (int round = 0; round < 300; ++round) {
		const bool implicit = round % 3 != 0;
		const TaskSet ts = ref::random_task_set(rng, 1 + round % 3, 5, !implicit);
		for (const char* name : {"edf", "edf-vd", "lwlf"}) {
			if (std::string(name) == "edf-vd" && !ref::edf_vd_defined(ts))
				continue;
			const bool miss = ref::miss_reachable(ts, ref::initial(ts), ref::by_name(name));
			const Scheduler sch = Scheduler::make(*parse_scheduler(name), ts);
			const Outcome want = miss ? Outcome::Unsafe : Outcome::Safe;
			CAPTURE(name);
			CHECK(bfs(ts, sch, config(SearchAlgorithm::BFS)).outcome == want);
			CHECK(acbfs(ts, sch, config(SearchAlgorithm::ACBFS)).outcome == want);
			// Unsafe oracles never change the verdict; the safe one is exact
			// only past due diligence.
			OracleSet unsafe_only = OracleSet::all();
			unsafe_only = OracleSet::from_mask(unsafe_only.mask() & ~1u);
			CHECK(acbfs(ts, sch, config(SearchAlgorithm::ACBFS, unsafe_only)).outcome == want);
			if (due_diligence(ts).pass)
				CHECK(acbfs(ts, sch, config(SearchAlgorithm::ACBFS, OracleSet::all())).outcome == want);
			(miss ? unsafe : safe) += 1;
		}
	}
	CHECK(unsafe > 50);
	CHECK(safe > 50);
}

TEST_CASE("reports do not depend on the worker count")
{
	std::mt19937_64 rng(89);
	for (int round = 0; round < 40; ++round) {
		const TaskSet ts = ref::random_task_set(rng, 3, 9, false);
		for (auto alg : {SearchAlgorithm::BFS, SearchAlgorithm::ACBFS}) {
			SearchConfig cfg = config(alg, OracleSet::parse("neg-laxity,over-demand").value());
			cfg.witness = true;
			cfg.workers = 1;
			const auto one = explore(ts, SchedulerKind::EDF, cfg);
			cfg.workers = 3;
			const auto three = explore(ts, SchedulerKind::EDF, cfg);
			CHECK(one.outcome == three.outcome);
			CHECK(one.visited == three.visited);
			CHECK(one.stored == three.stored);
			CHECK(one.layers == three.layers);
			CHECK(one.pruned_by_simulation == three.pruned_by_simulation);
			CHECK(one.oracle_hits == three.oracle_hits);
			CHECK(one.witness.has_value() == three.witness.has_value());
			if (one.witness && three.witness)
				CHECK(one.witness->last() == three.witness->last());
		}
	}
}

TEST_CASE("antichain iterations stay inside the reachable set")
{
	std::mt19937_64 rng(97);
	for (int round = 0; round < 60; ++round) {
		const TaskSet ts = ref::random_task_set(rng, 2 + round % 2, 5, false);
		const auto g = ref::explore(ts, ref::initial(ts), ref::edf);
		std::set<ref::State> reach(g.states.begin(), g.states.end());
		std::vector<SystemState> previous;
		const Scheduler sch = Scheduler::make(SchedulerKind::EDF, ts);
		acbfs(ts, sch, config(SearchAlgorithm::ACBFS), [&](const IterationView& v) {
			for (const auto& s : v.frontier) {
				CHECK(reach.count(ref::from(s)) == 1);
				CHECK(v.reached.covers(s));
			}
			// Whatever the new antichain dropped is still covered by it.
			for (const auto& s : v.evicted)
				CHECK(v.reached.covers(s));
			for (const auto& s : previous)
				CHECK(v.reached.covers(s));
			previous = v.reached.elements();
		});
	}
}
