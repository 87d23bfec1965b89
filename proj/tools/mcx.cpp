// mcx: exact schedulability analysis of dual-criticality sporadic task sets.
//
// Exit codes: 0 safe, 1 unsafe, 2 inconclusive, 3 usage or input error,
// 4 due-diligence failure without --force.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "mcx/experiment.hpp"
#include "mcx/explorer.hpp"
#include "mcx/generator.hpp"
#include "mcx/io.hpp"

namespace {

using namespace mcx;

constexpr int kExitError = 3;
constexpr int kExitDueDiligence = 4;

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

SchedulerKind scheduler_arg(const std::string& name)
{
	auto k = parse_scheduler(name);
	if (!k)
		throw UsageError("unknown scheduler '" + name + "' (expected edf, edf-vd or lwlf)");
	return *k;
}

TaskSet checked_task_set(const std::string& path)
{
	TaskSet ts = load_task_set(path);
	auto problems = validate(ts);
	if (!problems.empty()) {
		std::string msg = path + ": invalid task set";
		for (const auto& v : problems)
			msg += "\n  task " + std::to_string(v.task_id) + " " + v.field + ": " + v.message;
		throw FormatError(msg);
	}
	return ts;
}

struct AnalyzeArgs {
	std::string file;
	std::string scheduler = "edf-vd";
	std::string search = "acbfs";
	std::string oracles = "all";
	std::optional<std::uint64_t> max_states;
	std::optional<double> timeout_s;
	std::optional<std::size_t> workers;
	bool witness = false;
	bool force = false;
	bool periodic = false;
	std::optional<std::string> from;
};

int analyze(const AnalyzeArgs& a)
{
	const TaskSet ts = checked_task_set(a.file);
	const SchedulerKind kind = scheduler_arg(a.scheduler);
	auto search = parse_search(a.search);
	if (!search)
		throw UsageError("unknown search '" + a.search + "' (expected bfs or acbfs)");
	auto oracles = OracleSet::parse(a.oracles);
	if (!oracles)
		throw UsageError("bad oracle list '" + a.oracles + "'");

	const DueDiligence dd = due_diligence(ts);
	if (!dd && !a.force) {
		std::cerr << "mcx: due diligence failed: " << dd.reason << " (use --force to explore anyway)\n";
		return kExitDueDiligence;
	}
	if (!dd)
		std::cerr << "mcx: warning: due diligence failed: " << dd.reason << "\n";

	SearchConfig cfg;
	cfg.algorithm = *search;
	cfg.oracles = *oracles;
	cfg.limits.max_states = a.max_states;
	if (a.timeout_s)
		cfg.limits.max_duration = std::chrono::nanoseconds(static_cast<std::int64_t>(*a.timeout_s * 1e9));
	cfg.workers = a.workers ? *a.workers : workers_from_env(1);
	cfg.witness = a.witness;
	if (a.periodic)
		cfg.successor_options.release_model = ReleaseModel::Periodic;
	if (a.from) {
		cfg.start = parse_state(*a.from);
		if (!cfg.start || cfg.start->size() != ts.size() || !is_valid(ts, *cfg.start))
			throw UsageError("bad start state '" + *a.from + "'");
	}

	const ExplorationReport r = explore(ts, Scheduler::make(kind, ts), cfg);
	Json out;
	if (ts.name)
		out["task_set"] = *ts.name;
	out["scheduler"] = std::string(to_string(kind));
	out["search"] = std::string(to_string(*search));
	out["oracles"] = oracles->name();
	out["due_diligence"] = dd.pass;
	const Json report = to_json(r);
	for (const auto& [k, v] : report.items())
		out[k] = v;
	std::cout << out.dump(2) << "\n";
	switch (r.outcome) {
	case Outcome::Safe:
		return 0;
	case Outcome::Unsafe:
		return 1;
	case Outcome::Inconclusive:
		return 2;
	}
	return kExitError;
}

int experiment(const std::string& spec_file, const std::optional<std::string>& output_dir,
               std::optional<std::size_t> workers, bool quiet)
{
	Json j;
	try {
		j = Json::parse(read_file(spec_file));
	} catch (const Json::parse_error& e) {
		throw FormatError(spec_file + ": " + e.what());
	}
	ExperimentSpec spec = parse_experiment(j);
	if (output_dir)
		spec.output_dir = *output_dir;
	spec.workers = workers ? *workers : workers_from_env(spec.workers);

	Progress progress;
	if (!quiet)
		progress = [](std::size_t done, std::size_t total) {
			if (done == total || done % 10 == 0)
				std::fprintf(stderr, "\r%zu/%zu task sets", done, total);
			if (done == total)
				std::fprintf(stderr, "\n");
		};
	const ExperimentResult result = run_experiment(spec, progress);
	for (const auto& p : write_outputs(spec, result))
		std::cout << p.string() << "\n";
	return 0;
}

int generate_cmd(const GenParams& p, const std::string& dir)
{
	namespace fs = std::filesystem;
	if (auto err = check(p))
		throw UsageError(*err);
	const GenReport r = generate(p);
	Json files = Json::array();
	for (std::size_t i = 0; i < r.accepted.size(); ++i) {
		char name[32];
		std::snprintf(name, sizeof name, "set-%04zu.json", i);
		TaskSet ts = r.accepted[i];
		ts.name = "seed" + std::to_string(p.seed) + "-" + std::to_string(i);
		save_task_set(fs::path(dir) / name, ts);
		files.push_back({{"file", name}, {"attempt", r.attempt_of[i]}});
	}
	Json manifest;
	manifest["params"] = to_json(p);
	manifest["accepted"] = r.accepted.size();
	manifest["attempts"] = r.attempts;
	manifest["dropped"] = to_json(r.dropped);
	manifest["files"] = std::move(files);
	write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
	std::cout << "accepted " << r.accepted.size() << " of " << r.attempts << " attempts; dropped "
	          << r.dropped.total() << "\n";
	return 0;
}

int graph(const std::string& file, const std::string& scheduler, std::size_t bound)
{
	const TaskSet ts = checked_task_set(file);
	const SchedulerKind kind = scheduler_arg(scheduler);
	const AutomatonGraph g = explore_graph(ts, Scheduler::make(kind, ts), bound);
	std::cout << render_graph(g);
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Exact schedulability analysis for dual-criticality sporadic task sets"};
	app.require_subcommand(1);

	AnalyzeArgs aa;
	auto* an = app.add_subcommand("analyze", "Explore one task set and print the report as JSON");
	an->add_option("file", aa.file, "Task-set JSON file")->required();
	an->add_option("-s,--scheduler", aa.scheduler, "edf, edf-vd or lwlf")->capture_default_str();
	an->add_option("--search", aa.search, "bfs or acbfs")->capture_default_str();
	an->add_option("-o,--oracles", aa.oracles, "all, none, or comma-separated oracle names")->capture_default_str();
	an->add_option("--max-states", aa.max_states, "Give up after admitting this many states");
	an->add_option("--timeout", aa.timeout_s, "Give up after this many seconds");
	an->add_option("-j,--workers", aa.workers, "Expansion threads (default: MCX_WORKERS or 1)");
	an->add_flag("--witness", aa.witness, "Include a path to the failing state");
	an->add_flag("--force", aa.force, "Explore even when due diligence fails");
	an->add_flag("--periodic", aa.periodic, "Release every eligible task immediately");
	an->add_option("--from", aa.from, "Start from this state instead of the initial one, e.g. LO[12,00]");

	std::string spec_file;
	std::optional<std::string> out_dir;
	std::optional<std::size_t> ex_workers;
	bool quiet = false;
	auto* ex = app.add_subcommand("experiment", "Run an experiment spec and write CSV/SVG results");
	ex->add_option("spec", spec_file, "Experiment spec JSON file")->required();
	ex->add_option("--output-dir", out_dir, "Override the spec's output directory");
	ex->add_option("-j,--workers", ex_workers, "Parallel explorations");
	ex->add_flag("-q,--quiet", quiet, "No progress output");

	GenParams gp;
	gp.count = 10;
	std::string gen_dir = "tasksets";
	auto* ge = app.add_subcommand("generate", "Generate random task sets");
	ge->add_option("--n", gp.n, "Tasks per set")->capture_default_str();
	ge->add_option("--t-min", gp.t_min, "Smallest period")->capture_default_str();
	ge->add_option("--t-max", gp.t_max, "Largest period")->capture_default_str();
	ge->add_option("--p-hi", gp.p_hi, "Probability that a task is HI")->capture_default_str();
	ge->add_option("--u-target", gp.u_target, "Target average utilization")->capture_default_str();
	ge->add_option("--count", gp.count, "Sets to accept")->capture_default_str();
	ge->add_option("--seed", gp.seed, "Random seed")->capture_default_str();
	ge->add_option("--max-attempts", gp.max_attempts, "Attempt cap (0: 1000 per set)");
	ge->add_option("--output-dir", gen_dir, "Destination directory")->capture_default_str();

	std::string graph_file, graph_sched = "edf-vd";
	std::size_t bound = 1000;
	auto* gr = app.add_subcommand("graph", "Dump the developed automaton as an edge list");
	gr->add_option("file", graph_file, "Task-set JSON file")->required();
	gr->add_option("-s,--scheduler", graph_sched, "edf, edf-vd or lwlf")->capture_default_str();
	gr->add_option("--bound", bound, "Maximum number of expanded states")->capture_default_str();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : kExitError;
	}

	try {
		if (*an)
			return analyze(aa);
		if (*ex)
			return experiment(spec_file, out_dir, ex_workers, quiet);
		if (*ge)
			return generate_cmd(gp, gen_dir);
		if (*gr)
			return graph(graph_file, graph_sched, bound);
	} catch (const std::exception& e) {
		std::cerr << "mcx: " << e.what() << "\n";
		return kExitError;
	}
	return kExitError;
}
