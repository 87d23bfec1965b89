#include "mcx/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace mcx {

std::string_view to_string(ExperimentKind k)
{
	switch (k) {
	case ExperimentKind::BfsVsAcbfs:
		return "bfs-vs-acbfs";
	case ExperimentKind::OracleImpact:
		return "oracle-impact";
	case ExperimentKind::Scalability:
		return "scalability";
	case ExperimentKind::SchedulabilityCurve:
		return "schedulability-curve";
	}
	return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name)
{
	for (auto k : {ExperimentKind::BfsVsAcbfs, ExperimentKind::OracleImpact, ExperimentKind::Scalability,
	               ExperimentKind::SchedulabilityCurve})
		if (to_string(k) == name)
			return k;
	return std::nullopt;
}

namespace {

std::vector<double> grid_values(const Json& j, const char* key)
{
	const Json& v = j.at(key);
	if (v.is_number())
		return {v.get<double>()};
	if (v.is_string()) {
		if (auto r = parse_range(v.get<std::string>()))
			return *r;
		throw FormatError(std::string("experiment: bad range for '") + key + "'");
	}
	if (v.is_array()) {
		std::vector<double> out;
		for (const auto& x : v) {
			if (!x.is_number())
				throw FormatError(std::string("experiment: '") + key + "' entries must be numbers");
			out.push_back(x.get<double>());
		}
		if (out.empty())
			throw FormatError(std::string("experiment: '") + key + "' is empty");
		return out;
	}
	throw FormatError(std::string("experiment: bad value for '") + key + "'");
}

std::vector<std::string> string_list(const Json& j, const char* key)
{
	const Json& v = j.at(key);
	std::vector<std::string> out;
	if (v.is_string()) {
		out.push_back(v.get<std::string>());
		return out;
	}
	if (!v.is_array())
		throw FormatError(std::string("experiment: '") + key + "' must be a list of strings");
	for (const auto& x : v) {
		if (!x.is_string())
			throw FormatError(std::string("experiment: '") + key + "' must be a list of strings");
		out.push_back(x.get<std::string>());
	}
	return out;
}

template <typename T>
T whole(double x, const char* key)
{
	if (x < 0 || std::floor(x) != x)
		throw FormatError(std::string("experiment: '") + key + "' must hold non-negative integers");
	return static_cast<T>(x);
}

} // namespace

ExperimentSpec parse_experiment(const Json& j)
{
	static const std::set<std::string> keys = {
	    "kind",   "output_dir", "seed",       "count",      "n",       "t_min", "t_max",
	    "p_hi",   "u_target",   "schedulers", "searches",   "oracles", "timeout_s",
	    "max_states", "svg",    "workers"};
	if (!j.is_object())
		throw FormatError("experiment: expected an object");
	for (const auto& [key, value] : j.items())
		if (!keys.count(key))
			throw FormatError("experiment: unknown field '" + key + "'");
	if (!j.contains("kind") || !j["kind"].is_string())
		throw FormatError("experiment: 'kind' is required");
	auto kind = parse_experiment_kind(j["kind"].get<std::string>());
	if (!kind)
		throw FormatError("experiment: unknown kind '" + j["kind"].get<std::string>() + "'");

	ExperimentSpec s;
	s.kind = *kind;
	try {
		if (j.contains("output_dir"))
			s.output_dir = j["output_dir"].get<std::string>();
		if (j.contains("seed"))
			s.gen.seed = j["seed"].get<std::uint64_t>();
		if (j.contains("count"))
			s.gen.count = j["count"].get<std::size_t>();
		if (j.contains("t_min"))
			s.gen.t_min = j["t_min"].get<Time>();
		if (j.contains("p_hi"))
			s.gen.p_hi = j["p_hi"].get<double>();
		if (j.contains("timeout_s"))
			s.timeout = std::chrono::nanoseconds(static_cast<std::int64_t>(j["timeout_s"].get<double>() * 1e9));
		if (j.contains("max_states"))
			s.max_states = j["max_states"].get<std::uint64_t>();
		if (j.contains("svg"))
			s.svg = j["svg"].get<bool>();
		if (j.contains("workers"))
			s.workers = std::max<std::size_t>(1, j["workers"].get<std::size_t>());
	} catch (const Json::exception& e) {
		throw FormatError(std::string("experiment: ") + e.what());
	}

	for (double v : j.contains("n") ? grid_values(j, "n") : std::vector<double>{4})
		s.n_values.push_back(whole<std::size_t>(v, "n"));
	for (double v : j.contains("t_max") ? grid_values(j, "t_max") : std::vector<double>{12})
		s.t_max_values.push_back(whole<Time>(v, "t_max"));
	s.u_targets = j.contains("u_target") ? grid_values(j, "u_target") : range(0.8, 1.0, 0.05);

	if (j.contains("schedulers")) {
		for (const auto& name : string_list(j, "schedulers")) {
			auto k = parse_scheduler(name);
			if (!k)
				throw FormatError("experiment: unknown scheduler '" + name + "'");
			s.schedulers.push_back(*k);
		}
	} else if (s.kind == ExperimentKind::SchedulabilityCurve) {
		s.schedulers = {SchedulerKind::EDF, SchedulerKind::EDF_VD, SchedulerKind::LWLF};
	} else {
		s.schedulers = {SchedulerKind::EDF_VD};
	}

	if (j.contains("searches")) {
		for (const auto& name : string_list(j, "searches")) {
			auto a = parse_search(name);
			if (!a)
				throw FormatError("experiment: unknown search '" + name + "'");
			s.searches.push_back(*a);
		}
	} else if (s.kind == ExperimentKind::BfsVsAcbfs) {
		s.searches = {SearchAlgorithm::BFS, SearchAlgorithm::ACBFS};
	} else {
		s.searches = {SearchAlgorithm::ACBFS};
	}

	if (j.contains("oracles")) {
		for (const auto& spec : string_list(j, "oracles")) {
			auto os = OracleSet::parse(spec);
			if (!os)
				throw FormatError("experiment: bad oracle set '" + spec + "'");
			s.oracles.push_back(*os);
		}
	} else if (s.kind == ExperimentKind::OracleImpact) {
		s.oracles.push_back(OracleSet::none());
		for (auto k : kAllOracles)
			s.oracles.push_back(OracleSet::of({k}));
	} else if (s.kind == ExperimentKind::SchedulabilityCurve) {
		s.oracles = {OracleSet::of({OracleKind::HiOverDemand})};
	} else {
		s.oracles = {OracleSet::none()};
	}
	if (s.kind == ExperimentKind::OracleImpact &&
	    std::find(s.oracles.begin(), s.oracles.end(), OracleSet::none()) == s.oracles.end())
		s.oracles.insert(s.oracles.begin(), OracleSet::none());

	for (auto n : s.n_values)
		for (auto t : s.t_max_values) {
			GenParams p = s.gen;
			p.n = n;
			p.t_max = t;
			for (double u : s.u_targets) {
				p.u_target = u;
				if (auto err = check(p))
					throw FormatError("experiment: " + *err);
			}
		}
	return s;
}

Json to_json(const ExperimentSpec& s)
{
	Json j;
	j["kind"] = std::string(to_string(s.kind));
	j["output_dir"] = s.output_dir.string();
	j["seed"] = s.gen.seed;
	j["count"] = s.gen.count;
	j["t_min"] = s.gen.t_min;
	j["p_hi"] = s.gen.p_hi;
	j["n"] = s.n_values;
	j["t_max"] = s.t_max_values;
	j["u_target"] = s.u_targets;
	Json sch = Json::array(), sea = Json::array(), ora = Json::array();
	for (auto k : s.schedulers)
		sch.push_back(std::string(to_string(k)));
	for (auto a : s.searches)
		sea.push_back(std::string(to_string(a)));
	for (const auto& o : s.oracles)
		ora.push_back(o.name());
	j["schedulers"] = sch;
	j["searches"] = sea;
	j["oracles"] = ora;
	j["timeout_s"] = std::chrono::duration<double>(s.timeout).count();
	if (s.max_states)
		j["max_states"] = *s.max_states;
	j["svg"] = s.svg;
	j["workers"] = s.workers;
	return j;
}

double median(std::vector<double> v)
{
	if (v.empty())
		return std::nan("");
	std::sort(v.begin(), v.end());
	const std::size_t m = v.size() / 2;
	return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const Progress& progress)
{
	ExperimentResult r;
	for (auto n : spec.n_values)
		for (auto t : spec.t_max_values)
			for (double u : spec.u_targets) {
				GridPoint g{n, t, u, splitmix64(spec.gen.seed + r.points.size())};
				r.points.push_back(g);
			}

	struct Job {
		std::size_t point, set;
	};
	std::vector<Job> jobs;
	std::vector<std::vector<std::uint64_t>> attempts;
	for (std::size_t k = 0; k < r.points.size(); ++k) {
		GenParams p = spec.gen;
		p.n = r.points[k].n;
		p.t_max = r.points[k].t_max;
		p.u_target = r.points[k].u_target;
		p.seed = r.points[k].seed;
		GenReport g = generate(p);
		for (std::size_t i = 0; i < g.accepted.size(); ++i) {
			g.accepted[i].name = "p" + std::to_string(k) + "-s" + std::to_string(i);
			jobs.push_back({k, i});
		}
		r.sets.push_back(std::move(g.accepted));
		r.dropped.push_back(g.dropped);
		attempts.push_back(std::move(g.attempt_of));
	}

	const std::size_t per_set = spec.schedulers.size() * spec.searches.size() * spec.oracles.size();
	r.rows.resize(jobs.size() * per_set);
	std::atomic<std::size_t> next{0}, done{0};
	std::mutex progress_mutex;

	auto work = [&] {
		for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
			const auto [k, i] = jobs[j];
			const TaskSet& ts = r.sets[k][i];
			const bool dd = due_diligence(ts).pass;
			const bool suff = edf_vd_sufficient_test(ts);
			std::size_t slot = j * per_set;
			for (auto kind : spec.schedulers) {
				std::optional<Scheduler> sch;
				std::string error;
				try {
					sch = Scheduler::make(kind, ts);
				} catch (const std::exception& e) {
					error = e.what();
				}
				for (auto search : spec.searches)
					for (const auto& os : spec.oracles) {
						RunRow& row = r.rows[slot++];
						row.point = k;
						row.set_index = i;
						row.attempt = attempts[k][i];
						row.scheduler = kind;
						row.search = search;
						row.oracles = os;
						row.due_diligence = dd;
						row.sufficient = suff;
						if (!sch) {
							row.report.limit = "error: " + error;
							continue;
						}
						SearchConfig cfg;
						cfg.algorithm = search;
						cfg.oracles = os;
						cfg.limits.max_duration = spec.timeout;
						cfg.limits.max_states = spec.max_states;
						row.report = explore(ts, *sch, cfg);
					}
			}
			const std::size_t d = done.fetch_add(1) + 1;
			if (progress) {
				std::lock_guard lock(progress_mutex);
				progress(d, jobs.size());
			}
		}
	};
	const std::size_t workers = std::max<std::size_t>(1, std::min(spec.workers, jobs.size()));
	if (workers == 1) {
		work();
	} else {
		std::vector<std::thread> pool;
		for (std::size_t w = 0; w < workers; ++w)
			pool.emplace_back(work);
		for (auto& t : pool)
			t.join();
	}
	return r;
}

std::string set_id(const ExperimentResult& r, const RunRow& row)
{
	const auto& name = r.sets[row.point][row.set_index].name;
	return name ? *name : "p" + std::to_string(row.point) + "-s" + std::to_string(row.set_index);
}

std::optional<bool> schedulable(const ExperimentResult& r, const RunRow& row)
{
	for (const auto& x : r.rows)
		if (x.point == row.point && x.set_index == row.set_index && x.scheduler == row.scheduler &&
		    x.report.outcome != Outcome::Inconclusive)
			return x.report.outcome == Outcome::Safe;
	return std::nullopt;
}

namespace {

using SetKey = std::tuple<std::size_t, std::size_t, SchedulerKind>;

std::map<SetKey, bool> verdicts(const ExperimentResult& r)
{
	std::map<SetKey, bool> out;
	for (const auto& x : r.rows)
		if (x.report.outcome != Outcome::Inconclusive)
			out.try_emplace(SetKey{x.point, x.set_index, x.scheduler}, x.report.outcome == Outcome::Safe);
	return out;
}

std::string fmt(double x)
{
	if (std::isnan(x))
		return "";
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.6g", x);
	return buf;
}

std::string point_columns(const GridPoint& g)
{
	return std::to_string(g.n) + "," + std::to_string(g.t_max) + "," + fmt(g.u_target);
}

const char* split_name(int split)
{
	return split == 0 ? "all" : split == 1 ? "schedulable" : "unschedulable";
}

bool in_split(int split, std::optional<bool> verdict)
{
	return split == 0 || (verdict && *verdict == (split == 1));
}

std::string runs_csv(const ExperimentResult& r)
{
	std::ostringstream out;
	out << "set_id,point,n,t_max,u_target,seed,set_index,attempt,scheduler,search,oracles,outcome,limit,"
	       "visited,stored,layers,duration_ns,pruned_simulation";
	for (auto k : kAllOracles)
		out << ",pruned_" << to_string(k);
	out << ",deadline_miss,due_diligence,edf_vd_sufficient\n";
	for (const auto& x : r.rows) {
		const GridPoint& g = r.points[x.point];
		out << set_id(r, x) << ',' << x.point << ',' << point_columns(g) << ',' << g.seed << ','
		    << x.set_index << ',' << x.attempt << ',' << to_string(x.scheduler) << ','
		    << to_string(x.search) << ',' << x.oracles.name() << ',' << to_string(x.report.outcome)
		    << ',' << x.report.limit << ',' << x.report.visited << ',' << x.report.stored << ','
		    << x.report.layers << ',' << x.report.duration.count() << ','
		    << x.report.pruned_by_simulation;
		for (auto k : kAllOracles)
			out << ',' << x.report.hits(k);
		out << ',' << x.report.deadline_miss << ',' << x.due_diligence << ',' << x.sufficient << '\n';
	}
	return out.str();
}

// Rows grouped by (point, scheduler, search, oracles).
using ConfigKey = std::tuple<std::size_t, SchedulerKind, SearchAlgorithm, std::uint32_t>;

std::string summary_csv(const ExperimentResult& r)
{
	const auto v = verdicts(r);
	std::map<ConfigKey, std::vector<const RunRow*>> groups;
	for (const auto& x : r.rows)
		groups[{x.point, x.scheduler, x.search, x.oracles.mask()}].push_back(&x);
	std::ostringstream out;
	out << "n,t_max,u_target,scheduler,search,oracles,split,runs,safe,unsafe,inconclusive,"
	       "median_visited,median_stored,median_duration_ns\n";
	for (const auto& [key, rows] : groups) {
		for (int split = 0; split < 3; ++split) {
			std::vector<double> visited, stored, dur;
			std::size_t safe = 0, unsafe = 0, inconclusive = 0;
			for (const RunRow* x : rows) {
				auto it = v.find({x->point, x->set_index, x->scheduler});
				if (!in_split(split, it == v.end() ? std::nullopt : std::optional<bool>(it->second)))
					continue;
				visited.push_back(static_cast<double>(x->report.visited));
				stored.push_back(static_cast<double>(x->report.stored));
				dur.push_back(static_cast<double>(x->report.duration.count()));
				safe += x->report.outcome == Outcome::Safe;
				unsafe += x->report.outcome == Outcome::Unsafe;
				inconclusive += x->report.outcome == Outcome::Inconclusive;
			}
			const RunRow& first = *rows.front();
			out << point_columns(r.points[first.point]) << ',' << to_string(first.scheduler) << ','
			    << to_string(first.search) << ',' << first.oracles.name() << ',' << split_name(split)
			    << ',' << visited.size() << ',' << safe << ',' << unsafe << ',' << inconclusive << ','
			    << fmt(median(visited)) << ',' << fmt(median(stored)) << ',' << fmt(median(dur)) << '\n';
		}
	}
	return out.str();
}

struct Table {
	std::string name;
	std::string csv;
	std::vector<Series> series;
	std::string title, x_label, y_label;
	bool log_y = false;
};

// Avoided-state ratio and time reduction of each oracle set against the
// oracle-free ACBFS run on the same set and scheduler.
Table oracle_impact(const ExperimentResult& r)
{
	const auto v = verdicts(r);
	std::map<SetKey, const RunRow*> baseline;
	for (const auto& x : r.rows)
		if (x.search == SearchAlgorithm::ACBFS && x.oracles.empty() &&
		    x.report.outcome != Outcome::Inconclusive)
			baseline[{x.point, x.set_index, x.scheduler}] = &x;

	// (point or SIZE_MAX for all, scheduler, oracles, split) -> samples
	using Key = std::tuple<std::size_t, SchedulerKind, std::uint32_t, int>;
	std::map<Key, std::pair<std::vector<double>, std::vector<double>>> acc;
	for (const auto& x : r.rows) {
		if (x.search != SearchAlgorithm::ACBFS || x.oracles.empty() ||
		    x.report.outcome == Outcome::Inconclusive)
			continue;
		auto b = baseline.find({x.point, x.set_index, x.scheduler});
		if (b == baseline.end() || b->second->report.visited == 0)
			continue;
		const double avoided = 1.0 - static_cast<double>(x.report.visited) /
		                                 static_cast<double>(b->second->report.visited);
		const double base_t = static_cast<double>(b->second->report.duration.count());
		const double reduction =
		    base_t > 0 ? 1.0 - static_cast<double>(x.report.duration.count()) / base_t : 0.0;
		auto it = v.find({x.point, x.set_index, x.scheduler});
		const std::optional<bool> verdict =
		    it == v.end() ? std::nullopt : std::optional<bool>(it->second);
		for (int split = 0; split < 3; ++split) {
			if (!in_split(split, verdict))
				continue;
			for (std::size_t p : {x.point, SIZE_MAX}) {
				auto& [a, t] = acc[{p, x.scheduler, x.oracles.mask(), split}];
				a.push_back(avoided);
				t.push_back(reduction);
			}
		}
	}

	Table t{"oracle_impact.csv", "", {}, "Median avoided-state ratio (unschedulable sets)", "U*",
	        "avoided ratio"};
	std::ostringstream out;
	out << "n,t_max,u_target,scheduler,oracles,split,runs,median_avoided_ratio,median_time_reduction\n";
	std::map<std::uint32_t, Series> plot;
	for (const auto& [key, samples] : acc) {
		const auto& [p, kind, mask, split] = key;
		const std::string name = OracleSet::from_mask(mask).name();
		if (p == SIZE_MAX)
			out << "all,all,all,";
		else
			out << point_columns(r.points[p]) << ',';
		const double med = median(samples.first);
		out << to_string(kind) << ',' << name << ',' << split_name(split) << ','
		    << samples.first.size() << ',' << fmt(med) << ',' << fmt(median(samples.second)) << '\n';
		if (p != SIZE_MAX && split == 2) {
			Series& s = plot[mask];
			s.name = name + " (" + std::string(to_string(kind)) + ")";
			s.x.push_back(r.points[p].u_target);
			s.y.push_back(med);
		}
	}
	t.csv = out.str();
	for (auto& [mask, s] : plot)
		t.series.push_back(std::move(s));
	return t;
}

// ACBFS against BFS on the same set, scheduler and oracle set.
Table reduction(const ExperimentResult& r)
{
	using PairKey = std::tuple<std::size_t, std::size_t, SchedulerKind, std::uint32_t>;
	std::map<PairKey, std::pair<const RunRow*, const RunRow*>> pairs;
	for (const auto& x : r.rows) {
		auto& slot = pairs[{x.point, x.set_index, x.scheduler, x.oracles.mask()}];
		(x.search == SearchAlgorithm::BFS ? slot.first : slot.second) = &x;
	}
	using Key = std::tuple<std::size_t, SchedulerKind, std::uint32_t>;
	struct Acc {
		std::vector<double> bfs, acbfs, ratio, time_ratio;
	};
	std::map<Key, Acc> acc;
	for (const auto& [key, pr] : pairs) {
		const auto& [p, i, kind, mask] = key;
		if (!pr.first || !pr.second || pr.first->report.outcome == Outcome::Inconclusive ||
		    pr.second->report.outcome == Outcome::Inconclusive || pr.first->report.visited == 0)
			continue;
		Acc& a = acc[{p, kind, mask}];
		const double b = static_cast<double>(pr.first->report.visited);
		const double c = static_cast<double>(pr.second->report.visited);
		a.bfs.push_back(b);
		a.acbfs.push_back(c);
		a.ratio.push_back(c / b);
		const double bt = static_cast<double>(pr.first->report.duration.count());
		if (bt > 0)
			a.time_ratio.push_back(static_cast<double>(pr.second->report.duration.count()) / bt);
	}
	Table t{"reduction.csv", "", {}, "Median visited states", "U*", "visited", true};
	std::ostringstream out;
	out << "n,t_max,u_target,scheduler,oracles,pairs,median_visited_bfs,median_visited_acbfs,"
	       "median_visited_ratio,median_time_ratio\n";
	std::map<std::uint32_t, std::pair<Series, Series>> plot;
	for (const auto& [key, a] : acc) {
		const auto& [p, kind, mask] = key;
		const std::string name = OracleSet::from_mask(mask).name();
		out << point_columns(r.points[p]) << ',' << to_string(kind) << ',' << name << ','
		    << a.bfs.size() << ',' << fmt(median(a.bfs)) << ',' << fmt(median(a.acbfs)) << ','
		    << fmt(median(a.ratio)) << ',' << fmt(median(a.time_ratio)) << '\n';
		auto& [sb, sa] = plot[mask];
		sb.name = "bfs " + name;
		sa.name = "acbfs " + name;
		sb.x.push_back(r.points[p].u_target);
		sa.x.push_back(r.points[p].u_target);
		sb.y.push_back(median(a.bfs));
		sa.y.push_back(median(a.acbfs));
	}
	t.csv = out.str();
	for (auto& [mask, s] : plot) {
		t.series.push_back(std::move(s.first));
		t.series.push_back(std::move(s.second));
	}
	return t;
}

Table scalability(const ExperimentResult& r)
{
	using Key = std::tuple<std::size_t, Time, SchedulerKind, SearchAlgorithm, std::uint32_t>;
	struct Acc {
		std::vector<double> dur, visited;
		std::size_t timeouts = 0;
	};
	std::map<Key, Acc> acc;
	for (const auto& x : r.rows) {
		const GridPoint& g = r.points[x.point];
		Acc& a = acc[{g.n, g.t_max, x.scheduler, x.search, x.oracles.mask()}];
		a.dur.push_back(static_cast<double>(x.report.duration.count()));
		a.visited.push_back(static_cast<double>(x.report.visited));
		a.timeouts += x.report.outcome == Outcome::Inconclusive;
	}
	Table t{"scalability.csv", "", {}, "Median exploration time", "T max", "seconds", true};
	std::ostringstream out;
	out << "n,t_max,scheduler,search,oracles,runs,inconclusive,median_duration_ns,median_visited\n";
	std::map<std::size_t, Series> plot;
	for (const auto& [key, a] : acc) {
		const auto& [n, tmax, kind, search, mask] = key;
		out << n << ',' << tmax << ',' << to_string(kind) << ',' << to_string(search) << ','
		    << OracleSet::from_mask(mask).name() << ',' << a.dur.size() << ',' << a.timeouts << ','
		    << fmt(median(a.dur)) << ',' << fmt(median(a.visited)) << '\n';
		Series& s = plot[n];
		s.name = "n=" + std::to_string(n);
		s.x.push_back(static_cast<double>(tmax));
		s.y.push_back(median(a.dur) / 1e9);
	}
	t.csv = out.str();
	for (auto& [n, s] : plot)
		t.series.push_back(std::move(s));
	return t;
}

// Share of sets found schedulable per U* bucket and test.
Table curve(const ExperimentResult& r)
{
	using Key = std::tuple<std::size_t, std::string>;
	std::map<Key, std::pair<std::size_t, std::size_t>> acc; // (schedulable, total)
	std::set<std::tuple<std::size_t, std::size_t>> counted;
	for (const auto& x : r.rows) {
		const std::string test = std::string(to_string(x.scheduler)) + " " + std::string(to_string(x.search)) +
		                         " " + x.oracles.name();
		auto& a = acc[{x.point, test}];
		a.first += x.report.outcome == Outcome::Safe;
		++a.second;
		if (counted.insert({x.point, x.set_index}).second) {
			auto& s = acc[{x.point, "edf-vd sufficient"}];
			s.first += x.sufficient;
			++s.second;
		}
	}
	Table t{"curve.csv", "", {}, "Schedulability ratio", "U*", "ratio"};
	std::ostringstream out;
	out << "n,t_max,u_target,test,schedulable,total,ratio\n";
	std::map<std::string, Series> plot;
	for (const auto& [key, a] : acc) {
		const auto& [p, test] = key;
		const double ratio = a.second ? static_cast<double>(a.first) / static_cast<double>(a.second) : 0.0;
		out << point_columns(r.points[p]) << ',' << test << ',' << a.first << ',' << a.second << ','
		    << fmt(ratio) << '\n';
		Series& s = plot[test];
		s.name = test;
		s.x.push_back(r.points[p].u_target);
		s.y.push_back(ratio);
	}
	t.csv = out.str();
	for (auto& [name, s] : plot)
		t.series.push_back(std::move(s));
	return t;
}

} // namespace

std::vector<std::filesystem::path> write_outputs(const ExperimentSpec& spec, const ExperimentResult& result)
{
	namespace fs = std::filesystem;
	std::vector<fs::path> written;
	auto emit = [&](const std::string& name, const std::string& text) {
		const fs::path p = spec.output_dir / name;
		write_file(p, text);
		written.push_back(p);
	};
	emit("spec.json", to_json(spec).dump(2) + "\n");
	emit("runs.csv", runs_csv(result));
	emit("summary.csv", summary_csv(result));

	Json gen = Json::array();
	for (std::size_t k = 0; k < result.points.size(); ++k) {
		const GridPoint& g = result.points[k];
		gen.push_back({{"point", k},
		               {"n", g.n},
		               {"t_max", g.t_max},
		               {"u_target", g.u_target},
		               {"seed", g.seed},
		               {"accepted", result.sets[k].size()},
		               {"dropped", to_json(result.dropped[k])}});
	}
	emit("generation.json", gen.dump(2) + "\n");

	Table t;
	switch (spec.kind) {
	case ExperimentKind::OracleImpact:
		t = oracle_impact(result);
		break;
	case ExperimentKind::BfsVsAcbfs:
		t = reduction(result);
		break;
	case ExperimentKind::Scalability:
		t = scalability(result);
		break;
	case ExperimentKind::SchedulabilityCurve:
		t = curve(result);
		break;
	}
	emit(t.name, t.csv);
	if (spec.svg)
		emit(std::string(to_string(spec.kind)) + ".svg", svg_line_chart(t.title, t.x_label, t.y_label, t.series, t.log_y));
	return written;
}

namespace {

std::string escape_xml(const std::string& s)
{
	std::string out;
	for (char c : s) {
		switch (c) {
		case '<':
			out += "&lt;";
			break;
		case '>':
			out += "&gt;";
			break;
		case '&':
			out += "&amp;";
			break;
		case '"':
			out += "&quot;";
			break;
		default:
			out.push_back(c);
		}
	}
	return out;
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi)
{
	const double span = hi - lo;
	const double raw = span / 5;
	const double mag = std::pow(10.0, std::floor(std::log10(raw)));
	double step = mag;
	for (double m : {1.0, 2.0, 5.0, 10.0})
		if (raw <= m * mag) {
			step = m * mag;
			break;
		}
	std::vector<double> out;
	for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
		out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
	return out;
}

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series, bool log_y)
{
	constexpr double W = 720, H = 440, L = 70, R = 200, T = 40, B = 50;
	static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
	                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
	auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-12)) : y; };

	double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
	for (const auto& s : series)
		for (std::size_t i = 0; i < s.x.size(); ++i) {
			if (std::isnan(s.y[i]) || (log_y && s.y[i] <= 0))
				continue;
			x0 = std::min(x0, s.x[i]);
			x1 = std::max(x1, s.x[i]);
			y0 = std::min(y0, ty(s.y[i]));
			y1 = std::max(y1, ty(s.y[i]));
		}
	if (!std::isfinite(x0)) {
		x0 = 0;
		x1 = 1;
		y0 = 0;
		y1 = 1;
	}
	if (x1 == x0) {
		x0 -= 0.5;
		x1 += 0.5;
	}
	if (y1 == y0) {
		y0 -= 0.5;
		y1 += 0.5;
	}
	const double pad = (y1 - y0) * 0.05;
	y0 -= pad;
	y1 += pad;
	auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
	auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

	std::ostringstream o;
	o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
	  << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
	o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
	o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
	  << "</text>\n";
	o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
	  << "\" stroke=\"black\"/>\n";
	o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
	  << "\" stroke=\"black\"/>\n";
	for (double v : ticks(x0, x1)) {
		o << "<line x1=\"" << px(v) << "\" y1=\"" << H - B << "\" x2=\"" << px(v) << "\" y2=\"" << H - B + 5
		  << "\" stroke=\"black\"/>";
		o << "<text x=\"" << px(v) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << fmt(v)
		  << "</text>\n";
	}
	for (double v : ticks(y0, y1)) {
		o << "<line x1=\"" << L - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << W - R << "\" y2=\"" << py(v)
		  << "\" stroke=\"#ddd\"/>";
		o << "<text x=\"" << L - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
		  << (log_y ? "1e" + fmt(v) : fmt(v)) << "</text>\n";
	}
	o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
	  << escape_xml(x_label) << "</text>\n";
	o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
	  << escape_xml(y_label) << (log_y ? " (log)" : "") << "</text>\n";

	for (std::size_t k = 0; k < series.size(); ++k) {
		const auto& s = series[k];
		const char* color = palette[k % std::size(palette)];
		o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
		for (std::size_t i = 0; i < s.x.size(); ++i)
			if (!std::isnan(s.y[i]) && (!log_y || s.y[i] > 0))
				o << px(s.x[i]) << ',' << py(ty(s.y[i])) << ' ';
		o << "\"/>\n";
		for (std::size_t i = 0; i < s.x.size(); ++i)
			if (!std::isnan(s.y[i]) && (!log_y || s.y[i] > 0))
				o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(ty(s.y[i])) << "\" r=\"2.5\" fill=\""
				  << color << "\"/>";
		o << "\n";
		const double ly = T + 10 + 18 * static_cast<double>(k);
		o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
		  << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
		o << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name) << "</text>\n";
	}
	o << "</svg>\n";
	return o.str();
}

} // namespace mcx
