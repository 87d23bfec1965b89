#include "mcx/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace mcx {

Json to_json(const TaskSet& ts)
{
	Json j = Json::object();
	if (ts.name)
		j["name"] = *ts.name;
	Json tasks = Json::array();
	for (const auto& t : ts.tasks)
		tasks.push_back({{"c_lo", t.c_lo},
		                 {"c_hi", t.c_hi},
		                 {"deadline", t.deadline},
		                 {"period", t.period},
		                 {"level", std::string(to_string(t.level))}});
	j["tasks"] = std::move(tasks);
	return j;
}

namespace {

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where)
{
	if (!j.is_object())
		throw FormatError(where + ": expected an object");
	for (const auto& [key, value] : j.items())
		if (!allowed.count(key))
			throw FormatError(where + ": unknown field '" + key + "'");
}

Time integer_field(const Json& j, const char* key, const std::string& where)
{
	if (!j.contains(key))
		throw FormatError(where + ": missing field '" + key + "'");
	const Json& v = j.at(key);
	if (!v.is_number_integer())
		throw FormatError(where + ": field '" + key + "' must be an integer");
	return v.get<Time>();
}

} // namespace

TaskSet task_set_from_json(const Json& j)
{
	only_keys(j, {"name", "tasks"}, "task set");
	TaskSet ts;
	if (j.contains("name")) {
		if (!j["name"].is_string())
			throw FormatError("task set: 'name' must be a string");
		ts.name = j["name"].get<std::string>();
	}
	if (!j.contains("tasks") || !j["tasks"].is_array())
		throw FormatError("task set: 'tasks' must be an array");
	std::size_t id = 0;
	for (const auto& jt : j["tasks"]) {
		const std::string where = "task " + std::to_string(++id);
		only_keys(jt, {"c_lo", "c_hi", "deadline", "period", "level"}, where);
		Task t;
		t.c_lo = integer_field(jt, "c_lo", where);
		t.c_hi = integer_field(jt, "c_hi", where);
		t.deadline = integer_field(jt, "deadline", where);
		t.period = integer_field(jt, "period", where);
		if (!jt.contains("level") || !jt["level"].is_string())
			throw FormatError(where + ": 'level' must be \"LO\" or \"HI\"");
		auto level = parse_criticality(jt["level"].get<std::string>());
		if (!level)
			throw FormatError(where + ": 'level' must be \"LO\" or \"HI\"");
		t.level = *level;
		ts.tasks.push_back(t);
	}
	return ts;
}

std::string read_file(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw std::runtime_error("cannot open " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
	if (path.has_parent_path())
		std::filesystem::create_directories(path.parent_path());
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot write " + path.string());
	out << text;
}

TaskSet load_task_set(const std::filesystem::path& path)
{
	const std::string text = read_file(path);
	Json j;
	try {
		j = Json::parse(text);
	} catch (const Json::parse_error& e) {
		throw FormatError(path.string() + ": " + e.what());
	}
	return task_set_from_json(j);
}

void save_task_set(const std::filesystem::path& path, const TaskSet& ts)
{
	write_file(path, to_json(ts).dump(2) + "\n");
}

Json to_json(const Witness& w)
{
	Json steps = Json::array();
	for (const auto& s : w.steps)
		steps.push_back({{"label", render(s.label)}, {"state", render(s.state)}});
	Json j = {{"initial", render(w.initial)}, {"steps", std::move(steps)}};
	j["flagged_by"] = w.flagged_by ? std::string(to_string(*w.flagged_by)) : std::string("deadline-miss");
	return j;
}

Json to_json(const ExplorationReport& r)
{
	Json j;
	j["outcome"] = std::string(to_string(r.outcome));
	if (r.outcome == Outcome::Inconclusive)
		j["limit"] = r.limit;
	j["visited"] = r.visited;
	j["stored"] = r.stored;
	j["layers"] = r.layers;
	Json pruned;
	pruned["simulation"] = r.pruned_by_simulation;
	for (auto k : kAllOracles)
		pruned[std::string(to_string(k))] = r.hits(k);
	j["pruned"] = std::move(pruned);
	j["deadline_miss"] = r.deadline_miss;
	j["duration_ns"] = r.duration.count();
	if (r.witness)
		j["witness"] = to_json(*r.witness);
	return j;
}

Json to_json(const GenParams& p)
{
	return {{"n", p.n},         {"t_min", p.t_min},       {"t_max", p.t_max},
	        {"p_hi", p.p_hi},   {"u_target", p.u_target}, {"count", p.count},
	        {"seed", p.seed},   {"max_attempts", p.max_attempts}};
}

Json to_json(const DropCounters& d)
{
	return {{"u_lo_over", d.u_lo_over},
	        {"u_hi_over", d.u_hi_over},
	        {"duplicate", d.duplicate},
	        {"single_criticality", d.single_criticality},
	        {"u_avg_deviation", d.u_avg_deviation},
	        {"sampler_infeasible", d.sampler_infeasible}};
}

} // namespace mcx
