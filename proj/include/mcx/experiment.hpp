#ifndef MCX_EXPERIMENT_HPP
#define MCX_EXPERIMENT_HPP

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcx/explorer.hpp"
#include "mcx/generator.hpp"
#include "mcx/io.hpp"

namespace mcx {

enum class ExperimentKind { BfsVsAcbfs, OracleImpact, Scalability, SchedulabilityCurve };

std::string_view to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

// Batch of explorations over a generated corpus. The generation grid is the
// cartesian product n_values x t_max_values x u_targets; each point draws
// gen.count sets with its own seed.
struct ExperimentSpec {
	ExperimentKind kind = ExperimentKind::OracleImpact;
	GenParams gen;
	std::vector<std::size_t> n_values;
	std::vector<Time> t_max_values;
	std::vector<double> u_targets;
	std::vector<SchedulerKind> schedulers;
	std::vector<SearchAlgorithm> searches;
	std::vector<OracleSet> oracles;
	std::chrono::nanoseconds timeout = std::chrono::minutes(15);
	std::optional<std::uint64_t> max_states;
	std::filesystem::path output_dir = "results";
	bool svg = true;
	std::size_t workers = 1;
};

// Reads a JSON spec. Keys: kind, output_dir, seed, count, n, t_min, t_max,
// p_hi, u_target (numbers or "[f;t;s]" ranges for n, t_max, u_target),
// schedulers, searches, oracles (list of OracleSet specs), timeout_s,
// max_states, svg, workers. Omitted lists get per-kind defaults.
ExperimentSpec parse_experiment(const Json& j);
Json to_json(const ExperimentSpec& s);

struct GridPoint {
	std::size_t n = 0;
	Time t_max = 0;
	double u_target = 0;
	std::uint64_t seed = 0; // generator seed for this point
};

struct RunRow {
	std::size_t point = 0;
	std::size_t set_index = 0;   // position among the point's accepted sets
	std::uint64_t attempt = 0;   // generator stream index of the set
	SchedulerKind scheduler = SchedulerKind::EDF;
	SearchAlgorithm search = SearchAlgorithm::ACBFS;
	OracleSet oracles;
	ExplorationReport report;
	bool due_diligence = true;
	bool sufficient = false;     // EDF-VD utilization test
};

struct ExperimentResult {
	std::vector<GridPoint> points;
	std::vector<std::vector<TaskSet>> sets; // per point
	std::vector<DropCounters> dropped;      // per point
	std::vector<RunRow> rows;               // sorted by (point, set, scheduler, search, oracles)
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(const ExperimentSpec& spec, const Progress& progress = {});

// Writes runs.csv, summary.csv, a kind-specific table, the resolved spec and
// the optional SVG plot into spec.output_dir. Returns the files written.
std::vector<std::filesystem::path> write_outputs(const ExperimentSpec& spec,
                                                 const ExperimentResult& result);

std::string set_id(const ExperimentResult& r, const RunRow& row);

// Median of a sample; the mean of the two middle values for even sizes.
double median(std::vector<double> v);

// Outcome of each (point, set, scheduler): the first conclusive run decides.
std::optional<bool> schedulable(const ExperimentResult& r, const RunRow& row);

// Minimal SVG line chart.
struct Series {
	std::string name;
	std::vector<double> x;
	std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           bool log_y = false);

} // namespace mcx

#endif
