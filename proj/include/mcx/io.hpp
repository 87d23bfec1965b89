#ifndef MCX_IO_HPP
#define MCX_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "mcx/explorer.hpp"
#include "mcx/generator.hpp"
#include "mcx/model.hpp"

namespace mcx {

using Json = nlohmann::ordered_json;

// Malformed input files: bad JSON, unknown or missing fields.
struct FormatError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// {"name"?: str, "tasks": [{"c_lo", "c_hi", "deadline", "period", "level"}]}
// Unknown keys are rejected.
Json to_json(const TaskSet& ts);
TaskSet task_set_from_json(const Json& j);

TaskSet load_task_set(const std::filesystem::path& path);
void save_task_set(const std::filesystem::path& path, const TaskSet& ts);

Json to_json(const ExplorationReport& r);
Json to_json(const GenParams& p);
Json to_json(const DropCounters& d);
Json to_json(const Witness& w);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace mcx

#endif
