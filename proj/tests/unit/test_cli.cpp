#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "../support/fixtures.hpp"
#include "mcx/io.hpp"

#ifndef MCX_CLI_PATH
#error "MCX_CLI_PATH must name the mcx binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
	int code;
	std::string out;
};

Run cli(const std::string& args)
{
	const fs::path out = fs::temp_directory_path() / "mcx-cli-test.out";
	const std::string cmd = std::string(MCX_CLI_PATH) + " " + args + " >" + out.string() + " 2>&1";
	const int status = std::system(cmd.c_str());
	std::ifstream in(out);
	std::stringstream ss;
	ss << in.rdbuf();
	return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_set(const std::string& name, const mcx::TaskSet& ts)
{
	const fs::path p = fs::temp_directory_path() / "mcx-cli-sets" / name;
	mcx::save_task_set(p, ts);
	return p;
}

} // namespace

TEST_CASE("analyze exit codes")
{
	const auto tau = write_set("tau.json", fx::tau_a());
	Run r = cli("analyze " + tau.string());
	CHECK(r.code == 0);
	const auto j = mcx::Json::parse(r.out);
	CHECK(j["outcome"] == "Safe");
	CHECK(j["scheduler"] == "edf-vd");

	r = cli("analyze --search bfs -o none " + tau.string());
	CHECK(r.code == 0);
	CHECK(mcx::Json::parse(r.out)["visited"] == 8);

	CHECK(cli("analyze --max-states 1 -o none " + tau.string()).code == 2);

	const auto bad = write_set("bad.json", mcx::TaskSet{{fx::task(2, 3, 2, 2, fx::HI)}});
	CHECK(cli("analyze " + bad.string()).code == 4);
	r = cli("analyze --force --witness -o none " + bad.string());
	CHECK(r.code == 1);
	const std::string json = r.out.substr(r.out.find('{'));
	CHECK(mcx::Json::parse(json)["witness"]["flagged_by"] == "deadline-miss");

	CHECK(cli("analyze -s nope " + tau.string()).code == 3);
	CHECK(cli("analyze /nonexistent.json").code == 3);
	CHECK(cli("").code == 3);

	const auto invalid = write_set("invalid.json", mcx::TaskSet{{fx::task(3, 2, 2, 2, fx::HI)}});
	r = cli("analyze " + invalid.string());
	CHECK(r.code == 3);
	CHECK(r.out.find("c_lo") != std::string::npos);
}

std::string slurp(const fs::path& p)
{
	std::ifstream in(p);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

TEST_CASE("generate")
{
	const fs::path dir = fs::temp_directory_path() / "mcx-cli-gen";
	const std::string flags = "generate --n 5 --t-min 5 --t-max 30 --p-hi 0.5 --u-target 0.85 --count 10 --seed 42 ";
	fs::remove_all(dir);
	Run r = cli(flags + "--output-dir " + (dir / "a").string());
	CHECK(r.code == 0);
	CHECK(fs::exists(dir / "a" / "manifest.json"));
	std::size_t files = 0;
	for (const auto& e : fs::directory_iterator(dir / "a"))
		files += e.path().filename().string().rfind("set-", 0) == 0;
	CHECK(files == 10);
	const auto ts = mcx::load_task_set(dir / "a" / "set-0000.json");
	CHECK(ts.name == "seed42-0");
	CHECK(ts.size() == 5);

	r = cli(flags + "--output-dir " + (dir / "b").string());
	CHECK(r.code == 0);
	for (const auto& e : fs::directory_iterator(dir / "a"))
		CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));

	r = cli("generate --p-hi 1.0 --count 2 --max-attempts 50 --output-dir " + (dir / "c").string());
	CHECK(r.code == 0);
	const auto manifest = mcx::Json::parse(slurp(dir / "c" / "manifest.json"));
	CHECK(manifest["accepted"] == 0);
	CHECK(manifest["dropped"]["single_criticality"] == 50);

	CHECK(cli("generate --p-hi 2").code == 3);
	fs::remove_all(dir);
}

TEST_CASE("graph")
{
	const auto tau = write_set("tau.json", fx::tau_a());
	Run r = cli("graph " + tau.string());
	CHECK(r.code == 0);
	CHECK(r.out.find("# states=8 edges=18 partial=0") != std::string::npos);
	CHECK(r.out.find("LO[00,00] -> HI[11,01] [released={1,2} ran=1 theta=0]") != std::string::npos);

	r = cli("graph --bound 0 " + tau.string());
	CHECK(r.code == 0);
	CHECK(r.out.find("# states=1 edges=0 partial=1") != std::string::npos);

	CHECK(cli("graph /nonexistent/set.json").code > 2);
}

TEST_CASE("analyze from a given state")
{
	const auto tau = write_set("tau.json", fx::tau_a());
	Run r = cli("analyze --from 'LO[12,12]' " + tau.string());
	CHECK(r.code == 0);
	CHECK(cli("analyze --from 'LO[99,00]' " + tau.string()).code == 3);
}

TEST_CASE("experiment subcommand")
{
	const fs::path dir = fs::temp_directory_path() / "mcx-cli-exp";
	fs::remove_all(dir);
	fs::create_directories(dir);
	{
		std::ofstream spec(dir / "spec.json");
		spec << R"({"kind": "schedulability-curve", "n": 2, "t_max": 6, "u_target": [0.6, 1.0], "count": 2})";
	}
	Run r = cli("experiment -q --output-dir " + (dir / "out").string() + " " + (dir / "spec.json").string());
	CHECK(r.code == 0);
	CHECK(fs::exists(dir / "out" / "curve.csv"));
	CHECK(fs::exists(dir / "out" / "runs.csv"));
	fs::remove_all(dir);
}
