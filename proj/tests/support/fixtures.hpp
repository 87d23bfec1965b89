#pragma once

#include "mcx/model.hpp"
#include "mcx/semantics.hpp"

namespace fx {

inline mcx::Task task(mcx::Time c_lo, mcx::Time c_hi, mcx::Time d, mcx::Time t, mcx::Criticality l)
{
	return mcx::Task{c_lo, c_hi, d, t, l};
}

constexpr auto LO = mcx::Criticality::LO;
constexpr auto HI = mcx::Criticality::HI;

// The running two-task example: tau1 = <<1,2>,2,2,HI>, tau2 = <<1,1>,2,2,LO>.
inline mcx::TaskSet tau_a()
{
	return mcx::TaskSet{{task(1, 2, 2, 2, HI), task(1, 1, 2, 2, LO)}, "tau-a"};
}

inline mcx::SystemState st(const char* text)
{
	auto s = mcx::parse_state(text);
	if (!s)
		throw std::invalid_argument(std::string("bad state literal ") + text);
	return *s;
}

} // namespace fx
