#pragma once

#include <vector>

#include "tmbft/config.hpp"

namespace tmbft {

// Built-in scripted scenarios: the two protocol counterexamples, the reward
// fairness schedules, the asynchronous deferral family and honest baselines.
std::vector<Scenario> builtinScenarios();

// Looks up a built-in by name; returns nullptr if unknown.
const Scenario* findBuiltinScenario(const std::string& name);

}  // namespace tmbft
