#pragma once

// Internal helpers shared by config.cpp and scenario.cpp. Not installed.

#include "json.hpp"

#include "tiersim/config.hpp"

namespace tiersim::detail {

PolicyConfig policy_config_from_json(const nlohmann::json& j);

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace tiersim::detail
