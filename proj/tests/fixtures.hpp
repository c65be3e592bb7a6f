#pragma once

#include <string>

#include "selfsim/machine.hpp"

#ifndef SELFSIM_FIXTURES_DIR
#define SELFSIM_FIXTURES_DIR "fixtures"
#endif

inline selfsim::Machine fixture(const std::string& name) {
  return selfsim::load_machine(std::string(SELFSIM_FIXTURES_DIR) + "/" + name + ".json");
}
