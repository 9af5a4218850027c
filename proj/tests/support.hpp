#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "colforth/compiler.hpp"
#include "colforth/machine.hpp"

namespace colforth::test {

using Bytes = std::vector<std::uint8_t>;
using InputMap = std::map<std::string, Bytes>;

/// Compiles, binds inputs, and keeps the input bytes alive next to the
/// machine.
struct Run {
  InputMap store;
  Machine machine;

  explicit Run(const std::string& source, InputMap inputs = {}, MachineLimits limits = {})
      : store(std::move(inputs)), machine(compile(source), limits) {
    std::map<std::string, std::span<const std::uint8_t>> views;
    for (auto& [name, bytes] : store) views[name] = bytes;
    machine.begin_run(views);
  }

  StopReason resume() { return machine.resume(); }
};

inline StopReason run_to_stop(Run& r) {
  StopReason stop;
  do {
    stop = r.resume();
  } while (stop == StopReason::Paused);
  return stop;
}

}  // namespace colforth::test
