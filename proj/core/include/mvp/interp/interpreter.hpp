#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mvp/frontend/syntax_tree.hpp"
#include "mvp/interp/value.hpp"

namespace mvp::interp {

enum class Status : std::uint8_t { Ok, StepLimit, RuntimeError };

std::string_view status_name(Status status);

struct Outcome {
  Value return_value;
  std::string output;
  std::int64_t steps_used = 0;
  Status status = Status::Ok;
  std::string message;  // runtime-error detail
};

inline constexpr std::int64_t kDefaultStepLimit = 100'000;

/// Executes the module body, then calls `entry` with `args`. Every executed
/// statement, loop iteration and call costs one step. Never throws for
/// program-level faults; they come back as status RuntimeError/StepLimit.
Outcome evaluate(const frontend::SyntaxTree& tree, std::string_view entry, std::span<const Value> args,
                 std::int64_t step_limit = kDefaultStepLimit);

/// Observable-behaviour equality: status, captured output and return value.
/// Step counts are not compared; error messages are not compared either,
/// since renaming changes the names they mention.
bool same_behaviour(const Outcome& a, const Outcome& b);

}  // namespace mvp::interp
