#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"
#include "mvp/interp/interpreter.hpp"
#include "mvp/transform/transform.hpp"

namespace mvp::pipeline {

struct OracleCase {
  std::vector<interp::Value> args;
  std::string expected_return;  // repr of the reference result
  std::string expected_output;
};

/// One program of the equivalence corpus with its input grid.
struct OracleProgram {
  std::string name;
  std::string entry;
  std::string code;
  std::vector<OracleCase> cases;
};

/// Reads line-delimited {name, entry, code, cases: [{args, return, output}]}.
std::vector<OracleProgram> load_oracle_corpus(const std::filesystem::path& path);

/// JSON text to an interpreter value: arrays become lists, objects dicts.
interp::Value value_from_json(const std::string& json);

struct EquivalenceResult {
  std::string program;
  std::string variant;  // label such as "rename" or "variant[2]"
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::string detail;  // first mismatch, if any
};

/// Runs `variant` against `original` on every case. `entry` is the entry
/// function's name inside the variant.
EquivalenceResult check_equivalence(const OracleProgram& program, const frontend::SyntaxTree& original,
                                    const frontend::SyntaxTree& variant, const std::string& entry,
                                    std::string label);

/// Every heuristic alone, their full composition and k seeded variants.
std::vector<EquivalenceResult> check_program_transforms(const OracleProgram& program, std::uint64_t seed,
                                                        std::size_t k);

}  // namespace mvp::pipeline
