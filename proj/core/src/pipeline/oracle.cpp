#include "mvp/pipeline/oracle.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mvp/frontend/parser.hpp"
#include "mvp/util/error.hpp"

namespace mvp::pipeline {

namespace {

using nlohmann::json;

interp::Value to_value(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return interp::Value::none();
    case json::value_t::boolean: return interp::Value(j.get<bool>());
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return interp::Value(j.get<std::int64_t>());
    case json::value_t::number_float: return interp::Value(j.get<double>());
    case json::value_t::string: return interp::Value(j.get<std::string>());
    case json::value_t::array: {
      interp::ValueList items;
      for (const json& e : j) items.push_back(to_value(e));
      return interp::Value::list(std::move(items));
    }
    case json::value_t::object: {
      interp::Value d = interp::Value::dict();
      for (const auto& [k, v] : j.items()) d.as<interp::DictValue>().entries->emplace_back(interp::Value(k), to_value(v));
      return d;
    }
    default: throw std::invalid_argument("unsupported JSON value");
  }
}

std::string describe(const interp::Outcome& o) {
  return std::string(interp::status_name(o.status)) + " " + interp::to_repr(o.return_value) + " output=" +
         json(o.output).dump();
}

}  // namespace

interp::Value value_from_json(const std::string& text) { return to_value(json::parse(text)); }

std::vector<OracleProgram> load_oracle_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<OracleProgram> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    OracleProgram p{j.at("name"), j.at("entry"), j.at("code"), {}};
    for (const json& c : j.at("cases")) {
      OracleCase oc;
      for (const json& a : c.at("args")) oc.args.push_back(to_value(a));
      oc.expected_return = c.value("return", "");
      oc.expected_output = c.value("output", "");
      p.cases.push_back(std::move(oc));
    }
    out.push_back(std::move(p));
  }
  return out;
}

EquivalenceResult check_equivalence(const OracleProgram& program, const frontend::SyntaxTree& original,
                                    const frontend::SyntaxTree& variant, const std::string& entry,
                                    std::string label) {
  EquivalenceResult r{program.name, std::move(label), 0, 0, {}};
  for (const OracleCase& c : program.cases) {
    ++r.cases;
    const interp::Outcome a = interp::evaluate(original, program.entry, c.args);
    const interp::Outcome b = interp::evaluate(variant, entry, c.args);
    if (!interp::same_behaviour(a, b)) {
      if (r.mismatches++ == 0) r.detail = describe(a) + " vs " + describe(b);
    }
  }
  return r;
}

std::vector<EquivalenceResult> check_program_transforms(const OracleProgram& program, std::uint64_t seed,
                                                        std::size_t k) {
  using namespace transform;
  const frontend::SyntaxTree tree = frontend::parse_source(program.code);
  const std::string renamed_entry = renamed(plan_renaming(tree), "", program.entry);
  std::vector<EquivalenceResult> out;
  out.push_back(check_equivalence(program, tree, rename_identifiers(tree, seed).tree, renamed_entry, "rename"));
  out.push_back(check_equivalence(program, tree, exchange_loops(tree).tree, program.entry, "loop-exchange"));
  out.push_back(check_equivalence(program, tree, exchange_loops(exchange_loops(tree).tree).tree, program.entry,
                                  "loop-exchange-twice"));
  out.push_back(check_equivalence(program, tree, insert_dead_code(tree, seed).tree, program.entry, "dead-code"));
  {
    const frontend::SyntaxTree all = insert_dead_code(exchange_loops(rename_identifiers(tree, seed).tree).tree, seed).tree;
    out.push_back(check_equivalence(program, tree, all, renamed_entry, "composed"));
  }
  const std::vector<Variant> variants = generate_variants(tree, seed, k);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    out.push_back(check_equivalence(program, tree, variants[i].tree, renamed(variants[i].renames, "", program.entry),
                                    "variant[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace mvp::pipeline
