#include "mvp/interp/interpreter.hpp"

#include "mvp/frontend/scope.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <unordered_map>

namespace mvp::interp {

using frontend::Node;
using frontend::NodeKind;
using frontend::TokenKind;

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Ok: return "ok";
    case Status::StepLimit: return "step-limit";
    case Status::RuntimeError: return "runtime-error";
  }
  return "?";
}

bool same_behaviour(const Outcome& a, const Outcome& b) {
  return a.status == b.status && a.output == b.output && strictly_equal(a.return_value, b.return_value);
}

namespace {

constexpr int kMaxCallDepth = 200;
constexpr std::array<std::string_view, 10> kBuiltins = {"range", "len", "print", "abs", "min",
                                                         "max",   "int", "str",   "float", "bool"};

struct Fault {
  Status status;
  std::string message;
};

[[noreturn]] void error(std::string message) { throw Fault{Status::RuntimeError, std::move(message)}; }

enum class Flow { Normal, Break, Continue, Return };

struct Number {
  bool is_float = false;
  std::int64_t i = 0;
  double f = 0.0;
  double as_double() const { return is_float ? f : static_cast<double>(i); }
};

std::optional<Number> as_number(const Value& v) {
  if (v.is<bool>()) return Number{false, v.as<bool>() ? 1 : 0, 0.0};
  if (v.is<std::int64_t>()) return Number{false, v.as<std::int64_t>(), 0.0};
  if (v.is<double>()) return Number{true, 0, v.as<double>()};
  return std::nullopt;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) error("integer overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_sub_overflow(a, b, &r)) error("integer overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) error("integer overflow");
  return r;
}

// UTF-8 code points of a string.
std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) {
      len = 4;
    } else if (c >= 0xE0) {
      len = 3;
    } else if (c >= 0xC0) {
      len = 2;
    }
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string decode_string_literal(const std::string& raw) {
  const char q = raw[0];
  const std::size_t quote_len = raw.size() >= 6 && raw[1] == q && raw[2] == q ? 3 : 1;
  const std::string body = raw.substr(quote_len, raw.size() - 2 * quote_len);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\' || i + 1 == body.size()) {
      out += body[i];
      continue;
    }
    const char e = body[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '0': out += '\0'; break;
      case '\\': out += '\\'; break;
      case '\'': out += '\''; break;
      case '"': out += '"'; break;
      case '\n': break;
      case 'x':
        if (i + 2 < body.size()) {
          out += static_cast<char>(std::strtol(body.substr(i + 1, 2).c_str(), nullptr, 16));
          i += 2;
          break;
        }
        [[fallthrough]];
      default:
        out += '\\';
        out += e;
    }
  }
  return out;
}

bool truthy(const Value& v) {
  if (v.is<NoneValue>()) return false;
  if (v.is<bool>()) return v.as<bool>();
  if (v.is<std::int64_t>()) return v.as<std::int64_t>() != 0;
  if (v.is<double>()) return v.as<double>() != 0.0;
  if (v.is<std::string>()) return !v.as<std::string>().empty();
  if (v.is<ListValue>()) return !v.as<ListValue>().items->empty();
  if (v.is<TupleValue>()) return !v.as<TupleValue>().items->empty();
  if (v.is<DictValue>()) return !v.as<DictValue>().entries->empty();
  if (v.is<RangeValue>()) return v.as<RangeValue>().size() > 0;
  return true;
}

bool python_equal(const Value& a, const Value& b);

bool sequence_equal(const ValueList& x, const ValueList& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!python_equal(x[i], y[i])) return false;
  }
  return true;
}

bool python_equal(const Value& a, const Value& b) {
  const auto na = as_number(a);
  const auto nb = as_number(b);
  if (na && nb) {
    if (!na->is_float && !nb->is_float) return na->i == nb->i;
    return na->as_double() == nb->as_double();
  }
  if (a.data.index() != b.data.index()) return false;
  if (a.is<ListValue>()) return sequence_equal(*a.as<ListValue>().items, *b.as<ListValue>().items);
  if (a.is<TupleValue>()) return sequence_equal(*a.as<TupleValue>().items, *b.as<TupleValue>().items);
  if (a.is<DictValue>()) {
    const auto& x = *a.as<DictValue>().entries;
    const auto& y = *b.as<DictValue>().entries;
    if (x.size() != y.size()) return false;
    for (const auto& [k, v] : x) {
      const auto it = std::find_if(y.begin(), y.end(), [&](const auto& e) { return python_equal(e.first, k); });
      if (it == y.end() || !python_equal(it->second, v)) return false;
    }
    return true;
  }
  if (a.is<FunctionValue>()) return a.as<FunctionValue>().def == b.as<FunctionValue>().def;
  return strictly_equal(a, b);
}

bool less_than(const Value& a, const Value& b);

bool sequence_less(const ValueList& x, const ValueList& y) {
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!python_equal(x[i], y[i])) return less_than(x[i], y[i]);
  }
  return x.size() < y.size();
}

bool less_than(const Value& a, const Value& b) {
  const auto na = as_number(a);
  const auto nb = as_number(b);
  if (na && nb) {
    if (!na->is_float && !nb->is_float) return na->i < nb->i;
    return na->as_double() < nb->as_double();
  }
  if (a.is<std::string>() && b.is<std::string>()) return a.as<std::string>() < b.as<std::string>();
  if (a.is<ListValue>() && b.is<ListValue>()) return sequence_less(*a.as<ListValue>().items, *b.as<ListValue>().items);
  if (a.is<TupleValue>() && b.is<TupleValue>()) {
    return sequence_less(*a.as<TupleValue>().items, *b.as<TupleValue>().items);
  }
  error("'<' not supported between instances of '" + std::string(type_name(a)) + "' and '" +
        std::string(type_name(b)) + "'");
}

bool hashable(const Value& v) {
  if (v.is<ListValue>() || v.is<DictValue>()) return false;
  if (v.is<TupleValue>()) {
    const auto& items = *v.as<TupleValue>().items;
    return std::all_of(items.begin(), items.end(), hashable);
  }
  return true;
}

std::int64_t to_index(const Value& v) {
  if (v.is<bool>()) return v.as<bool>() ? 1 : 0;
  if (v.is<std::int64_t>()) return v.as<std::int64_t>();
  error("indices must be integers, not " + std::string(type_name(v)));
}

std::size_t normalize_index(std::int64_t index, std::size_t size) {
  const auto n = static_cast<std::int64_t>(size);
  if (index < 0) index += n;
  if (index < 0 || index >= n) error("index out of range");
  return static_cast<std::size_t>(index);
}

std::int64_t int_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t result = 1;
  while (exp > 0) {
    if (exp & 1) result = checked_mul(result, base);
    exp >>= 1;
    if (exp > 0) base = checked_mul(base, base);
  }
  return result;
}

Value repeat(const ValueList& items, std::int64_t times) {
  ValueList out;
  for (std::int64_t t = 0; t < times; ++t) out.insert(out.end(), items.begin(), items.end());
  return Value::list(std::move(out));
}

Value binary(const std::string& op, const Value& a, const Value& b) {
  const auto na = as_number(a);
  const auto nb = as_number(b);
  if (na && nb) {
    const bool fl = na->is_float || nb->is_float;
    const std::int64_t x = na->i;
    const std::int64_t y = nb->i;
    const double fx = na->as_double();
    const double fy = nb->as_double();
    if (op == "+") return fl ? Value(fx + fy) : Value(checked_add(x, y));
    if (op == "-") return fl ? Value(fx - fy) : Value(checked_sub(x, y));
    if (op == "*") return fl ? Value(fx * fy) : Value(checked_mul(x, y));
    if (op == "/") {
      if (fy == 0.0) error("division by zero");
      return Value(fx / fy);
    }
    if (op == "//" || op == "%") {
      if (fl) {
        if (fy == 0.0) error("float division by zero");
        double m = std::fmod(fx, fy);
        if (m != 0.0 && ((m < 0) != (fy < 0))) m += fy;
        return op == "%" ? Value(m) : Value(std::floor(fx / fy));
      }
      if (y == 0) error("integer division or modulo by zero");
      if (x == std::numeric_limits<std::int64_t>::min() && y == -1) error("integer overflow");
      std::int64_t q = x / y;
      std::int64_t m = x % y;
      if (m != 0 && ((m < 0) != (y < 0))) {
        q -= 1;
        m += y;
      }
      return op == "%" ? Value(m) : Value(q);
    }
    if (op == "**") {
      if (!fl && y >= 0) return Value(int_pow(x, y));
      if (fx == 0.0 && fy < 0) error("zero to a negative power");
      if (fx < 0 && std::floor(fy) != fy) error("negative number to a fractional power");
      return Value(std::pow(fx, fy));
    }
  }
  if (op == "+") {
    if (a.is<std::string>() && b.is<std::string>()) return Value(a.as<std::string>() + b.as<std::string>());
    if (a.is<ListValue>() && b.is<ListValue>()) {
      ValueList out = *a.as<ListValue>().items;
      const auto& rhs = *b.as<ListValue>().items;
      out.insert(out.end(), rhs.begin(), rhs.end());
      return Value::list(std::move(out));
    }
    if (a.is<TupleValue>() && b.is<TupleValue>()) {
      ValueList out = *a.as<TupleValue>().items;
      const auto& rhs = *b.as<TupleValue>().items;
      out.insert(out.end(), rhs.begin(), rhs.end());
      return Value::tuple(std::move(out));
    }
  }
  if (op == "*") {
    const Value* seq = nb && !nb->is_float ? &a : (na && !na->is_float ? &b : nullptr);
    const auto count = seq == &a ? (nb ? nb->i : 0) : (na ? na->i : 0);
    if (seq && seq->is<std::string>()) {
      std::string out;
      for (std::int64_t t = 0; t < count; ++t) out += seq->as<std::string>();
      return Value(std::move(out));
    }
    if (seq && seq->is<ListValue>()) return repeat(*seq->as<ListValue>().items, count);
  }
  error("unsupported operand type(s) for " + op + ": '" + std::string(type_name(a)) + "' and '" +
        std::string(type_name(b)) + "'");
}

std::vector<Value> iterate(const Value& v) {
  if (v.is<ListValue>()) return *v.as<ListValue>().items;
  if (v.is<TupleValue>()) return *v.as<TupleValue>().items;
  if (v.is<std::string>()) {
    std::vector<Value> out;
    for (auto& cp : code_points(v.as<std::string>())) out.emplace_back(std::move(cp));
    return out;
  }
  if (v.is<DictValue>()) {
    std::vector<Value> out;
    for (const auto& entry : *v.as<DictValue>().entries) out.push_back(entry.first);
    return out;
  }
  error("'" + std::string(type_name(v)) + "' object is not iterable");
}

bool contains(const Value& container, const Value& item) {
  if (container.is<std::string>()) {
    if (!item.is<std::string>()) error("'in <string>' requires string as left operand");
    return container.as<std::string>().find(item.as<std::string>()) != std::string::npos;
  }
  if (container.is<RangeValue>()) {
    const auto n = as_number(item);
    if (!n || n->is_float) return false;
    const auto& r = container.as<RangeValue>();
    for (std::int64_t i = 0; i < r.size(); ++i) {
      if (r.at(i) == n->i) return true;
    }
    return false;
  }
  for (const Value& v : iterate(container)) {
    if (python_equal(v, item)) return true;
  }
  return false;
}

class Interpreter {
 public:
  Interpreter(const frontend::SyntaxTree& tree, std::int64_t limit) : tree_(tree), limit_(limit) {}

  Outcome run(std::string_view entry, std::span<const Value> args) {
    Outcome outcome;
    try {
      for (const Node& stmt : tree_.root.children) {
        if (exec(stmt) != Flow::Normal) error("'return'/'break'/'continue' outside function");
      }
      const auto it = globals_.find(std::string(entry));
      if (it == globals_.end() || !it->second.is<FunctionValue>()) {
        error("entry function '" + std::string(entry) + "' is not defined");
      }
      outcome.return_value = call(it->second, std::vector<Value>(args.begin(), args.end()));
    } catch (const Fault& fault) {
      outcome.status = fault.status;
      outcome.message = fault.message;
      outcome.return_value = Value::none();
    }
    outcome.output = std::move(out_);
    outcome.steps_used = steps_;
    return outcome;
  }

 private:
  struct Frame {
    const std::set<std::string>* local_names = nullptr;
    std::unordered_map<std::string, Value> locals;
  };

  void tick() {
    if (++steps_ > limit_) throw Fault{Status::StepLimit, "step limit exceeded"};
  }

  // ---- names ------------------------------------------------------------

  const std::set<std::string>& locals_of(const Node& def) {
    auto it = local_cache_.find(&def);
    if (it == local_cache_.end()) it = local_cache_.emplace(&def, frontend::scope_bindings(def)).first;
    return it->second;
  }

  Value load(const std::string& name) {
    if (frame_ && frame_->local_names->contains(name)) {
      const auto it = frame_->locals.find(name);
      if (it == frame_->locals.end()) error("local variable '" + name + "' referenced before assignment");
      return it->second;
    }
    const auto it = globals_.find(name);
    if (it != globals_.end()) return it->second;
    if (std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end()) return Value(BuiltinValue{name});
    error("name '" + name + "' is not defined");
  }

  void store(const std::string& name, Value v) {
    if (frame_) {
      frame_->locals[name] = std::move(v);
    } else {
      globals_[name] = std::move(v);
    }
  }

  void assign(const Node& target, const Value& v) {
    if (target.is_identifier()) {
      store(target.text, v);
      return;
    }
    if (target.kind == NodeKind::Tuple || target.kind == NodeKind::List) {
      std::vector<const Node*> slots;
      for (const Node& c : target.children) {
        if (!(c.is_leaf() && c.token == TokenKind::Operator)) slots.push_back(&c);
      }
      const std::vector<Value> items = iterate(v);
      if (items.size() != slots.size()) error("wrong number of values to unpack");
      for (std::size_t i = 0; i < slots.size(); ++i) assign(*slots[i], items[i]);
      return;
    }
    if (target.kind == NodeKind::Subscript) {
      const Value container = eval(target.children[0]);
      const Value key = eval(target.children[2]);
      if (container.is<ListValue>()) {
        auto& items = *container.as<ListValue>().items;
        items[normalize_index(to_index(key), items.size())] = v;
        return;
      }
      if (container.is<DictValue>()) {
        if (!hashable(key)) error("unhashable type: '" + std::string(type_name(key)) + "'");
        auto& entries = *container.as<DictValue>().entries;
        for (auto& entry : entries) {
          if (python_equal(entry.first, key)) {
            entry.second = v;
            return;
          }
        }
        entries.emplace_back(key, v);
        return;
      }
      error("'" + std::string(type_name(container)) + "' object does not support item assignment");
    }
    error("cannot assign to " + std::string(frontend::kind_name(target.kind)));
  }

  // ---- statements -------------------------------------------------------

  Flow exec_block(const Node& block) {
    for (const Node& s : block.children) {
      const Flow f = exec(s);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  Flow exec(const Node& s) {
    tick();
    switch (s.kind) {
      case NodeKind::Assignment:
        assign(s.children[0], eval(s.children[2]));
        return Flow::Normal;
      case NodeKind::AnnotatedAssignment:
        if (s.children.size() == 5) assign(s.children[0], eval(s.children[4]));
        return Flow::Normal;
      case NodeKind::AugmentedAssignment: {
        const std::string& op = s.children[1].text;
        const Value current = eval(s.children[0]);
        const Value rhs = eval(s.children[2]);
        if (op == "+=" && current.is<ListValue>() && rhs.is<ListValue>()) {
          // In-place extend keeps aliases in sync.
          auto& items = *current.as<ListValue>().items;
          const ValueList extra = *rhs.as<ListValue>().items;
          items.insert(items.end(), extra.begin(), extra.end());
          return Flow::Normal;
        }
        assign(s.children[0], binary(op.substr(0, op.size() - 1), current, rhs));
        return Flow::Normal;
      }
      case NodeKind::ExpressionStatement:
        eval(s.children[0]);
        return Flow::Normal;
      case NodeKind::ReturnStatement:
        return_value_ = s.children.size() > 1 ? eval(s.children[1]) : Value::none();
        return Flow::Return;
      case NodeKind::BreakStatement:
        return Flow::Break;
      case NodeKind::ContinueStatement:
        return Flow::Continue;
      case NodeKind::PassStatement:
        return Flow::Normal;
      case NodeKind::FunctionDef:
        store(s.children[1].text, Value(FunctionValue{&s, s.children[1].text}));
        return Flow::Normal;
      case NodeKind::IfStatement: {
        if (truthy(eval(s.children[1]))) return exec_block(s.children[3]);
        for (std::size_t i = 4; i < s.children.size(); ++i) {
          const Node& clause = s.children[i];
          if (clause.kind == NodeKind::ElseClause) return exec_block(clause.children[2]);
          if (truthy(eval(clause.children[1]))) return exec_block(clause.children[3]);
        }
        return Flow::Normal;
      }
      case NodeKind::WhileStatement:
        while (truthy(eval(s.children[1]))) {
          tick();
          const Flow f = exec_block(s.children[3]);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      case NodeKind::ForStatement: {
        const Value iterable = eval(s.children[3]);
        if (iterable.is<RangeValue>()) {
          const RangeValue r = iterable.as<RangeValue>();
          for (std::int64_t i = 0; i < r.size(); ++i) {
            tick();
            assign(s.children[1], Value(r.at(i)));
            const Flow f = exec_block(s.children[5]);
            if (f == Flow::Break) break;
            if (f == Flow::Return) return f;
          }
          return Flow::Normal;
        }
        if (iterable.is<ListValue>()) {
          // Live iteration: appends during the loop are visited.
          const auto items = iterable.as<ListValue>().items;
          for (std::size_t i = 0; i < items->size(); ++i) {
            tick();
            assign(s.children[1], (*items)[i]);
            const Flow f = exec_block(s.children[5]);
            if (f == Flow::Break) break;
            if (f == Flow::Return) return f;
          }
          return Flow::Normal;
        }
        for (const Value& item : iterate(iterable)) {
          tick();
          assign(s.children[1], item);
          const Flow f = exec_block(s.children[5]);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      }
      default:
        error("unsupported statement " + std::string(frontend::kind_name(s.kind)));
    }
  }

  // ---- expressions ------------------------------------------------------

  Value literal(const Node& leaf) {
    switch (leaf.token) {
      case TokenKind::Identifier:
        return load(leaf.text);
      case TokenKind::IntLiteral: {
        errno = 0;
        const long long v = std::strtoll(leaf.text.c_str(), nullptr, 10);
        if (errno == ERANGE) error("integer literal too large");
        return Value(static_cast<std::int64_t>(v));
      }
      case TokenKind::FloatLiteral:
        return Value(std::strtod(leaf.text.c_str(), nullptr));
      case TokenKind::StringLiteral:
        return Value(decode_string_literal(leaf.text));
      case TokenKind::Keyword:
        if (leaf.text == "True") return Value(true);
        if (leaf.text == "False") return Value(false);
        if (leaf.text == "None") return Value::none();
        [[fallthrough]];
      default:
        error("unexpected token '" + leaf.text + "' in expression");
    }
  }

  std::vector<Value> items_of(const Node& n) {
    std::vector<Value> out;
    for (const Node& c : n.children) {
      if (c.is_leaf() && c.token == TokenKind::Operator) continue;
      out.push_back(eval(c));
    }
    return out;
  }

  bool compare(const std::string& op, const Value& a, const Value& b) {
    if (op == "==") return python_equal(a, b);
    if (op == "!=") return !python_equal(a, b);
    if (op == "<") return less_than(a, b);
    if (op == ">") return less_than(b, a);
    if (op == "<=") return !less_than(b, a);
    if (op == ">=") return !less_than(a, b);
    if (op == "in") return contains(b, a);
    if (op == "not in") return !contains(b, a);
    if (op == "is" || op == "is not") {
      bool same = false;
      if (a.is<ListValue>() && b.is<ListValue>()) {
        same = a.as<ListValue>().items == b.as<ListValue>().items;
      } else if (a.is<DictValue>() && b.is<DictValue>()) {
        same = a.as<DictValue>().entries == b.as<DictValue>().entries;
      } else {
        same = a.data.index() == b.data.index() && python_equal(a, b);
      }
      return op == "is" ? same : !same;
    }
    error("unknown comparison " + op);
  }

  Value eval(const Node& n) {
    switch (n.kind) {
      case NodeKind::Leaf:
        return literal(n);
      case NodeKind::Parenthesized:
        return eval(n.children[1]);
      case NodeKind::BinaryOperator:
        return binary(n.children[1].text, eval(n.children[0]), eval(n.children[2]));
      case NodeKind::UnaryOperator: {
        const Value v = eval(n.children[1]);
        const std::string& op = n.children[0].text;
        if (op == "not") return Value(!truthy(v));
        const auto num = as_number(v);
        if (!num) error("bad operand type for unary " + op + ": '" + std::string(type_name(v)) + "'");
        if (op == "+") return num->is_float ? Value(num->f) : Value(num->i);
        if (num->is_float) return Value(-num->f);
        if (num->i == std::numeric_limits<std::int64_t>::min()) error("integer overflow");
        return Value(-num->i);
      }
      case NodeKind::BooleanOperator: {
        Value left = eval(n.children[0]);
        const bool is_and = n.children[1].text == "and";
        if (truthy(left) != is_and) return left;
        return eval(n.children[2]);
      }
      case NodeKind::Comparison: {
        Value left = eval(n.children[0]);
        std::size_t i = 1;
        bool result = true;
        while (i < n.children.size()) {
          std::string op = n.children[i++].text;
          if (n.children[i].is_leaf("in") || n.children[i].is_leaf("not")) op += " " + n.children[i++].text;
          Value right = eval(n.children[i++]);
          if (!compare(op, left, right)) {
            result = false;
            break;
          }
          left = std::move(right);
        }
        return Value(result);
      }
      case NodeKind::Call: {
        const Value callee = eval(n.children[0]);
        std::vector<Value> args;
        for (std::size_t i = 2; i + 1 < n.children.size(); ++i) {
          if (n.children[i].is_leaf(",")) continue;
          args.push_back(eval(n.children[i]));
        }
        return call(callee, std::move(args));
      }
      case NodeKind::Attribute: {
        const Value obj = eval(n.children[0]);
        const std::string& name = n.children[2].text;
        if (obj.is<ListValue>() && name == "append") return Value(MethodValue{obj.as<ListValue>().items, name});
        error("'" + std::string(type_name(obj)) + "' object has no attribute '" + name + "'");
      }
      case NodeKind::Subscript:
        return subscript(eval(n.children[0]), eval(n.children[2]));
      case NodeKind::List:
        return Value::list(items_of(n));
      case NodeKind::Tuple:
        return Value::tuple(items_of(n));
      case NodeKind::Dict: {
        Value d = Value::dict();
        auto& entries = *d.as<DictValue>().entries;
        for (std::size_t i = 1; i + 1 < n.children.size(); i += 4) {
          Value key = eval(n.children[i]);
          Value value = eval(n.children[i + 2]);
          if (!hashable(key)) error("unhashable type: '" + std::string(type_name(key)) + "'");
          auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return python_equal(e.first, key); });
          if (it != entries.end()) {
            it->second = std::move(value);
          } else {
            entries.emplace_back(std::move(key), std::move(value));
          }
        }
        return d;
      }
      default:
        error("unsupported expression " + std::string(frontend::kind_name(n.kind)));
    }
  }

  Value subscript(const Value& container, const Value& key) {
    if (container.is<ListValue>()) {
      const auto& items = *container.as<ListValue>().items;
      return items[normalize_index(to_index(key), items.size())];
    }
    if (container.is<TupleValue>()) {
      const auto& items = *container.as<TupleValue>().items;
      return items[normalize_index(to_index(key), items.size())];
    }
    if (container.is<std::string>()) {
      const auto cps = code_points(container.as<std::string>());
      return Value(cps[normalize_index(to_index(key), cps.size())]);
    }
    if (container.is<RangeValue>()) {
      const auto& r = container.as<RangeValue>();
      return Value(r.at(static_cast<std::int64_t>(normalize_index(to_index(key), static_cast<std::size_t>(r.size())))));
    }
    if (container.is<DictValue>()) {
      if (!hashable(key)) error("unhashable type: '" + std::string(type_name(key)) + "'");
      for (const auto& [k, v] : *container.as<DictValue>().entries) {
        if (python_equal(k, key)) return v;
      }
      error("KeyError: " + to_repr(key));
    }
    error("'" + std::string(type_name(container)) + "' object is not subscriptable");
  }

  // ---- calls ------------------------------------------------------------

  Value call(const Value& callee, std::vector<Value> args) {
    tick();
    if (callee.is<BuiltinValue>()) return builtin(callee.as<BuiltinValue>().name, args);
    if (callee.is<MethodValue>()) {
      const auto& m = callee.as<MethodValue>();
      if (args.size() != 1) error("append() takes exactly one argument");
      m.target->push_back(std::move(args[0]));
      return Value::none();
    }
    if (!callee.is<FunctionValue>()) error("'" + std::string(type_name(callee)) + "' object is not callable");
    const Node& def = *callee.as<FunctionValue>().def;
    std::vector<std::string> params;
    for (const Node& p : def.children[2].children) {
      if (p.is_identifier()) params.push_back(p.text);
      if (p.kind == NodeKind::TypedParameter) params.push_back(p.children[0].text);
    }
    if (params.size() != args.size()) {
      error(def.children[1].text + "() takes " + std::to_string(params.size()) + " arguments but " +
            std::to_string(args.size()) + " were given");
    }
    if (depth_ >= kMaxCallDepth) error("maximum recursion depth exceeded");
    Frame frame;
    frame.local_names = &locals_of(def);
    for (std::size_t i = 0; i < params.size(); ++i) frame.locals[params[i]] = std::move(args[i]);
    Frame* saved = frame_;
    frame_ = &frame;
    ++depth_;
    struct Restore {
      Interpreter& self;
      Frame* saved;
      ~Restore() {
        self.frame_ = saved;
        --self.depth_;
      }
    } restore{*this, saved};
    return_value_ = Value::none();
    const Flow f = exec_block(def.children[4]);
    if (f == Flow::Break || f == Flow::Continue) error("'break'/'continue' outside loop");
    Value result = f == Flow::Return ? std::move(return_value_) : Value::none();
    return_value_ = Value::none();
    return result;
  }

  Value builtin(const std::string& name, std::vector<Value>& args) {
    const auto need = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) error(name + "() called with wrong number of arguments");
    };
    if (name == "print") {
      std::string line;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) line += ' ';
        line += to_str(args[i]);
      }
      out_ += line + "\n";
      return Value::none();
    }
    if (name == "range") {
      need(1, 3);
      std::int64_t start = 0;
      std::int64_t stop = 0;
      std::int64_t step = 1;
      if (args.size() == 1) {
        stop = to_index(args[0]);
      } else {
        start = to_index(args[0]);
        stop = to_index(args[1]);
        if (args.size() == 3) step = to_index(args[2]);
      }
      if (step == 0) error("range() arg 3 must not be zero");
      return Value(RangeValue{start, stop, step});
    }
    if (name == "len") {
      need(1, 1);
      const Value& v = args[0];
      if (v.is<std::string>()) return Value(static_cast<std::int64_t>(code_points(v.as<std::string>()).size()));
      if (v.is<ListValue>()) return Value(static_cast<std::int64_t>(v.as<ListValue>().items->size()));
      if (v.is<TupleValue>()) return Value(static_cast<std::int64_t>(v.as<TupleValue>().items->size()));
      if (v.is<DictValue>()) return Value(static_cast<std::int64_t>(v.as<DictValue>().entries->size()));
      if (v.is<RangeValue>()) return Value(v.as<RangeValue>().size());
      error("object of type '" + std::string(type_name(v)) + "' has no len()");
    }
    if (name == "abs") {
      need(1, 1);
      const auto num = as_number(args[0]);
      if (!num) error("bad operand type for abs()");
      if (num->is_float) return Value(std::fabs(num->f));
      if (num->i == std::numeric_limits<std::int64_t>::min()) error("integer overflow");
      return Value(num->i < 0 ? -num->i : num->i);
    }
    if (name == "min" || name == "max") {
      if (args.empty()) error(name + " expected at least 1 argument");
      std::vector<Value> pool;
      if (args.size() == 1) {
        if (args[0].is<RangeValue>()) {
          const auto& r = args[0].as<RangeValue>();
          for (std::int64_t i = 0; i < r.size(); ++i) pool.emplace_back(r.at(i));
        } else {
          pool = iterate(args[0]);
        }
      } else {
        pool = args;
      }
      if (pool.empty()) error(name + "() arg is an empty sequence");
      Value best = pool[0];
      for (std::size_t i = 1; i < pool.size(); ++i) {
        if (name == "min" ? less_than(pool[i], best) : less_than(best, pool[i])) best = pool[i];
      }
      return best;
    }
    if (name == "int") {
      need(0, 1);
      if (args.empty()) return Value(std::int64_t{0});
      const Value& v = args[0];
      if (v.is<bool>()) return Value(std::int64_t{v.as<bool>() ? 1 : 0});
      if (v.is<std::int64_t>()) return v;
      if (v.is<double>()) {
        const double d = v.as<double>();
        if (!std::isfinite(d) || std::fabs(d) >= 9.2e18) error("cannot convert float to integer");
        return Value(static_cast<std::int64_t>(std::trunc(d)));
      }
      if (v.is<std::string>()) {
        const std::string& s = v.as<std::string>();
        const auto b = s.find_first_not_of(" \t\n");
        const auto e = s.find_last_not_of(" \t\n");
        const std::string t = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        std::size_t k = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (k >= t.size() || t.find_first_not_of("0123456789", k) != std::string::npos) {
          error("invalid literal for int(): " + to_repr(v));
        }
        errno = 0;
        const long long r = std::strtoll(t.c_str(), nullptr, 10);
        if (errno == ERANGE) error("integer overflow");
        return Value(static_cast<std::int64_t>(r));
      }
      error("int() argument must be a string or a number");
    }
    if (name == "float") {
      need(0, 1);
      if (args.empty()) return Value(0.0);
      const auto num = as_number(args[0]);
      if (num) return Value(num->as_double());
      if (args[0].is<std::string>()) {
        const std::string& s = args[0].as<std::string>();
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        while (end && (*end == ' ' || *end == '\n' || *end == '\t')) ++end;
        if (s.empty() || end == s.c_str() || *end != '\0') error("could not convert string to float: " + to_repr(args[0]));
        return Value(d);
      }
      error("float() argument must be a string or a number");
    }
    if (name == "str") {
      need(0, 1);
      return Value(args.empty() ? std::string() : to_str(args[0]));
    }
    if (name == "bool") {
      need(0, 1);
      return Value(!args.empty() && truthy(args[0]));
    }
    error("unknown builtin " + name);
  }

  const frontend::SyntaxTree& tree_;
  std::int64_t limit_;
  std::int64_t steps_ = 0;
  int depth_ = 0;
  std::string out_;
  std::unordered_map<std::string, Value> globals_;
  std::unordered_map<const Node*, std::set<std::string>> local_cache_;
  Frame* frame_ = nullptr;
  Value return_value_;
};

}  // namespace

Outcome evaluate(const frontend::SyntaxTree& tree, std::string_view entry, std::span<const Value> args,
                 std::int64_t step_limit) {
  return Interpreter(tree, step_limit).run(entry, args);
}

}  // namespace mvp::interp
