#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mvp::frontend {
struct Node;
}

namespace mvp::interp {

struct Value;

using ValueList = std::vector<Value>;

struct NoneValue {
  bool operator==(const NoneValue&) const = default;
};

/// Tuples are immutable and shared; lists and dicts are shared and mutable,
/// which gives Python's aliasing semantics for append and item assignment.
struct TupleValue {
  std::shared_ptr<const ValueList> items;
};
struct ListValue {
  std::shared_ptr<ValueList> items;
};
struct DictValue {
  // Insertion-ordered key/value pairs.
  std::shared_ptr<std::vector<std::pair<Value, Value>>> entries;
};
struct RangeValue {
  std::int64_t start = 0;
  std::int64_t stop = 0;
  std::int64_t step = 1;
  std::int64_t size() const;
  std::int64_t at(std::int64_t index) const { return start + index * step; }
};
struct FunctionValue {
  const frontend::Node* def = nullptr;
  std::string name;
};
struct BuiltinValue {
  std::string name;
};
struct MethodValue {
  std::shared_ptr<ValueList> target;
  std::string name;
};

struct Value {
  using Storage = std::variant<NoneValue, bool, std::int64_t, double, std::string, TupleValue, ListValue,
                               DictValue, RangeValue, FunctionValue, BuiltinValue, MethodValue>;
  Storage data;

  Value() = default;
  Value(NoneValue v) : data(v) {}
  Value(bool v) : data(v) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(static_cast<std::int64_t>(v)) {}
  Value(double v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(TupleValue v) : data(std::move(v)) {}
  Value(ListValue v) : data(std::move(v)) {}
  Value(DictValue v) : data(std::move(v)) {}
  Value(RangeValue v) : data(v) {}
  Value(FunctionValue v) : data(std::move(v)) {}
  Value(BuiltinValue v) : data(std::move(v)) {}
  Value(MethodValue v) : data(std::move(v)) {}

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(data);
  }

  static Value none() { return Value(NoneValue{}); }
  static Value list(ValueList items = {});
  static Value tuple(ValueList items);
  static Value dict();
};

/// Python type name ("int", "list", ...).
std::string_view type_name(const Value& v);

/// Structural equality with exact types: 1 and 1.0 differ, lists compare
/// element-wise. Used by the equivalence oracle.
bool strictly_equal(const Value& a, const Value& b);

/// Python's str() and repr().
std::string to_str(const Value& v);
std::string to_repr(const Value& v);

/// Python float repr (shortest round-trip digits).
std::string format_float(double x);

}  // namespace mvp::interp
