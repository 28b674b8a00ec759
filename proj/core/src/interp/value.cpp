#include "mvp/interp/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mvp::interp {

std::int64_t RangeValue::size() const {
  if (step > 0 && start < stop) return (stop - start + step - 1) / step;
  if (step < 0 && start > stop) return (start - stop - step - 1) / (-step);
  return 0;
}

Value Value::list(ValueList items) { return Value(ListValue{std::make_shared<ValueList>(std::move(items))}); }

Value Value::tuple(ValueList items) {
  return Value(TupleValue{std::make_shared<const ValueList>(std::move(items))});
}

Value Value::dict() { return Value(DictValue{std::make_shared<std::vector<std::pair<Value, Value>>>()}); }

std::string_view type_name(const Value& v) {
  struct Visitor {
    std::string_view operator()(const NoneValue&) const { return "NoneType"; }
    std::string_view operator()(bool) const { return "bool"; }
    std::string_view operator()(std::int64_t) const { return "int"; }
    std::string_view operator()(double) const { return "float"; }
    std::string_view operator()(const std::string&) const { return "str"; }
    std::string_view operator()(const TupleValue&) const { return "tuple"; }
    std::string_view operator()(const ListValue&) const { return "list"; }
    std::string_view operator()(const DictValue&) const { return "dict"; }
    std::string_view operator()(const RangeValue&) const { return "range"; }
    std::string_view operator()(const FunctionValue&) const { return "function"; }
    std::string_view operator()(const BuiltinValue&) const { return "builtin_function_or_method"; }
    std::string_view operator()(const MethodValue&) const { return "method"; }
  };
  return std::visit(Visitor{}, v.data);
}

namespace {

bool lists_equal(const ValueList& a, const ValueList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!strictly_equal(a[i], b[i])) return false;
  }
  return true;
}

std::string quote(const std::string& s) {
  const bool use_double = s.find('\'') != std::string::npos && s.find('"') == std::string::npos;
  const char q = use_double ? '"' : '\'';
  std::string out(1, q);
  for (const char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c == q) out += '\\';
        out += c;
    }
  }
  out += q;
  return out;
}

std::string join_repr(const ValueList& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_repr(items[i]);
  }
  return out;
}

}  // namespace

bool strictly_equal(const Value& a, const Value& b) {
  if (a.data.index() != b.data.index()) return false;
  if (a.is<NoneValue>()) return true;
  if (a.is<bool>()) return a.as<bool>() == b.as<bool>();
  if (a.is<std::int64_t>()) return a.as<std::int64_t>() == b.as<std::int64_t>();
  if (a.is<double>()) {
    const double x = a.as<double>();
    const double y = b.as<double>();
    return x == y || (std::isnan(x) && std::isnan(y));
  }
  if (a.is<std::string>()) return a.as<std::string>() == b.as<std::string>();
  if (a.is<TupleValue>()) return lists_equal(*a.as<TupleValue>().items, *b.as<TupleValue>().items);
  if (a.is<ListValue>()) return lists_equal(*a.as<ListValue>().items, *b.as<ListValue>().items);
  if (a.is<DictValue>()) {
    const auto& x = *a.as<DictValue>().entries;
    const auto& y = *b.as<DictValue>().entries;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!strictly_equal(x[i].first, y[i].first) || !strictly_equal(x[i].second, y[i].second)) return false;
    }
    return true;
  }
  if (a.is<RangeValue>()) {
    const auto& x = a.as<RangeValue>();
    const auto& y = b.as<RangeValue>();
    return x.start == y.start && x.stop == y.stop && x.step == y.step;
  }
  if (a.is<BuiltinValue>()) return a.as<BuiltinValue>().name == b.as<BuiltinValue>().name;
  // Functions and bound methods: identity of the callable is not observable
  // beyond its kind once names may have been rewritten.
  return true;
}

std::string format_float(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  std::string sci(buf, res.ptr);
  // sci looks like "-d.ddde+XX"
  const std::size_t e = sci.find('e');
  std::string mantissa = sci.substr(0, e);
  const int exponent = std::atoi(sci.c_str() + e + 1);
  const bool negative = mantissa[0] == '-';
  if (negative) mantissa.erase(0, 1);
  std::string digits;
  for (const char c : mantissa) {
    if (c != '.') digits += c;
  }
  std::string out = negative ? "-" : "";
  if (exponent < -4 || exponent >= 16) {
    out += digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char ebuf[16];
    std::snprintf(ebuf, sizeof ebuf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
    out += ebuf;
    return out;
  }
  if (exponent < 0) {
    out += "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
    return out;
  }
  const auto int_digits = static_cast<std::size_t>(exponent) + 1;
  if (digits.size() <= int_digits) {
    out += digits + std::string(int_digits - digits.size(), '0') + ".0";
  } else {
    out += digits.substr(0, int_digits) + "." + digits.substr(int_digits);
  }
  return out;
}

std::string to_str(const Value& v) {
  if (v.is<std::string>()) return v.as<std::string>();
  return to_repr(v);
}

std::string to_repr(const Value& v) {
  if (v.is<NoneValue>()) return "None";
  if (v.is<bool>()) return v.as<bool>() ? "True" : "False";
  if (v.is<std::int64_t>()) return std::to_string(v.as<std::int64_t>());
  if (v.is<double>()) return format_float(v.as<double>());
  if (v.is<std::string>()) return quote(v.as<std::string>());
  if (v.is<ListValue>()) return "[" + join_repr(*v.as<ListValue>().items) + "]";
  if (v.is<TupleValue>()) {
    const auto& items = *v.as<TupleValue>().items;
    return items.size() == 1 ? "(" + to_repr(items[0]) + ",)" : "(" + join_repr(items) + ")";
  }
  if (v.is<DictValue>()) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : *v.as<DictValue>().entries) {
      if (!first) out += ", ";
      first = false;
      out += to_repr(key) + ": " + to_repr(value);
    }
    return out + "}";
  }
  if (v.is<RangeValue>()) {
    const auto& r = v.as<RangeValue>();
    std::string out = "range(" + std::to_string(r.start) + ", " + std::to_string(r.stop);
    if (r.step != 1) out += ", " + std::to_string(r.step);
    return out + ")";
  }
  if (v.is<FunctionValue>()) return "<function " + v.as<FunctionValue>().name + ">";
  if (v.is<BuiltinValue>()) return "<built-in function " + v.as<BuiltinValue>().name + ">";
  return "<bound method " + v.as<MethodValue>().name + ">";
}

}  // namespace mvp::interp
