#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace simplexdb {

enum class TypeKind { Enumerated, Integer, Text, Date };

std::string_view to_string(TypeKind kind);
TypeKind parse_type_kind(std::string_view text);

/// A vertex label. Enumerated types carry their finite value list.
struct DataType {
  std::string name;
  TypeKind kind = TypeKind::Text;
  std::vector<std::string> values;

  bool operator==(const DataType&) const = default;
};

/// Name-keyed set of data types. Names are unique; enumerated types must list
/// at least one value and no value twice.
class TypeRegistry {
 public:
  TypeRegistry() = default;
  TypeRegistry(std::initializer_list<DataType> types);

  /// Throws if the name is taken by a different type or the type is malformed.
  /// Re-adding an identical type is a no-op.
  void add(DataType type);

  const DataType* find(std::string_view name) const;
  const DataType& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const std::map<std::string, DataType, std::less<>>& types() const { return types_; }

  /// Union of two registries; throws on conflicting definitions.
  static TypeRegistry merge(const TypeRegistry& a, const TypeRegistry& b);

  bool operator==(const TypeRegistry&) const = default;

 private:
  std::map<std::string, DataType, std::less<>> types_;
};

/// A table cell. Integers are stored natively; text, dates (YYYY-MM-DD) and
/// enumerated symbols are stored as strings and interpreted by the column type.
class Value {
 public:
  Value() : repr_(std::int64_t{0}) {}
  Value(std::int64_t v) : repr_(v) {}   // NOLINT(google-explicit-constructor)
  Value(int v) : repr_(std::int64_t{v}) {}  // NOLINT(google-explicit-constructor)
  Value(std::string v) : repr_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Value(const char* v) : repr_(std::string(v)) {}  // NOLINT(google-explicit-constructor)

  bool is_integer() const { return std::holds_alternative<std::int64_t>(repr_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(repr_); }
  const std::string& as_string() const { return std::get<std::string>(repr_); }

  std::string to_string() const;

  auto operator<=>(const Value&) const = default;
  bool operator==(const Value&) const = default;

 private:
  std::variant<std::int64_t, std::string> repr_;
};

using Tuple = std::vector<Value>;

std::string to_string(const Tuple& tuple);

bool is_iso_date(std::string_view text);
bool conforms(const DataType& type, const Value& value);

}  // namespace simplexdb
