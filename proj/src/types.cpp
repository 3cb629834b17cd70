#include "simplexdb/types.hpp"

#include <algorithm>
#include <set>

#include "simplexdb/error.hpp"

namespace simplexdb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::UnknownDataType: return "unknown_datatype";
    case ErrorCode::UnknownSimplex: return "unknown_simplex";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::LabelMismatch: return "label_mismatch";
    case ErrorCode::InvalidSchema: return "invalid_schema";
    case ErrorCode::UnrealizableMatching: return "unrealizable_matching";
    case ErrorCode::NonConforming: return "non_conforming";
    case ErrorCode::KeyMapViolation: return "keymap_violation";
    case ErrorCode::FaceIndexOutOfRange: return "face_index_out_of_range";
    case ErrorCode::NotEnumerable: return "not_enumerable";
    case ErrorCode::SimplexMismatch: return "simplex_mismatch";
    case ErrorCode::MissingTable: return "missing_table";
    case ErrorCode::AmbiguousKeyMap: return "ambiguous_keymap";
    case ErrorCode::UnsupportedCombination: return "unsupported_combination";
    case ErrorCode::NotIncident: return "not_incident";
    case ErrorCode::CurveOffRealization: return "curve_off_realization";
    case ErrorCode::PolicyRequired: return "policy_required";
    case ErrorCode::InvalidSheaf: return "invalid_sheaf";
    case ErrorCode::MalformedDocument: return "malformed_document";
    case ErrorCode::UnknownBuiltin: return "unknown_builtin";
    case ErrorCode::VersionMismatch: return "version_mismatch";
    case ErrorCode::InvalidProvenance: return "invalid_provenance";
    case ErrorCode::NotFound: return "not_found";
  }
  return "unknown";
}

std::string_view to_string(TypeKind kind) {
  switch (kind) {
    case TypeKind::Enumerated: return "enumerated";
    case TypeKind::Integer: return "integer";
    case TypeKind::Text: return "text";
    case TypeKind::Date: return "date";
  }
  return "text";
}

TypeKind parse_type_kind(std::string_view text) {
  if (text == "enumerated") return TypeKind::Enumerated;
  if (text == "integer") return TypeKind::Integer;
  if (text == "text") return TypeKind::Text;
  if (text == "date") return TypeKind::Date;
  throw Error(ErrorCode::MalformedDocument, "unknown datatype kind", std::string(text));
}

TypeRegistry::TypeRegistry(std::initializer_list<DataType> types) {
  for (const auto& t : types) add(t);
}

void TypeRegistry::add(DataType type) {
  if (type.name.empty()) {
    throw Error(ErrorCode::InvalidArgument, "datatype name must not be empty");
  }
  if (type.kind == TypeKind::Enumerated) {
    if (type.values.empty()) {
      throw Error(ErrorCode::InvalidArgument, "enumerated datatype needs at least one value",
                  type.name);
    }
    std::set<std::string> seen(type.values.begin(), type.values.end());
    if (seen.size() != type.values.size()) {
      throw Error(ErrorCode::InvalidArgument, "enumerated datatype lists a value twice",
                  type.name);
    }
  } else if (!type.values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "only enumerated datatypes carry values", type.name);
  }
  if (auto it = types_.find(type.name); it != types_.end()) {
    if (it->second == type) return;
    throw Error(ErrorCode::InvalidArgument, "conflicting definitions for datatype", type.name);
  }
  auto name = type.name;
  types_.emplace(std::move(name), std::move(type));
}

const DataType* TypeRegistry::find(std::string_view name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : &it->second;
}

const DataType& TypeRegistry::at(std::string_view name) const {
  if (const auto* t = find(name)) return *t;
  throw Error(ErrorCode::UnknownDataType, "unknown datatype", std::string(name));
}

TypeRegistry TypeRegistry::merge(const TypeRegistry& a, const TypeRegistry& b) {
  TypeRegistry out = a;
  for (const auto& [_, t] : b.types()) out.add(t);
  return out;
}

std::string Value::to_string() const {
  if (is_integer()) return std::to_string(as_integer());
  return as_string();
}

std::string to_string(const Tuple& tuple) {
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += ",";
    out += tuple[i].to_string();
  }
  out += ")";
  return out;
}

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int year = std::stoi(std::string(s.substr(0, 4)));
  const int month = std::stoi(std::string(s.substr(5, 2)));
  const int day = std::stoi(std::string(s.substr(8, 2)));
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int limit = kDays[month - 1];
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) limit = 29;
  return day <= limit;
}

bool conforms(const DataType& type, const Value& value) {
  switch (type.kind) {
    case TypeKind::Integer:
      return value.is_integer();
    case TypeKind::Text:
      return !value.is_integer();
    case TypeKind::Date:
      return !value.is_integer() && is_iso_date(value.as_string());
    case TypeKind::Enumerated:
      return !value.is_integer() &&
             std::find(type.values.begin(), type.values.end(), value.as_string()) !=
                 type.values.end();
  }
  return false;
}

}  // namespace simplexdb
