#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>

namespace treeshift {

/// Opaque vertex identifier.
///
/// Path trees use integers, the branches of T(eta, kappa) use pairs
/// (branch index, depth), and explicit trees may also use names. Ordering is
/// lexicographic on the canonical encoding: integers, then pairs, then names.
class VertexId {
 public:
  using Pair = std::pair<std::int64_t, std::int64_t>;

  VertexId() = default;
  VertexId(std::int64_t n) : value_(n) {}  // NOLINT(google-explicit-constructor)
  VertexId(int n) : value_(static_cast<std::int64_t>(n)) {}  // NOLINT
  VertexId(std::int64_t branch, std::int64_t depth) : value_(Pair{branch, depth}) {}
  explicit VertexId(std::string name) : value_(std::move(name)) {}

  bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_pair() const { return std::holds_alternative<Pair>(value_); }
  bool is_name() const { return std::holds_alternative<std::string>(value_); }

  std::int64_t integer() const { return std::get<std::int64_t>(value_); }
  const Pair& pair() const { return std::get<Pair>(value_); }
  const std::string& name() const { return std::get<std::string>(value_); }

  /// "3", "-2", "(1,4)" or the bare name.
  std::string to_string() const;

  /// Inverse of to_string(): integers and "(i,j)" are recognised, anything
  /// else becomes a name.
  static VertexId parse(const std::string& text);

  friend bool operator==(const VertexId& a, const VertexId& b) { return a.value_ == b.value_; }
  friend bool operator!=(const VertexId& a, const VertexId& b) { return !(a == b); }
  friend bool operator<(const VertexId& a, const VertexId& b) { return a.value_ < b.value_; }

 private:
  std::variant<std::int64_t, Pair, std::string> value_{std::int64_t{0}};
};

}  // namespace treeshift
