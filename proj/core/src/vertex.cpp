#include "treeshift/vertex.hpp"

#include <charconv>
#include <sstream>

namespace treeshift {

namespace {

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string VertexId::to_string() const {
  if (is_integer()) return std::to_string(integer());
  if (is_pair()) {
    std::ostringstream os;
    os << '(' << pair().first << ',' << pair().second << ')';
    return os.str();
  }
  return name();
}

VertexId VertexId::parse(const std::string& text) {
  std::int64_t n = 0;
  if (parse_int(text, n)) return VertexId(n);
  if (text.size() >= 5 && text.front() == '(' && text.back() == ')') {
    std::string_view body(text.data() + 1, text.size() - 2);
    auto comma = body.find(',');
    std::int64_t a = 0;
    std::int64_t b = 0;
    if (comma != std::string_view::npos && parse_int(body.substr(0, comma), a) &&
        parse_int(body.substr(comma + 1), b)) {
      return VertexId(a, b);
    }
  }
  return VertexId(text);
}

}  // namespace treeshift
