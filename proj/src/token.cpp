#include "problr/token.hpp"

#include <sstream>

namespace problr {

std::vector<Token> parse_token_line(const std::string& line) {
  std::vector<Token> out;
  std::istringstream in(line);
  std::string item;
  int index = 0;
  while (in >> item) {
    auto us = item.rfind('_');
    if (us == std::string::npos || us + 1 == item.size())
      throw TokenError(index, "token " + std::to_string(index) + " '" + item +
                                  "': expected surface_LABEL");
    out.push_back({item.substr(0, us), item.substr(us + 1)});
    ++index;
  }
  return out;
}

std::string tokens_to_string(const std::vector<Token>& toks) {
  std::string out;
  for (auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t.surface;
    out += '_';
    out += t.label;
  }
  return out;
}

}  // namespace problr
