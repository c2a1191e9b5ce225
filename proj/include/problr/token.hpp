#pragma once
// Token input: whitespace-separated "surface_LABEL" items, the label being a
// PoS or punctuation terminal of the backbone (pco pda pcl psc pqu pex pbo
// pbc pfs for punctuation).

#include <stdexcept>
#include <string>
#include <vector>

namespace problr {

struct Token {
  std::string surface;
  std::string label;
};

struct TokenError : std::runtime_error {
  int index;
  TokenError(int index_, const std::string& msg)
      : std::runtime_error(msg), index(index_) {}
};

// Splits on whitespace; the label follows the last underscore of each item.
// Throws TokenError naming the offending token index.
std::vector<Token> parse_token_line(const std::string& line);

std::string tokens_to_string(const std::vector<Token>& toks);

}  // namespace problr
