#include "seqbench/core/sequence.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "seqbench/core/error.hpp"

namespace seqbench {

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2) {
    throw Error(ErrorCode::ConfigError, "alphabet needs at least 2 tokens");
  }
  std::set<std::string> seen;
  for (const auto& t : tokens_) {
    if (t.empty()) throw Error(ErrorCode::ConfigError, "empty token in alphabet");
    if (t.find(' ') != std::string::npos) {
      throw Error(ErrorCode::ConfigError, "token contains a space: '" + t + "'");
    }
    if (!seen.insert(t).second) {
      throw Error(ErrorCode::ConfigError, "duplicate token '" + t + "'");
    }
  }
}

Alphabet Alphabet::letters(std::size_t size) {
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    tokens.push_back(size <= 26 ? std::string(1, static_cast<char>('A' + i))
                                : "T" + std::to_string(i));
  }
  return Alphabet(std::move(tokens));
}

Alphabet Alphabet::amino_acids() {
  std::vector<std::string> tokens;
  for (char c : std::string("ACDEFGHIKLMNPQRSTVWY")) tokens.emplace_back(1, c);
  return Alphabet(std::move(tokens));
}

Alphabet Alphabet::standard(std::size_t size) {
  return size == 20 ? amino_acids() : letters(size);
}

Token Alphabet::index_of(const std::string& token) const {
  auto it = std::find(tokens_.begin(), tokens_.end(), token);
  if (it == tokens_.end()) {
    throw Error(ErrorCode::UnknownToken, "token '" + token + "' not in alphabet");
  }
  return static_cast<Token>(it - tokens_.begin());
}

std::size_t SequenceHash::operator()(const Sequence& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Token t : s) {
    h ^= t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

bool single_char(const Alphabet& alphabet) {
  return std::all_of(alphabet.tokens().begin(), alphabet.tokens().end(),
                     [](const std::string& t) { return t.size() == 1; });
}

}  // namespace

std::string render(const Sequence& seq, const Alphabet& alphabet) {
  std::string out;
  const bool compact = single_char(alphabet);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!compact && i > 0) out.push_back(' ');
    out += alphabet.token(seq[i]);
  }
  return out;
}

Sequence parse_sequence(const std::string& text, const Alphabet& alphabet) {
  std::vector<Token> tokens;
  if (single_char(alphabet)) {
    for (char c : text) tokens.push_back(alphabet.index_of(std::string(1, c)));
  } else {
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(alphabet.index_of(tok));
  }
  return Sequence(std::move(tokens));
}

std::vector<std::string> to_tokens(const Sequence& seq, const Alphabet& alphabet) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (Token t : seq) out.push_back(alphabet.token(t));
  return out;
}

Sequence from_tokens(const std::vector<std::string>& tokens, const Alphabet& alphabet) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(alphabet.index_of(t));
  return Sequence(std::move(out));
}

}  // namespace seqbench
