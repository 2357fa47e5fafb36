#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace seqbench {

using Token = std::uint32_t;

/// Ordered, duplicate-free list of token strings. Size is at least 2.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> tokens);

  /// Letters "A", "B", ... for sizes up to 26; "T0", "T1", ... beyond that.
  static Alphabet letters(std::size_t size);
  /// The 20 canonical amino acids, "ACDEFGHIKLMNPQRSTVWY".
  static Alphabet amino_acids();
  /// Amino acids for size 20, letters otherwise.
  static Alphabet standard(std::size_t size);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(Token t) const { return tokens_.at(t); }

  /// Index of a token string; throws UnknownToken.
  Token index_of(const std::string& token) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> tokens_;
};

/// Fixed-length vector of token indices.
class Sequence {
 public:
  Sequence() = default;
  explicit Sequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  Sequence(std::initializer_list<Token> tokens) : tokens_(tokens) {}

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  Token operator[](std::size_t i) const { return tokens_[i]; }
  Token& operator[](std::size_t i) { return tokens_[i]; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }
  auto begin() noexcept { return tokens_.begin(); }
  auto end() noexcept { return tokens_.end(); }
  std::span<const Token> tokens() const noexcept { return tokens_; }

  auto operator<=>(const Sequence&) const = default;
  bool operator==(const Sequence&) const = default;

 private:
  std::vector<Token> tokens_;
};

struct SequenceHash {
  std::size_t operator()(const Sequence& s) const noexcept;
};

/// Token strings joined without separator when every token is one
/// character, separated by single spaces otherwise.
std::string render(const Sequence& seq, const Alphabet& alphabet);

/// Inverse of render(). Throws UnknownToken.
Sequence parse_sequence(const std::string& text, const Alphabet& alphabet);

std::vector<std::string> to_tokens(const Sequence& seq, const Alphabet& alphabet);
Sequence from_tokens(const std::vector<std::string>& tokens, const Alphabet& alphabet);

}  // namespace seqbench
