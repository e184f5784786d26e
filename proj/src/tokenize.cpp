#include "datekit/tokenize.hpp"

#include <cstdint>

namespace datekit {

TokenizedText::TokenizedText(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) ++counts_[t];
}

std::size_t TokenizedText::count(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {kInvalid, 1};
  }
  if (pos + len > s.size()) return {kInvalid, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return {kInvalid, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
    case 0x3001: case 0x3002: case 0x3003: case 0x300C: case 0x300D: case 0xFF0C: case 0xFF0E:
      return true;
    default:
      return cp >= 0x2010 && cp <= 0x2027;
  }
}

char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

struct Unit {
  char32_t cp;  // kInvalid for a raw byte
  char raw;
};

void flush(std::vector<Unit>& word, std::vector<std::string>& tokens) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && word[begin].cp != kInvalid && is_punct(word[begin].cp)) ++begin;
  while (end > begin && word[end - 1].cp != kInvalid && is_punct(word[end - 1].cp)) --end;
  if (begin < end) {
    std::string token;
    for (std::size_t k = begin; k < end; ++k) {
      if (word[k].cp == kInvalid) {
        token.push_back(word[k].raw);
      } else {
        encode(lower(word[k].cp), token);
      }
    }
    tokens.push_back(std::move(token));
  }
  word.clear();
}

}  // namespace

TokenizedText tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<Unit> word;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto [cp, len] = decode(text, pos);
    if (cp != kInvalid && is_space(cp)) {
      flush(word, tokens);
    } else {
      word.push_back({cp, text[pos]});
    }
    pos += len;
  }
  flush(word, tokens);
  return TokenizedText(std::move(tokens));
}

}  // namespace datekit
