#include "ctm/text.hpp"

#include <locale.h>
#include <wctype.h>

#include <array>
#include <cstdint>
#include <stdexcept>

namespace ctm::text {
namespace {

struct Utf8Locale {
  locale_t handle;
  Utf8Locale() : handle(newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0))) {
    if (handle == static_cast<locale_t>(0)) {
      throw std::runtime_error("C.UTF-8 locale is unavailable");
    }
  }
  ~Utf8Locale() { freelocale(handle); }
};

locale_t utf8() {
  static const Utf8Locale loc;
  return loc.handle;
}

struct Decoded {
  char32_t cp;
  std::size_t len;
  bool valid;
};

Decoded decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1, true};
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
    return {b0, 1, false};
  }
  if (i + len > s.size()) return {b0, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
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

// Unicode White_Space property.
bool is_space(char32_t cp) {
  static constexpr std::array<char32_t, 25> kSpaces = {
      0x0009, 0x000A, 0x000B, 0x000C, 0x000D, 0x0020, 0x0085, 0x00A0, 0x1680,
      0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005, 0x2006, 0x2007, 0x2008,
      0x2009, 0x200A, 0x2028, 0x2029, 0x202F, 0x205F, 0x3000};
  for (char32_t c : kSpaces) {
    if (c == cp) return true;
  }
  return false;
}

bool is_punct(char32_t cp) {
  return iswpunct_l(static_cast<wint_t>(cp), utf8()) != 0;
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t i = 0; i < s.size();) {
    const Decoded d = decode(s, i);
    if (d.valid && is_space(d.cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.append(s.substr(i, d.len));
    }
    i += d.len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const Decoded d = decode(s, i);
    if (d.valid) {
      encode(static_cast<char32_t>(towlower_l(static_cast<wint_t>(d.cp), utf8())), out);
    } else {
      out.push_back(s[i]);
    }
    i += d.len;
  }
  return out;
}

std::string strip_punctuation(std::string_view s) {
  std::size_t begin = 0;
  while (begin < s.size()) {
    const Decoded d = decode(s, begin);
    if (!d.valid || !is_punct(d.cp)) break;
    begin += d.len;
  }
  // Scan forward to find the end of the last non-punctuation code point.
  std::size_t end = begin;
  for (std::size_t i = begin; i < s.size();) {
    const Decoded d = decode(s, i);
    i += d.len;
    if (!d.valid || !is_punct(d.cp)) end = i;
  }
  return std::string(s.substr(begin, end - begin));
}

std::vector<std::string> normalize_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& raw : split_whitespace(s)) {
    std::string tok = strip_punctuation(to_lower(raw));
    if (!tok.empty()) out.push_back(std::move(tok));
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto tokens_begin = [&] {
    std::size_t i = 0;
    while (i < s.size()) {
      const Decoded d = decode(s, i);
      if (!d.valid || !is_space(d.cp)) break;
      i += d.len;
    }
    return i;
  }();
  std::size_t end = tokens_begin;
  for (std::size_t i = tokens_begin; i < s.size();) {
    const Decoded d = decode(s, i);
    i += d.len;
    if (!d.valid || !is_space(d.cp)) end = i;
  }
  return std::string(s.substr(tokens_begin, end - tokens_begin));
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += decode(s, i).len) ++n;
  return n;
}

}  // namespace ctm::text
